#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace contagion {

using BankIndex = std::uint32_t;

/// Directed loan relation: `debtor` borrows from `creditor`.
struct Edge {
    BankIndex creditor;
    BankIndex debtor;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed interbank topology. Edges are stored sorted by (creditor, debtor);
/// a second index groups edge ids by debtor for default propagation.
class Topology {
public:
    Topology() = default;
    /// Throws InvalidArgument on self-edges, duplicates or out-of-range banks.
    Topology(std::size_t n_banks, std::vector<Edge> edges);

    std::size_t n_banks() const { return n_banks_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const std::uint32_t> in_degree() const { return in_degree_; }
    std::span<const std::uint32_t> out_degree() const { return out_degree_; }

    /// Ids of edges whose debtor is `bank`.
    std::span<const std::uint32_t> edges_to(BankIndex bank) const {
        return {debtor_edges_.data() + debtor_offsets_[bank],
                debtor_edges_.data() + debtor_offsets_[bank + 1]};
    }
    /// Ids [first, last) of edges whose creditor is `bank`.
    std::pair<std::uint32_t, std::uint32_t> edges_from(BankIndex bank) const {
        return {creditor_offsets_[bank], creditor_offsets_[bank + 1]};
    }

    bool has_edge(BankIndex creditor, BankIndex debtor) const;

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.n_banks_ == b.n_banks_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_banks_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> in_degree_;
    std::vector<std::uint32_t> out_degree_;
    std::vector<std::uint32_t> creditor_offsets_;
    std::vector<std::uint32_t> debtor_offsets_;
    std::vector<std::uint32_t> debtor_edges_;
};

/// Topology plus a loan value on every edge. Values are in units where the
/// average bank holds total assets of one.
struct WeightedNetwork {
    Topology topology;
    std::vector<double> weights; ///< aligned with topology.edges()
    double exponent_r = 0.0;
    double total_loans = 0.0;

    std::size_t n_banks() const { return topology.n_banks(); }
    /// Interbank loans per bank (row sums).
    std::vector<double> loans() const;
    /// Interbank borrowings per bank (column sums).
    std::vector<double> borrowings() const;
};

struct AttachmentParams {
    /// Additive attractiveness as a multiple of the per-node attachment count m.
    /// The undirected degree tail exponent is 3 + ratio, so -0.5 gives 2.5.
    double attractiveness_ratio = -0.5;
};

/// Attachments per new node for a target denseness.
std::size_t attachments_per_node(std::size_t n_banks, double denseness);

/// Generalised preferential-attachment graph, grown undirected from a clique of
/// m+1 nodes and then oriented edge by edge with a fair coin.
Topology generate_topology(std::size_t n_banks, double denseness, std::uint64_t seed,
                           AttachmentParams params = {});

/// Loan values proportional to (k_out[creditor] * k_in[debtor])^r, scaled to `total_loans`.
WeightedNetwork assign_loan_weights(const Topology& topology, double exponent_r, double total_loans);

struct ConcentrationTuning {
    double lower = 0.0;
    double upper = 32.0;
    double tolerance = 0.005;
    int max_iterations = 60;
};

/// Bisection on r until the measured concentration is within tolerance of
/// `target_rho`. Throws Unreachable when the target is outside [rho(lower), rho(upper)].
WeightedNetwork tune_concentration(const Topology& topology, double target_rho, double total_loans,
                                   ConcentrationTuning tuning = {});

/// E / (N (N-1)).
double measure_denseness(const Topology& topology);

/// Share of total loans held by the ceil(N/100) largest lenders.
double measure_concentration(const WeightedNetwork& network);
double measure_concentration(std::span<const double> loans, double total_loans);

} // namespace contagion
