#include "contagion/cascade.hpp"

#include "contagion/errors.hpp"

#include <cstdint>

namespace contagion {

std::string_view phase_name(Phase p) {
    switch (p) {
    case Phase::accrual: return "accrual";
    case Phase::buyer_solvency: return "buyer_solvency";
    case Phase::settlement: return "settlement";
    case Phase::seller_solvency: return "seller_solvency";
    }
    return "unknown";
}

std::string_view event_name(EventKind e) {
    switch (e) {
    case EventKind::loss: return "loss";
    case EventKind::failure: return "failure";
    case EventKind::claim_paid: return "claim_paid";
    case EventKind::claim_charged: return "claim_charged";
    case EventKind::claim_unhonored: return "claim_unhonored";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kAlive = SIZE_MAX;

class CascadeRun {
public:
    CascadeRun(const WeightedNetwork& network, const TransferredSystem& system,
               const ProtectionPattern* protection, std::span<const double> initial_loss,
               std::vector<CascadeEvent>* trace)
        : topo_(network.topology), system_(system), protection_(protection), trace_(trace),
          loss_(initial_loss.begin(), initial_loss.end()), failed_round_(topo_.n_banks(), kAlive) {}

    CascadeResult run() {
        const std::size_t n = topo_.n_banks();
        CascadeResult result;
        std::size_t alive = n;
        for (std::size_t i = 0; i < n; ++i)
            if (loss_[i] > 0.0)
                record(0, Phase::accrual, static_cast<BankIndex>(i), EventKind::loss, loss_[i]);

        std::vector<BankIndex> defaulted; // failures of the previous round
        for (std::size_t round = 0;; ++round) {
            if (round > 0)
                accrue(round, defaulted);
            std::vector<BankIndex> fresh = fail_insolvent(round, Phase::buyer_solvency);
            if (round > 0 && protection_ != nullptr) {
                settle(round, defaulted);
                auto sellers = fail_insolvent(round, Phase::seller_solvency);
                fresh.insert(fresh.end(), sellers.begin(), sellers.end());
            }
            result.per_round_failures.push_back(fresh.size());
            result.rounds = round + 1;
            alive -= fresh.size();
            if (fresh.empty() || alive == 0)
                break;
            defaulted = std::move(fresh);
        }

        for (std::size_t i = 0; i < n; ++i)
            if (failed_round_[i] != kAlive)
                result.failed_set.push_back(static_cast<BankIndex>(i));
        result.failures = result.failed_set.size();
        return result;
    }

private:
    bool alive(BankIndex b) const { return failed_round_[b] == kAlive; }

    void record(std::size_t round, Phase phase, BankIndex bank, EventKind kind, double amount) {
        if (trace_ != nullptr)
            trace_->push_back({round, phase, bank, kind, amount});
    }

    void accrue(std::size_t round, const std::vector<BankIndex>& defaulted) {
        auto edges = topo_.edges();
        for (BankIndex debtor : defaulted)
            for (std::uint32_t e : topo_.edges_to(debtor)) {
                const BankIndex creditor = edges[e].creditor;
                if (!alive(creditor))
                    continue;
                const double amount = system_.exposure(e);
                loss_[creditor] += amount;
                record(round, Phase::accrual, creditor, EventKind::loss, amount);
            }
    }

    std::vector<BankIndex> fail_insolvent(std::size_t round, Phase phase) {
        std::vector<BankIndex> out;
        const auto& capital = system_.base.capital;
        for (std::size_t i = 0; i < loss_.size(); ++i)
            if (failed_round_[i] == kAlive && loss_[i] > capital[i])
                out.push_back(static_cast<BankIndex>(i));
        for (BankIndex b : out) {
            failed_round_[b] = round;
            record(round, phase, b, EventKind::failure, loss_[b]);
        }
        return out;
    }

    void settle(std::size_t round, const std::vector<BankIndex>& defaulted) {
        auto edges = topo_.edges();
        for (BankIndex debtor : defaulted)
            for (std::uint32_t e : topo_.edges_to(debtor)) {
                const BankIndex buyer = edges[e].creditor;
                if (!alive(buyer))
                    continue;
                const BankIndex seller = protection_->seller_of_edge[e];
                const double amount = system_.covered[e];
                if (protection_->void_contracts || !alive(seller)) {
                    record(round, Phase::settlement, buyer, EventKind::claim_unhonored, amount);
                    continue;
                }
                loss_[buyer] -= amount;
                loss_[seller] += amount;
                record(round, Phase::settlement, buyer, EventKind::claim_paid, amount);
                record(round, Phase::settlement, seller, EventKind::claim_charged, amount);
            }
    }

    const Topology& topo_;
    const TransferredSystem& system_;
    const ProtectionPattern* protection_;
    std::vector<CascadeEvent>* trace_;
    std::vector<double> loss_;
    std::vector<std::size_t> failed_round_;
};

} // namespace

CascadeResult run_cascade(const WeightedNetwork& network, const TransferredSystem& system,
                          const ProtectionPattern* protection, std::span<const double> initial_loss,
                          std::vector<CascadeEvent>* trace) {
    const std::size_t n = network.n_banks();
    if (system.base.size() != n || initial_loss.size() != n ||
        system.covered.size() != network.topology.edge_count() ||
        system.uncovered.size() != system.covered.size())
        throw DimensionMismatch("run_cascade: system, network and initial loss disagree");
    if (protection != nullptr && protection->seller_of_edge.size() != network.topology.edge_count())
        throw DimensionMismatch("run_cascade: protection pattern does not cover the network");
    for (double l : initial_loss)
        if (!(l >= 0.0))
            throw InvalidArgument("initial loss must be non-negative");
    return CascadeRun(network, system, protection, initial_loss, trace).run();
}

CascadeResult run_cascade(const WeightedNetwork& network, const BalanceSheetSet& sheets,
                          std::span<const double> initial_loss, std::vector<CascadeEvent>* trace) {
    return run_cascade(network, compute_risk_transfer(sheets, network, 0.0), nullptr, initial_loss, trace);
}

} // namespace contagion
