#include "contagion/netgen.hpp"

#include "contagion/errors.hpp"
#include "contagion/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace contagion {

Topology::Topology(std::size_t n_banks, std::vector<Edge> edges)
    : n_banks_(n_banks), edges_(std::move(edges)), in_degree_(n_banks, 0), out_degree_(n_banks, 0) {
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.creditor != b.creditor ? a.creditor < b.creditor : a.debtor < b.debtor;
    });
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.creditor >= n_banks || e.debtor >= n_banks)
            throw InvalidArgument("edge endpoint out of range");
        if (e.creditor == e.debtor)
            throw InvalidArgument("self-edge on bank " + std::to_string(e.creditor));
        if (i > 0 && edges_[i - 1] == e)
            throw InvalidArgument("duplicate edge");
        ++out_degree_[e.creditor];
        ++in_degree_[e.debtor];
    }

    creditor_offsets_.assign(n_banks + 1, 0);
    debtor_offsets_.assign(n_banks + 1, 0);
    for (std::size_t b = 0; b < n_banks; ++b) {
        creditor_offsets_[b + 1] = creditor_offsets_[b] + out_degree_[b];
        debtor_offsets_[b + 1] = debtor_offsets_[b] + in_degree_[b];
    }
    debtor_edges_.resize(edges_.size());
    std::vector<std::uint32_t> cursor(debtor_offsets_.begin(), debtor_offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i)
        debtor_edges_[cursor[edges_[i].debtor]++] = i;
}

bool Topology::has_edge(BankIndex creditor, BankIndex debtor) const {
    if (creditor >= n_banks_)
        return false;
    auto first = edges_.begin() + creditor_offsets_[creditor];
    auto last = edges_.begin() + creditor_offsets_[creditor + 1];
    return std::binary_search(first, last, Edge{creditor, debtor},
                              [](const Edge& a, const Edge& b) { return a.debtor < b.debtor; });
}

std::vector<double> WeightedNetwork::loans() const {
    std::vector<double> out(n_banks(), 0.0);
    auto edges = topology.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        out[edges[i].creditor] += weights[i];
    return out;
}

std::vector<double> WeightedNetwork::borrowings() const {
    std::vector<double> out(n_banks(), 0.0);
    auto edges = topology.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        out[edges[i].debtor] += weights[i];
    return out;
}

namespace {

// Fenwick tree over non-negative node weights for O(log n) proportional sampling.
class WeightTree {
public:
    explicit WeightTree(std::size_t n) : tree_(n + 1, 0.0), weight_(n, 0.0) {
        while (top_ * 2 <= n)
            top_ *= 2;
    }

    void set(std::size_t i, double w) {
        const double delta = w - weight_[i];
        weight_[i] = w;
        for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1))
            tree_[k] += delta;
    }

    double weight(std::size_t i) const { return weight_[i]; }

    double total() const {
        double s = 0.0;
        for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1))
            s += tree_[k];
        return s;
    }

    // Smallest index whose inclusive prefix sum exceeds u.
    std::size_t find(double u) const {
        std::size_t pos = 0;
        for (std::size_t step = top_; step > 0; step /= 2) {
            if (pos + step < tree_.size() && tree_[pos + step] <= u) {
                pos += step;
                u -= tree_[pos];
            }
        }
        return std::min(pos, weight_.size() - 1);
    }

private:
    std::vector<double> tree_;
    std::vector<double> weight_;
    std::size_t top_ = 1;
};

} // namespace

std::size_t attachments_per_node(std::size_t n_banks, double denseness) {
    return static_cast<std::size_t>(std::llround(denseness * static_cast<double>(n_banks - 1)));
}

Topology generate_topology(std::size_t n_banks, double denseness, std::uint64_t seed,
                           AttachmentParams params) {
    if (n_banks < 3)
        throw InvalidArgument("generate_topology needs at least 3 banks");
    if (!(denseness > 0.0 && denseness <= 1.0))
        throw InvalidArgument("denseness must lie in (0, 1]");
    const std::size_t m = attachments_per_node(n_banks, denseness);
    if (m < 1)
        throw InvalidArgument("denseness too small: fewer than one attachment per node");
    if (m >= n_banks)
        throw InvalidArgument("denseness too large for the number of banks");

    const double a0 = params.attractiveness_ratio * static_cast<double>(m);
    if (static_cast<double>(m) + a0 <= 0.0)
        throw InvalidArgument("attractiveness leaves non-positive attachment kernel");

    RandomStream rng(seed);
    std::vector<std::uint32_t> degree(n_banks, 0);
    std::vector<std::pair<BankIndex, BankIndex>> undirected;
    undirected.reserve(m * (m + 1) / 2 + (n_banks - m - 1) * m);

    const std::size_t core = m + 1;
    for (BankIndex u = 0; u < core; ++u)
        for (BankIndex v = u + 1; v < core; ++v) {
            undirected.emplace_back(u, v);
            ++degree[u];
            ++degree[v];
        }

    WeightTree tree(n_banks);
    for (BankIndex u = 0; u < core; ++u)
        tree.set(u, degree[u] + a0);

    std::vector<BankIndex> chosen;
    chosen.reserve(m);
    for (BankIndex t = static_cast<BankIndex>(core); t < n_banks; ++t) {
        chosen.clear();
        while (chosen.size() < m) {
            const std::size_t pick = tree.find(rng.uniform() * tree.total());
            if (tree.weight(pick) <= 0.0)
                continue;
            chosen.push_back(static_cast<BankIndex>(pick));
            tree.set(pick, 0.0);
        }
        for (BankIndex v : chosen) {
            undirected.emplace_back(v, t);
            ++degree[v];
            tree.set(v, degree[v] + a0);
        }
        degree[t] = static_cast<std::uint32_t>(m);
        tree.set(t, degree[t] + a0);
    }

    std::vector<Edge> edges;
    edges.reserve(undirected.size());
    for (auto [u, v] : undirected)
        edges.push_back(rng.coin() ? Edge{u, v} : Edge{v, u});
    return Topology(n_banks, std::move(edges));
}

namespace {

// log(k_out[creditor] * k_in[debtor]) per edge; both are >= 1 on any edge.
std::vector<double> log_kernel(const Topology& topology) {
    auto edges = topology.edges();
    auto kin = topology.in_degree();
    auto kout = topology.out_degree();
    std::vector<double> out(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        out[i] = std::log(static_cast<double>(kout[edges[i].creditor]) *
                          static_cast<double>(kin[edges[i].debtor]));
    return out;
}

void fill_weights(std::span<const double> log_k, double r, double total, std::vector<double>& out) {
    out.resize(log_k.size());
    if (r == 0.0) {
        std::fill(out.begin(), out.end(), total / static_cast<double>(log_k.size()));
        return;
    }
    const double peak = *std::max_element(log_k.begin(), log_k.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < log_k.size(); ++i) {
        out[i] = std::exp(r * (log_k[i] - peak));
        sum += out[i];
    }
    const double scale = total / sum;
    for (double& w : out)
        w *= scale;
}

double concentration_of(const Topology& topology, std::span<const double> weights, double total,
                        std::vector<double>& scratch) {
    scratch.assign(topology.n_banks(), 0.0);
    auto edges = topology.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        scratch[edges[i].creditor] += weights[i];
    return measure_concentration(scratch, total);
}

} // namespace

WeightedNetwork assign_loan_weights(const Topology& topology, double exponent_r, double total_loans) {
    if (topology.edge_count() == 0)
        throw InvalidArgument("assign_loan_weights needs at least one edge");
    if (!(exponent_r >= 0.0))
        throw InvalidArgument("exponent_r must be non-negative");
    if (!(total_loans > 0.0))
        throw InvalidArgument("total_loans must be positive");
    WeightedNetwork net{topology, {}, exponent_r, total_loans};
    fill_weights(log_kernel(topology), exponent_r, total_loans, net.weights);
    return net;
}

WeightedNetwork tune_concentration(const Topology& topology, double target_rho, double total_loans,
                                   ConcentrationTuning tuning) {
    if (topology.edge_count() == 0)
        throw InvalidArgument("tune_concentration needs at least one edge");
    if (!(total_loans > 0.0))
        throw InvalidArgument("total_loans must be positive");
    const auto log_k = log_kernel(topology);
    std::vector<double> weights;
    std::vector<double> scratch;
    auto rho_at = [&](double r) {
        fill_weights(log_k, r, total_loans, weights);
        return concentration_of(topology, weights, total_loans, scratch);
    };
    auto finish = [&](double r) {
        fill_weights(log_k, r, total_loans, weights);
        return WeightedNetwork{topology, std::move(weights), r, total_loans};
    };

    double lo = tuning.lower;
    double hi = tuning.upper;
    const double rho_lo = rho_at(lo);
    if (std::abs(rho_lo - target_rho) <= tuning.tolerance)
        return finish(lo);
    if (target_rho < rho_lo)
        throw Unreachable("target concentration " + std::to_string(target_rho) +
                          " is below the constant-weight baseline " + std::to_string(rho_lo));
    const double rho_hi = rho_at(hi);
    if (std::abs(rho_hi - target_rho) <= tuning.tolerance)
        return finish(hi);
    if (target_rho > rho_hi)
        throw Unreachable("target concentration " + std::to_string(target_rho) +
                          " exceeds the value reached at r=" + std::to_string(hi) + " (" +
                          std::to_string(rho_hi) + ")");

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < tuning.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double rho = rho_at(mid);
        if (std::abs(rho - target_rho) <= tuning.tolerance)
            break;
        (rho < target_rho ? lo : hi) = mid;
    }
    return finish(mid);
}

double measure_denseness(const Topology& topology) {
    const double n = static_cast<double>(topology.n_banks());
    if (n < 2)
        return 0.0;
    return static_cast<double>(topology.edge_count()) / (n * (n - 1.0));
}

double measure_concentration(std::span<const double> loans, double total_loans) {
    const std::size_t n = loans.size();
    const std::size_t top = (n + 99) / 100;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          return loans[a] != loans[b] ? loans[a] > loans[b] : a < b;
                      });
    double sum = 0.0;
    for (std::size_t i = 0; i < top; ++i)
        sum += loans[order[i]];
    return sum / total_loans;
}

double measure_concentration(const WeightedNetwork& network) {
    return measure_concentration(network.loans(), network.total_loans);
}

} // namespace contagion
