#include "contagion/cds.hpp"

#include "contagion/errors.hpp"
#include "contagion/random.hpp"

#include <algorithm>
#include <numeric>

namespace contagion {

std::vector<BankIndex> select_sellers(const BalanceSheetSet& sheets, std::size_t s_count) {
    const std::size_t n = sheets.size();
    if (s_count < 1 || s_count > n)
        throw InvalidArgument("seller count must lie in [1, N]");
    const auto assets = sheets.assets();
    std::vector<BankIndex> order(n);
    std::iota(order.begin(), order.end(), BankIndex{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s_count), order.end(),
                      [&](BankIndex a, BankIndex b) {
                          return assets[a] != assets[b] ? assets[a] > assets[b] : a < b;
                      });
    order.resize(s_count);
    return order;
}

ProtectionPattern assign_protection(const WeightedNetwork& network, std::span<const BankIndex> sellers,
                                    std::uint64_t seed) {
    if (sellers.empty())
        throw InvalidArgument("at least one protection seller is required");
    for (BankIndex s : sellers)
        if (s >= network.n_banks())
            throw InvalidArgument("seller index out of range");

    ProtectionPattern p;
    p.sellers.assign(sellers.begin(), sellers.end());
    p.seller_notional.assign(sellers.size(), 0.0);
    auto edges = network.topology.edges();
    p.seller_of_edge.resize(edges.size());

    RandomStream rng(seed);
    const std::uint64_t k = sellers.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const BankIndex creditor = edges[i].creditor;
        const auto self = std::find(sellers.begin(), sellers.end(), creditor);
        std::size_t slot;
        if (self == sellers.end()) {
            slot = rng.below(k);
        } else {
            if (k == 1)
                throw NoEligibleSeller("bank " + std::to_string(creditor) +
                                       " is the only seller and cannot insure its own loan");
            // draw among the k-1 others by skipping the creditor's own slot
            const auto own = static_cast<std::size_t>(self - sellers.begin());
            slot = rng.below(k - 1);
            if (slot >= own)
                ++slot;
        }
        p.seller_of_edge[i] = sellers[slot];
        p.seller_notional[slot] += network.weights[i];
    }
    return p;
}

} // namespace contagion
