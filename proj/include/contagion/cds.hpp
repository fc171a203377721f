#pragma once

#include "contagion/balance.hpp"
#include "contagion/netgen.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace contagion {

/// Which seller insures each loan edge.
struct ProtectionPattern {
    std::vector<BankIndex> sellers;
    std::vector<BankIndex> seller_of_edge; ///< aligned with topology.edges()
    std::vector<double> seller_notional;   ///< covered notional per entry of `sellers`
    /// All sellers treated as defaulted before the first round: no claim is honored.
    bool void_contracts = false;
};

/// The `s_count` banks with the largest total assets, ties by lower index.
std::vector<BankIndex> select_sellers(const BalanceSheetSet& sheets, std::size_t s_count);

/// Each edge draws a seller uniformly among `sellers` other than its creditor.
ProtectionPattern assign_protection(const WeightedNetwork& network, std::span<const BankIndex> sellers,
                                    std::uint64_t seed);

} // namespace contagion
