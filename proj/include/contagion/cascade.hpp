#pragma once

#include "contagion/balance.hpp"
#include "contagion/cds.hpp"
#include "contagion/netgen.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace contagion {

enum class Phase { accrual, buyer_solvency, settlement, seller_solvency };
enum class EventKind { loss, failure, claim_paid, claim_charged, claim_unhonored };

std::string_view phase_name(Phase p);
std::string_view event_name(EventKind e);

struct CascadeEvent {
    std::size_t round;
    Phase phase;
    BankIndex bank;
    EventKind kind;
    double amount;
};

struct CascadeResult {
    std::size_t failures = 0;
    std::vector<BankIndex> failed_set; ///< ascending bank index
    std::size_t rounds = 0;            ///< rounds executed, including the final quiet one
    std::vector<std::size_t> per_round_failures;

    friend bool operator==(const CascadeResult&, const CascadeResult&) = default;
};

/// Round-synchronous default propagation with CDS settlement.
///
/// Round 0 books `initial_loss` and fails every bank whose loss exceeds its
/// capital. Each later round:
///   A. creditors alive at the start of the round book covered + uncovered
///      notional on every loan to a bank that failed in the previous round;
///   B. banks whose gross loss exceeds capital fail;
///   C. for those defaults, a claim is honored iff buyer and seller are both
///      still alive; the covered notional moves from buyer to seller ledger;
///   D. banks whose loss (now including payoff charges) exceeds capital fail.
/// Stops after a round with no new failures or when no bank is left alive.
///
/// `protection` may be null (no insurance). `trace`, when non-null, receives
/// every loss, failure and settlement event.
CascadeResult run_cascade(const WeightedNetwork& network, const TransferredSystem& system,
                          const ProtectionPattern* protection, std::span<const double> initial_loss,
                          std::vector<CascadeEvent>* trace = nullptr);

/// Plain system without risk transfer or insurance.
CascadeResult run_cascade(const WeightedNetwork& network, const BalanceSheetSet& sheets,
                          std::span<const double> initial_loss, std::vector<CascadeEvent>* trace = nullptr);

} // namespace contagion
