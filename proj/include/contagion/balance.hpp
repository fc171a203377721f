#pragma once

#include "contagion/netgen.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace contagion {

/// Per-bank balance sheets in average-bank-asset units.
struct BalanceSheetSet {
    std::vector<double> loans;      ///< interbank assets l
    std::vector<double> borrowings; ///< interbank liabilities b
    std::vector<double> external;   ///< external assets e
    std::vector<double> capital;    ///< equity c
    std::vector<double> deposits;   ///< d
    double gamma = 0.0;
    double theta = 0.0;

    std::size_t size() const { return loans.size(); }
    double assets(std::size_t n) const { return loans[n] + external[n]; }
    std::vector<double> assets() const;
    double total_loans() const;
    double total_assets() const;

    /// First bank with negative deposits, if any.
    std::optional<std::size_t> first_infeasible() const;
};

/// Balance sheets after every loan is insured and `leverage_f` times the
/// insured book is lent again without protection, along the same edges.
struct TransferredSystem {
    BalanceSheetSet base;
    std::vector<double> covered;   ///< insured notional per edge
    std::vector<double> uncovered; ///< uninsured additional notional per edge
    double leverage_f = 0.0;

    /// Loss a creditor books when the debtor on edge `i` defaults.
    double exposure(std::size_t i) const { return covered[i] + uncovered[i]; }
};

/// l and b from the edge weights, e by proportional allocation of the
/// external-asset pool, c = gamma a, d = a - c - b.
/// Throws InfeasibleSheet when any bank ends up with negative deposits.
BalanceSheetSet build_balance_sheets(const WeightedNetwork& network, double theta, double gamma);

/// Same as build_balance_sheets but never throws on negative deposits.
BalanceSheetSet compute_balance_sheets(const WeightedNetwork& network, double theta, double gamma);

/// How equity is spread over banks once the balance sheets grow.
enum class CapitalAllocation {
    /// Every bank keeps its pre-transfer equity.
    frozen,
    /// Total equity is unchanged and every bank ends at the same ratio l' = gamma / (1 + f theta).
    uniform_ratio,
};

/// Throws InfeasibleSheet when a recomputed deposit column goes negative.
TransferredSystem apply_risk_transfer(const BalanceSheetSet& sheets, const WeightedNetwork& network, double f,
                                      CapitalAllocation capital = CapitalAllocation::uniform_ratio);
TransferredSystem compute_risk_transfer(const BalanceSheetSet& sheets, const WeightedNetwork& network, double f,
                                        CapitalAllocation capital = CapitalAllocation::uniform_ratio);

/// Capital over risk-weighted assets once insured loans carry zero weight.
double core_tier1_ratio(double gamma, double theta, double f);
/// Capital over unweighted total assets after the additional lending.
double leverage_ratio(double gamma, double theta, double f);
/// Aggregate interbank share of assets after the additional lending.
double transferred_loan_ratio(double theta, double f);

} // namespace contagion
