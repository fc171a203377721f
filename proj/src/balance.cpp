#include "contagion/balance.hpp"

#include "contagion/errors.hpp"

#include <algorithm>
#include <numeric>

namespace contagion {

std::vector<double> BalanceSheetSet::assets() const {
    std::vector<double> a(size());
    for (std::size_t n = 0; n < size(); ++n)
        a[n] = assets(n);
    return a;
}

double BalanceSheetSet::total_loans() const { return std::accumulate(loans.begin(), loans.end(), 0.0); }

double BalanceSheetSet::total_assets() const {
    return total_loans() + std::accumulate(external.begin(), external.end(), 0.0);
}

std::optional<std::size_t> BalanceSheetSet::first_infeasible() const {
    for (std::size_t n = 0; n < size(); ++n)
        if (deposits[n] < 0.0)
            return n;
    return std::nullopt;
}

BalanceSheetSet compute_balance_sheets(const WeightedNetwork& network, double theta, double gamma) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidArgument("theta must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidArgument("gamma must lie in (0, 1)");

    BalanceSheetSet s;
    s.gamma = gamma;
    s.theta = theta;
    s.loans = network.loans();
    s.borrowings = network.borrowings();
    const std::size_t n = s.loans.size();

    double total_l = 0.0;
    double total_gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_l += s.loans[i];
        total_gap += std::max(s.borrowings[i] - s.loans[i], 0.0);
    }
    const double pool = (1.0 - theta) / theta * total_l - total_gap;

    s.external.resize(n);
    s.capital.resize(n);
    s.deposits.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.external[i] = std::max(s.borrowings[i] - s.loans[i], 0.0) + pool * s.loans[i] / total_l;
        const double a = s.loans[i] + s.external[i];
        s.capital[i] = gamma * a;
        s.deposits[i] = a - s.capital[i] - s.borrowings[i];
    }
    return s;
}

BalanceSheetSet build_balance_sheets(const WeightedNetwork& network, double theta, double gamma) {
    BalanceSheetSet s = compute_balance_sheets(network, theta, gamma);
    if (auto bad = s.first_infeasible())
        throw InfeasibleSheet(*bad, s.deposits[*bad]);
    return s;
}

TransferredSystem compute_risk_transfer(const BalanceSheetSet& sheets, const WeightedNetwork& network, double f,
                                        CapitalAllocation capital) {
    if (!(f >= 0.0))
        throw InvalidArgument("leverage factor f must be non-negative");
    if (sheets.size() != network.n_banks())
        throw DimensionMismatch("balance sheets and network disagree on the number of banks");

    TransferredSystem t;
    t.leverage_f = f;
    t.base = sheets;
    t.covered = network.weights;
    t.uncovered.resize(network.weights.size());
    for (std::size_t i = 0; i < network.weights.size(); ++i)
        t.uncovered[i] = f * network.weights[i];
    if (f == 0.0)
        return t;

    BalanceSheetSet& b = t.base;
    const double ratio = leverage_ratio(sheets.gamma, sheets.theta, f);
    for (std::size_t n = 0; n < b.size(); ++n) {
        b.loans[n] = (1.0 + f) * sheets.loans[n];
        b.borrowings[n] = (1.0 + f) * sheets.borrowings[n];
        if (capital == CapitalAllocation::uniform_ratio)
            b.capital[n] = ratio * (b.external[n] + b.loans[n]);
        b.deposits[n] = b.external[n] + b.loans[n] - b.capital[n] - b.borrowings[n];
    }
    b.theta = transferred_loan_ratio(sheets.theta, f);
    return t;
}

TransferredSystem apply_risk_transfer(const BalanceSheetSet& sheets, const WeightedNetwork& network, double f,
                                      CapitalAllocation capital) {
    TransferredSystem t = compute_risk_transfer(sheets, network, f, capital);
    if (auto bad = t.base.first_infeasible())
        throw InfeasibleSheet(*bad, t.base.deposits[*bad]);
    return t;
}

double core_tier1_ratio(double gamma, double theta, double f) {
    const double denom = 1.0 - theta + f * theta;
    if (!(denom > 0.0))
        throw InvalidArgument("risk-weighted assets must be positive");
    return gamma / denom;
}

double leverage_ratio(double gamma, double theta, double f) {
    if (f < 0.0 || theta < 0.0)
        throw InvalidArgument("f and theta must be non-negative");
    return gamma / (1.0 + f * theta);
}

double transferred_loan_ratio(double theta, double f) { return (theta + f * theta) / (1.0 + f * theta); }

} // namespace contagion
