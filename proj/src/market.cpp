#include "contagion/market.hpp"

#include "contagion/errors.hpp"
#include "contagion/random.hpp"

#include <algorithm>
#include <cmath>

namespace contagion {

namespace {

void fill_row(RandomStream& rng, std::span<double> row) {
    const std::size_t m = row.size();
    if (m == 1) {
        row[0] = 1.0;
        return;
    }
    if (m == 2) {
        row[0] = rng.uniform();
        row[1] = 1.0 - row[0];
        return;
    }
    double sum = 0.0;
    for (double& x : row) {
        x = rng.exponential();
        sum += x;
    }
    for (double& x : row)
        x /= sum;
}

// Portfolio-weighted unit-amplitude loss, -sum_m X_m T_m, of one standalone trial.
double solo_loss(RandomStream& rng, std::span<double> row, double dof) {
    fill_row(rng, row);
    double ret = 0.0;
    for (double x : row)
        ret += x * rng.student_t(dof);
    return -ret;
}

} // namespace

Portfolio draw_portfolio(std::size_t n_banks, std::size_t m_assets, std::uint64_t seed) {
    if (m_assets < 1)
        throw InvalidArgument("at least one asset class is required");
    Portfolio p{n_banks, m_assets, std::vector<double>(n_banks * m_assets)};
    RandomStream rng(seed);
    for (std::size_t n = 0; n < n_banks; ++n)
        fill_row(rng, {p.allocation.data() + n * m_assets, m_assets});
    return p;
}

ShockVector draw_shocks(std::size_t m_assets, double amplitude, double dof, std::uint64_t seed) {
    if (!(amplitude > 0.0))
        throw InvalidArgument("shock amplitude must be positive");
    if (!(dof > 1.0))
        throw InvalidArgument("degrees of freedom must exceed 1");
    ShockVector v{std::vector<double>(m_assets), amplitude, dof};
    RandomStream rng(seed);
    for (double& r : v.returns)
        r = amplitude * rng.student_t(dof);
    return v;
}

std::vector<double> initial_distress(std::span<const double> external, const Portfolio& portfolio,
                                     const ShockVector& shocks) {
    if (external.size() != portfolio.n_banks || shocks.returns.size() != portfolio.m_assets)
        throw DimensionMismatch("initial_distress: dimensions disagree");
    std::vector<double> loss(external.size());
    for (std::size_t n = 0; n < external.size(); ++n) {
        double ret = 0.0;
        for (std::size_t m = 0; m < portfolio.m_assets; ++m)
            ret += portfolio.at(n, m) * shocks.returns[m];
        loss[n] = std::max(0.0, -external[n] * ret);
    }
    return loss;
}

double solo_failure_rate(double amplitude, double gamma_ref, std::size_t m_assets, double dof,
                         std::size_t trials, std::uint64_t seed) {
    if (trials == 0)
        throw InvalidArgument("trials must be positive");
    RandomStream rng(seed);
    std::vector<double> row(m_assets);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < trials; ++i)
        if (amplitude * solo_loss(rng, row, dof) > gamma_ref)
            ++failures;
    return static_cast<double>(failures) / static_cast<double>(trials);
}

CalibrationResult calibrate_amplitude(const CalibrationSettings& s, std::uint64_t seed) {
    if (!(s.target_p > 0.0 && s.target_p < 0.5))
        throw InvalidArgument("target_p must lie in (0, 0.5)");
    if (!(s.gamma_ref >= 0.0))
        throw InvalidArgument("gamma_ref must be non-negative");
    if (s.m_assets < 1 || !(s.dof > 1.0) || s.trials == 0)
        throw InvalidArgument("invalid calibration settings");

    // One frozen set of unit-amplitude losses; the failure rate at amplitude a
    // is the fraction of losses exceeding gamma_ref / a, monotone in a.
    RandomStream rng(seed);
    std::vector<double> row(s.m_assets);
    std::vector<double> losses(s.trials);
    for (double& l : losses)
        l = solo_loss(rng, row, s.dof);
    std::sort(losses.begin(), losses.end());

    const double n = static_cast<double>(losses.size());
    auto rate = [&](double amplitude) {
        const double threshold = s.gamma_ref / amplitude;
        const auto above = losses.end() - std::upper_bound(losses.begin(), losses.end(), threshold);
        return static_cast<double>(above) / n;
    };

    double lo = s.bracket_lo;
    double hi = s.bracket_hi;
    const double rate_lo = rate(lo);
    const double rate_hi = rate(hi);
    if (!(rate_lo <= s.target_p && rate_hi >= s.target_p))
        throw CalibrationDiverged("failure rate over the amplitude bracket [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "] is [" + std::to_string(rate_lo) + ", " +
                                  std::to_string(rate_hi) + "], which does not contain " +
                                  std::to_string(s.target_p));

    int it = 0;
    for (; it < 200 && hi / lo > 1.0 + 1e-12; ++it) {
        const double mid = std::sqrt(lo * hi);
        (rate(mid) < s.target_p ? lo : hi) = mid;
    }
    const double p_hat = rate(hi);
    if (std::abs(p_hat - s.target_p) > 0.2 * s.target_p)
        throw CalibrationDiverged("calibrated failure rate " + std::to_string(p_hat) +
                                  " is outside 20% of the target");
    return {hi, p_hat, s.trials, it};
}

} // namespace contagion
