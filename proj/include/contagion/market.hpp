#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace contagion {

/// Row-major N x M allocation of each bank's external assets across asset classes.
struct Portfolio {
    std::size_t n_banks = 0;
    std::size_t m_assets = 0;
    std::vector<double> allocation;

    double at(std::size_t bank, std::size_t asset) const { return allocation[bank * m_assets + asset]; }
    std::span<const double> row(std::size_t bank) const {
        return {allocation.data() + bank * m_assets, m_assets};
    }
};

/// Fractional price changes of the asset classes for one scenario.
struct ShockVector {
    std::vector<double> returns;
    double amplitude = 0.0;
    double dof = 0.0;
};

/// Uniform on the simplex: for M=2 the first weight is U(0,1), in general Dirichlet(1).
Portfolio draw_portfolio(std::size_t n_banks, std::size_t m_assets, std::uint64_t seed);

/// returns[m] = amplitude * T_m with T_m i.i.d. Student-t(dof).
ShockVector draw_shocks(std::size_t m_assets, double amplitude, double dof, std::uint64_t seed);

/// Loss of each bank from its external book, max(0, -e_n sum_m X_nm v_m).
std::vector<double> initial_distress(std::span<const double> external, const Portfolio& portfolio,
                                     const ShockVector& shocks);

struct CalibrationSettings {
    double gamma_ref = 0.07;
    double target_p = 1e-3;
    std::size_t m_assets = 2;
    double dof = 1.5;
    std::size_t trials = 10'000'000;
    double bracket_lo = 1e-6;
    double bracket_hi = 1e3;
};

struct CalibrationResult {
    double amplitude = 0.0;
    double failure_probability = 0.0; ///< in-sample rate at `amplitude`
    std::size_t trials = 0;
    int iterations = 0;
};

/// Bisection on the shock amplitude so that a bank holding only external
/// assets with capital ratio gamma_ref fails with probability target_p.
/// Throws CalibrationDiverged when the bracket does not straddle the target.
CalibrationResult calibrate_amplitude(const CalibrationSettings& settings, std::uint64_t seed);

/// Monte-Carlo failure rate of the standalone bank at a given amplitude.
double solo_failure_rate(double amplitude, double gamma_ref, std::size_t m_assets, double dof,
                         std::size_t trials, std::uint64_t seed);

} // namespace contagion
