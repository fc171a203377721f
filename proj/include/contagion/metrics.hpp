#pragma once

#include "contagion/cascade.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace contagion {

/// Empirical distribution of the failure count over Monte-Carlo samples.
struct DistributionSummary {
    std::size_t sample_count = 0;
    std::vector<std::size_t> histogram; ///< histogram[F] = samples with F failures
    std::size_t f_star = 0;             ///< 99.9th-percentile failure count
    double mean_failures = 0.0;
    std::size_t discarded_samples = 0;
    bool low_sample_warning = false;    ///< fewer than 1000 samples
};

/// Quantile level used for the crisis-representative failure count.
inline constexpr double kSeverityQuantile = 0.999;

/// Order statistic at 1-based index ceil(q * n), no interpolation.
std::size_t order_statistic_quantile(std::span<const std::size_t> values, double q);

DistributionSummary summarize(std::span<const std::size_t> failures, std::size_t n_banks,
                              std::size_t discarded = 0);
DistributionSummary summarize(std::span<const CascadeResult> samples, std::size_t n_banks,
                              std::size_t discarded = 0);

/// Best non-increasing least-squares fit (pool adjacent violators).
std::vector<double> isotonic_nonincreasing(std::span<const double> values);

/// Number of adjacent increases in a sequence that should be non-increasing.
std::size_t monotonicity_violations(std::span<const double> values);

enum class Arm { baseline, transferred };
std::string_view arm_name(Arm arm);

/// Severity F* over a grid of capital ratios for one arm of the experiment.
struct SeverityCurve {
    std::vector<double> gammas;
    std::vector<double> f_star;          ///< raw order statistics
    std::vector<double> f_star_isotonic; ///< after the non-increasing fit
    std::vector<double> mean_failures;
    std::vector<std::size_t> discarded;
    std::size_t samples = 0;
    double kappa = 0.0;
    double rho = 0.0;
    double leverage_f = 0.0;
    Arm arm = Arm::baseline;
};

/// Fills f_star_isotonic from f_star.
void finalize_curve(SeverityCurve& curve);

/// Systemic capital buffer ratio per grid point with regulatory ratios alongside.
struct BufferCurve {
    std::vector<double> gammas;
    std::vector<double> gamma_s;
    std::vector<bool> clamped;
    std::vector<double> t_prime;
    std::vector<double> l_prime;
    std::vector<bool> negative_impact;
    double leverage_f = 0.0;
    double theta = 0.0;
};

/// Capital ratio at which the baseline severity matches the transferred severity.
///
/// The baseline is the piecewise-linear interpolant of its isotonic F* values.
/// The preimage of a level under that interpolant is an interval [lo, hi]; the
/// result is gamma projected onto it, so identical curves map to the identity.
/// Levels above the baseline's range clamp to the first grid point, below it to
/// the last, with the clamp flag set. Throws NonInvertible for a flat baseline.
BufferCurve systemic_buffer_ratio(const SeverityCurve& baseline, const SeverityCurve& transferred,
                                  double theta);

/// Same inversion on bare arrays.
std::vector<double> invert_severity(std::span<const double> gammas, std::span<const double> baseline,
                                    std::span<const double> levels, std::vector<bool>* clamped = nullptr);

} // namespace contagion
