#include "contagion/metrics.hpp"

#include "contagion/balance.hpp"
#include "contagion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace contagion {

std::size_t order_statistic_quantile(std::span<const std::size_t> values, double q) {
    if (values.empty())
        throw InvalidArgument("quantile of an empty sample");
    std::vector<std::size_t> sorted(values.begin(), values.end());
    // guard against q * n landing a hair above an integer
    const double pos = std::ceil(q * static_cast<double>(sorted.size()) - 1e-9);
    std::size_t k = static_cast<std::size_t>(std::max(pos, 1.0));
    k = std::min(k, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

DistributionSummary summarize(std::span<const std::size_t> failures, std::size_t n_banks,
                              std::size_t discarded) {
    if (failures.empty())
        throw InvalidArgument("summarize needs at least one sample");
    DistributionSummary s;
    s.sample_count = failures.size();
    s.histogram.assign(n_banks + 1, 0);
    double total = 0.0;
    for (std::size_t f : failures) {
        if (f > n_banks)
            throw InvalidArgument("failure count exceeds the number of banks");
        ++s.histogram[f];
        total += static_cast<double>(f);
    }
    s.mean_failures = total / static_cast<double>(failures.size());
    s.f_star = order_statistic_quantile(failures, kSeverityQuantile);
    s.discarded_samples = discarded;
    s.low_sample_warning = failures.size() < 1000;
    return s;
}

DistributionSummary summarize(std::span<const CascadeResult> samples, std::size_t n_banks,
                              std::size_t discarded) {
    std::vector<std::size_t> f(samples.size());
    std::transform(samples.begin(), samples.end(), f.begin(),
                   [](const CascadeResult& r) { return r.failures; });
    return summarize(f, n_banks, discarded);
}

std::vector<double> isotonic_nonincreasing(std::span<const double> values) {
    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks)
        out.insert(out.end(), b.count, b.mean());
    return out;
}

std::size_t monotonicity_violations(std::span<const double> values) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1])
            ++n;
    return n;
}

std::string_view arm_name(Arm arm) { return arm == Arm::baseline ? "baseline" : "transferred"; }

void finalize_curve(SeverityCurve& curve) { curve.f_star_isotonic = isotonic_nonincreasing(curve.f_star); }

std::vector<double> invert_severity(std::span<const double> gammas, std::span<const double> baseline,
                                    std::span<const double> levels, std::vector<bool>* clamped) {
    const std::size_t n = gammas.size();
    if (n < 2 || baseline.size() != n || levels.size() != n)
        throw DimensionMismatch("invert_severity: grid and curves disagree");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(gammas[i] > gammas[i - 1]))
            throw InvalidArgument("gamma grid must be strictly increasing");
        if (baseline[i] > baseline[i - 1])
            throw InvalidArgument("baseline severity must be non-increasing");
    }
    if (baseline.front() == baseline.back())
        throw NonInvertible("baseline severity is constant over the whole grid");

    // Point where the interpolant on [g_i, g_{i+1}] reaches `level` (strict segment).
    auto crossing = [&](std::size_t i, double level) {
        const double t = (baseline[i] - level) / (baseline[i] - baseline[i + 1]);
        return gammas[i] + t * (gammas[i + 1] - gammas[i]);
    };

    std::vector<double> out(n);
    if (clamped)
        clamped->assign(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const double level = levels[j];
        if (level > baseline.front()) {
            out[j] = gammas.front();
            if (clamped)
                (*clamped)[j] = true;
            continue;
        }
        if (level < baseline.back()) {
            out[j] = gammas.back();
            if (clamped)
                (*clamped)[j] = true;
            continue;
        }
        // preimage [lo, hi] of `level`
        double lo = gammas.back();
        double hi = gammas.front();
        for (std::size_t i = 0; i < n; ++i)
            if (baseline[i] == level) {
                lo = std::min(lo, gammas[i]);
                hi = std::max(hi, gammas[i]);
            }
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (baseline[i] > level && level > baseline[i + 1]) {
                const double g = crossing(i, level);
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
        out[j] = std::clamp(gammas[j], lo, hi);
    }
    return out;
}

BufferCurve systemic_buffer_ratio(const SeverityCurve& baseline, const SeverityCurve& transferred,
                                  double theta) {
    if (baseline.gammas != transferred.gammas)
        throw DimensionMismatch("severity curves are on different gamma grids");
    const auto& base = baseline.f_star_isotonic.empty() ? isotonic_nonincreasing(baseline.f_star)
                                                        : baseline.f_star_isotonic;
    BufferCurve b;
    b.gammas = baseline.gammas;
    b.leverage_f = transferred.leverage_f;
    b.theta = theta;
    b.gamma_s = invert_severity(b.gammas, base, transferred.f_star, &b.clamped);
    for (std::size_t i = 0; i < b.gammas.size(); ++i) {
        b.t_prime.push_back(core_tier1_ratio(b.gammas[i], theta, b.leverage_f));
        b.l_prime.push_back(leverage_ratio(b.gammas[i], theta, b.leverage_f));
        b.negative_impact.push_back(b.gamma_s[i] < b.gammas[i]);
    }
    return b;
}

} // namespace contagion
