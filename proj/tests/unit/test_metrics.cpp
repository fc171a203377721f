#include "contagion/balance.hpp"
#include "contagion/errors.hpp"
#include "contagion/metrics.hpp"
#include "contagion/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace contagion;

namespace {

const std::vector<double> kGrid{0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.12, 0.13, 0.14};

SeverityCurve curve(std::vector<double> gammas, std::vector<double> f_star, Arm arm, double f = 0) {
    SeverityCurve c;
    c.gammas = std::move(gammas);
    c.f_star = std::move(f_star);
    c.arm = arm;
    c.leverage_f = f;
    finalize_curve(c);
    return c;
}

} // namespace

TEST_CASE("order statistic quantile") {
    std::vector<std::size_t> v(1000);
    std::iota(v.begin(), v.end(), 0);
    std::reverse(v.begin(), v.end());
    CHECK(order_statistic_quantile(v, 0.999) == 998);
    CHECK(order_statistic_quantile(std::vector<std::size_t>(50, 7), 0.999) == 7);
    CHECK(order_statistic_quantile(std::vector<std::size_t>{3}, 0.999) == 3);
    CHECK_THROWS(order_statistic_quantile(std::vector<std::size_t>{}, 0.999));
}

TEST_CASE("distribution summary") {
    std::vector<std::size_t> v(1000);
    std::iota(v.begin(), v.end(), 0);
    const auto s = summarize(v, 1000, 4);
    CHECK(s.sample_count == 1000);
    CHECK(s.f_star == 998);
    CHECK(s.mean_failures == doctest::Approx(499.5));
    CHECK(s.discarded_samples == 4);
    CHECK_FALSE(s.low_sample_warning);
    CHECK(s.histogram.size() == 1001);
    CHECK(std::accumulate(s.histogram.begin(), s.histogram.end(), std::size_t{0}) == 1000);
    CHECK(summarize(std::vector<std::size_t>(10, 1), 5).low_sample_warning);
}

TEST_CASE("isotonic fit") {
    CHECK(isotonic_nonincreasing(std::vector<double>{5, 4, 3}) == std::vector<double>{5, 4, 3});
    CHECK(isotonic_nonincreasing(std::vector<double>{1, 3}) == std::vector<double>{2, 2});
    CHECK(isotonic_nonincreasing(std::vector<double>{10, 2, 4, 0}) == std::vector<double>{10, 3, 3, 0});
    CHECK(monotonicity_violations(std::vector<double>{10, 2, 4, 0, 1}) == 2);
    RandomStream rng(5);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> v(11);
        for (auto& x : v)
            x = rng.uniform();
        const auto fit = isotonic_nonincreasing(v);
        CHECK(monotonicity_violations(fit) == 0);
        CHECK(std::accumulate(fit.begin(), fit.end(), 0.0) == doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0)));
    }
}

TEST_CASE("inversion of identical curves is the identity") {
    RandomStream rng(17);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> f(kGrid.size());
        for (auto& x : f)
            x = std::floor(rng.uniform() * 500);
        // include flat stretches
        if (k % 3 == 0)
            f[4] = f[5] = f[6];
        std::sort(f.begin(), f.end(), std::greater<>());
        if (f.front() == f.back())
            f.front() += 1;
        const auto base = curve(kGrid, f, Arm::baseline);
        const auto rt = curve(kGrid, f, Arm::transferred);
        const auto buf = systemic_buffer_ratio(base, rt, 0.3);
        for (std::size_t i = 0; i < kGrid.size(); ++i) {
            REQUIRE(buf.gamma_s[i] == kGrid[i]);
            REQUIRE_FALSE(buf.clamped[i]);
        }
    }
}

TEST_CASE("inversion by linear interpolation") {
    const std::vector<double> g{0.05, 0.09, 0.13};
    const auto base = curve(g, {100, 50, 0}, Arm::baseline);
    const auto rt = curve(g, {100, 75, 0}, Arm::transferred, 0.4);
    const auto buf = systemic_buffer_ratio(base, rt, 0.3);
    CHECK(buf.gamma_s[1] == doctest::Approx(0.07).epsilon(1e-12));
    CHECK(buf.gamma_s[0] == doctest::Approx(0.05));
    CHECK(buf.gamma_s[2] == doctest::Approx(0.13));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(buf.l_prime[i] == doctest::Approx(leverage_ratio(g[i], 0.3, 0.4)));
        CHECK(std::abs(buf.t_prime[i] / buf.l_prime[i] - (1 + 0.4 * 0.3) / (1 - 0.3 + 0.4 * 0.3)) < 1e-12);
        CHECK(buf.negative_impact[i] == (buf.gamma_s[i] < g[i]));
    }
    CHECK(buf.negative_impact[1]);
}

TEST_CASE("clamping and degenerate baselines") {
    const std::vector<double> g{0.05, 0.09, 0.13};
    const auto base = curve(g, {80, 50, 10}, Arm::baseline);
    std::vector<bool> clamped;
    auto gs = invert_severity(g, base.f_star_isotonic, std::vector<double>{90, 50, 5}, &clamped);
    CHECK(clamped == std::vector<bool>{true, false, true});
    CHECK(gs == std::vector<double>{0.05, 0.09, 0.13});
    gs = invert_severity(g, base.f_star_isotonic, std::vector<double>{80, 10, 10}, &clamped);
    CHECK(clamped == std::vector<bool>{false, false, false});
    CHECK(gs == std::vector<double>{0.05, 0.13, 0.13});
    const auto flat = curve(g, {7, 7, 7}, Arm::baseline);
    CHECK_THROWS_AS(systemic_buffer_ratio(flat, base, 0.3), NonInvertible);
}

TEST_CASE("buffer ratio is monotone for strictly decreasing curves") {
    RandomStream rng(23);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> a(kGrid.size()), b(kGrid.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng.uniform() * 500;
            b[i] = rng.uniform() * 500;
        }
        std::sort(a.begin(), a.end(), std::greater<>());
        std::sort(b.begin(), b.end(), std::greater<>());
        const auto buf = systemic_buffer_ratio(curve(kGrid, a, Arm::baseline), curve(kGrid, b, Arm::transferred), 0.3);
        for (std::size_t i = 1; i < kGrid.size(); ++i)
            REQUIRE(buf.gamma_s[i] >= buf.gamma_s[i - 1]);
    }
}
