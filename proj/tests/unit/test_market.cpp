#include "contagion/errors.hpp"
#include "contagion/market.hpp"
#include "contagion/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace contagion;

namespace {

double t_pdf(double x, double nu) {
    const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * std::numbers::pi);
    return c * std::pow(1 + x * x / nu, -(nu + 1) / 2);
}

// P(|T| > x) by Simpson integration of the density over (0, x] after the substitution.
double t_two_sided_tail(double x, double nu) {
    const int n = 200000;
    const double h = x / n;
    double s = t_pdf(0, nu) + t_pdf(x, nu);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4 : 2) * t_pdf(i * h, nu);
    return 1.0 - 2.0 * s * h / 3.0;
}

} // namespace

TEST_CASE("tail oracle matches a reference value") {
    // independently computed with a statistics library
    CHECK(t_two_sided_tail(5.0, 1.5) == doctest::Approx(0.06537576762115624).epsilon(1e-6));
}

TEST_CASE("portfolios live on the simplex") {
    const auto one = draw_portfolio(50, 1, 3);
    for (double x : one.allocation)
        CHECK(x == 1.0);

    const auto p = draw_portfolio(100000, 2, 4);
    double mean = 0;
    for (std::size_t n = 0; n < p.n_banks; ++n) {
        REQUIRE(p.at(n, 0) + p.at(n, 1) == 1.0);
        REQUIRE(p.at(n, 0) >= 0.0);
        mean += p.at(n, 0);
    }
    CHECK(std::abs(mean / 100000.0 - 0.5) < 0.005);

    const auto q = draw_portfolio(1000, 5, 5);
    for (std::size_t n = 0; n < q.n_banks; ++n) {
        double s = 0;
        for (double x : q.row(n)) {
            REQUIRE(x >= 0.0);
            s += x;
        }
        REQUIRE(std::abs(s - 1.0) < 1e-12);
    }
}

TEST_CASE("shock draws") {
    CHECK_THROWS_AS(draw_shocks(1, 0.0, 1.5, 1), InvalidArgument);
    CHECK_THROWS_AS(draw_shocks(1, 1.0, 1.0, 1), InvalidArgument);

    const std::size_t n = 1000000;
    const double amp = 0.01;
    std::vector<double> v(n);
    std::size_t tail = 0, negative = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = draw_shocks(1, amp, 1.5, derive_seed(9, i, Stream::shocks)).returns[0];
        tail += std::abs(v[i] / amp) > 5.0;
        negative += i < 100000 && v[i] < 0;
    }
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    CHECK(std::abs(v[n / 2]) <= 0.002 * amp);
    CHECK(std::abs(double(negative) / 1e5 - 0.5) < 0.01);
    const double oracle = t_two_sided_tail(5.0, 1.5);
    CHECK(std::abs(double(tail) / double(n) - oracle) / oracle < 0.10);

    const auto a = draw_shocks(2, 0.3, 1.5, 42), b = draw_shocks(2, 0.3, 1.5, 42);
    CHECK(a.returns == b.returns);
}

TEST_CASE("initial distress") {
    Portfolio one{1, 1, {1.0}};
    CHECK(initial_distress(std::vector<double>{100}, one, ShockVector{{-0.1}, 1, 1.5})[0] ==
          doctest::Approx(10.0));
    CHECK(initial_distress(std::vector<double>{100}, one, ShockVector{{0.2}, 1, 1.5})[0] == 0.0);
    Portfolio two{1, 2, {0.5, 0.5}};
    CHECK(initial_distress(std::vector<double>{50}, two, ShockVector{{-0.2, 0.1}, 1, 1.5})[0] ==
          doctest::Approx(2.5));
    Portfolio pair{2, 2, {0.3, 0.7, 0.3, 0.7}};
    const auto d = initial_distress(std::vector<double>{1, 4}, pair, ShockVector{{-0.5, 0.05}, 1, 1.5});
    CHECK(d[0] >= 0.0);
    CHECK(d[1] == doctest::Approx(4 * d[0]));
}

TEST_CASE("calibration rejects an unreachable target") {
    CalibrationSettings s;
    s.gamma_ref = 0.0;
    s.trials = 100000;
    CHECK_THROWS_AS(calibrate_amplitude(s, 1), CalibrationDiverged);
}

TEST_CASE("calibration hits the target failure probability") {
    CalibrationSettings s;
    s.trials = 1000000;
    const auto r1 = calibrate_amplitude(s, 101);
    const auto r2 = calibrate_amplitude(s, 202);
    CHECK(r1.amplitude > 0.0);
    CHECK(std::abs(r1.amplitude - r2.amplitude) / r1.amplitude < 0.05);
    const double fresh = solo_failure_rate(r1.amplitude, 0.07, 2, 1.5, 1000000, 303);
    CHECK(std::abs(fresh - 1e-3) <= 2e-4);
    CHECK(solo_failure_rate(2 * r1.amplitude, 0.07, 2, 1.5, 1000000, 303) > fresh);
}
