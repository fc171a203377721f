#include "contagion/errors.hpp"
#include "contagion/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace contagion;

namespace {

// Calibrated amplitude for the default market settings.
constexpr double kAmplitude = 0.001554412152;

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("contagion_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("settings and config files") {
    SystemConfig c;
    apply_setting(c, "n-banks", "200");
    apply_setting(c, "sellers", " 5 ");
    apply_setting(c, "f", "0.4");
    apply_setting(c, "arm", "transferred");
    apply_setting(c, "gamma_grid", "0.05,0.07,0.09");
    CHECK(c.n_banks == 200);
    CHECK(c.s_sellers == 5);
    CHECK(c.leverage_f == 0.4);
    CHECK(c.arm == Arm::transferred);
    CHECK(c.gamma_grid == std::vector<double>{0.05, 0.07, 0.09});
    CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "gamma", "abc"), ConfigError);

    const auto dir = scratch("config");
    {
        std::ofstream out(dir / "a.cfg");
        out << "# comment\n\nkappa = 0.03\nrho=0.4\nseed=7\n";
    }
    const auto loaded = load_config(dir / "a.cfg");
    CHECK(loaded.kappa == 0.03);
    CHECK(loaded.rho == 0.4);
    CHECK(loaded.master_seed == 7);
    {
        std::ofstream out(dir / "b.cfg");
        out << "kappa\n";
    }
    CHECK_THROWS_AS(load_config(dir / "b.cfg"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("validation") {
    SystemConfig c;
    CHECK(validate(c).empty());
    c.gamma = 1.5;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    c.s_sellers = 501;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    c.gamma_grid = {0.05, 0.05};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = {};
    c.rho = 0.7;
    CHECK(validate(c).size() == 1);
}

TEST_CASE("without shocks nothing fails") {
    SystemConfig c;
    c.shocks_enabled = false;
    c.samples = 20;
    c.workers = workers();
    for (Arm arm : {Arm::baseline, Arm::transferred}) {
        c.arm = arm;
        c.leverage_f = 1.0;
        const auto s = run_cell(c, kAmplitude);
        CHECK(s.f_star == 0);
        CHECK(s.mean_failures == 0.0);
    }
}

TEST_CASE("f = 0 without insurance reproduces the baseline sample by sample") {
    SystemConfig c;
    c.samples = 200;
    c.workers = workers();
    c.gamma = 0.06;
    // larger shocks so that the comparison sees cascades
    const double amplitude = 20 * kAmplitude;
    std::vector<CascadeResult> base, rt;
    run_cell(c, amplitude, &base);
    c.arm = Arm::transferred;
    c.leverage_f = 0.0;
    c.protection_enabled = false;
    run_cell(c, amplitude, &rt);
    CHECK(base == rt);
    std::size_t failures = 0;
    for (const auto& r : base)
        failures += r.failures;
    CHECK(failures > 0);
}

TEST_CASE("samples draw from isolated streams") {
    SystemConfig c;
    const auto w5 = draw_world(c, 5, kAmplitude);
    draw_world(c, 6, kAmplitude);
    const auto again = draw_world(c, 5, kAmplitude);
    CHECK(w5.network.topology == again.network.topology);
    CHECK(w5.network.weights == again.network.weights);
    CHECK(w5.portfolio.allocation == again.portfolio.allocation);
    CHECK(w5.shocks->returns == again.shocks->returns);
    CHECK(w5.protection.seller_of_edge == again.protection.seller_of_edge);
    const auto w6 = draw_world(c, 6, kAmplitude);
    CHECK_FALSE(w5.network.topology == w6.network.topology);
    CHECK(w5.shocks->returns != w6.shocks->returns);

    SystemConfig serial = c;
    serial.samples = 30;
    SystemConfig parallel = serial;
    parallel.workers = 4;
    std::vector<CascadeResult> a, b;
    run_cell(serial, kAmplitude, &a);
    run_cell(parallel, kAmplitude, &b);
    CHECK(a == b);
}

TEST_CASE("severity decreases with capital") {
    SystemConfig c;
    c.samples = 2000;
    c.workers = workers();
    const std::vector<double> grid{0.06, 0.12};
    const auto curve = severity_curve(c, grid, false, kAmplitude);
    CHECK(curve.f_star[0] > curve.f_star[1]);
}

TEST_CASE("sweep outputs are reproducible byte for byte") {
    SystemConfig c;
    c.n_banks = 200;
    c.samples = 100;
    c.workers = workers();
    c.gamma_grid = {0.05, 0.08, 0.11, 0.14};
    c.f_set = {0.0, 1.0};
    const auto dir = scratch("sweep");
    for (int run = 0; run < 2; ++run) {
        const auto r = run_sweep(c, kAmplitude);
        write_severity_csv(r, dir / ("severity" + std::to_string(run) + ".csv"));
        write_buffer_csv(r, dir / ("buffer" + std::to_string(run) + ".csv"));
        write_manifest(c, r, dir / ("manifest" + std::to_string(run) + ".json"));
    }
    const auto sev = slurp(dir / "severity0.csv");
    CHECK(sev.rfind("gamma,f,kappa,rho,arm,f_star,mean_F,samples,discarded\n", 0) == 0);
    CHECK(sev == slurp(dir / "severity1.csv"));
    const auto buf = slurp(dir / "buffer0.csv");
    CHECK(buf.rfind("gamma,f,gamma_s,clamped,t_prime,l_prime,negative_impact\n", 0) == 0);
    CHECK(buf == slurp(dir / "buffer1.csv"));
    // 4 baseline rows + 2 arms x 4 rows
    CHECK(std::count(sev.begin(), sev.end(), '\n') == 1 + 4 + 8);
    CHECK(std::count(buf.begin(), buf.end(), '\n') == 1 + 8);
}
