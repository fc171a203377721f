// Command-line front end: calibrate, run, sweep, netgen.

#include "contagion/errors.hpp"
#include "contagion/harness.hpp"
#include "contagion/random.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace contagion;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kCalibrationFailure = 3, kSampleExhaustion = 4 };

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> workers;
    std::string out_dir = ".";
    std::optional<std::string> arm;
    std::optional<double> gamma, kappa, rho, f, theta, amplitude;
    std::optional<std::size_t> n_banks, sellers, calib_trials;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key=value configuration file");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--samples", o.samples, "Monte-Carlo samples per cell");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--arm", o.arm, "baseline or transferred")->check(CLI::IsMember({"baseline", "transferred"}));
    cmd->add_option("--gamma", o.gamma, "equity capital ratio");
    cmd->add_option("--kappa", o.kappa, "network denseness");
    cmd->add_option("--rho", o.rho, "loan concentration of the top 1% lenders");
    cmd->add_option("--f", o.f, "additional lending as a fraction of the insured book");
    cmd->add_option("--theta", o.theta, "interbank loan ratio");
    cmd->add_option("--n-banks", o.n_banks, "number of banks");
    cmd->add_option("--sellers", o.sellers, "number of protection sellers");
    cmd->add_option("--calib-trials", o.calib_trials, "standalone-bank trials for calibration");
    cmd->add_option("--amplitude", o.amplitude, "skip calibration and use this shock amplitude");
}

SystemConfig resolve(const CommonOptions& o) {
    SystemConfig c;
    if (!o.config_path.empty())
        c = load_config(o.config_path, c);
    if (o.seed) c.master_seed = *o.seed;
    if (o.samples) c.samples = *o.samples;
    if (o.workers) c.workers = *o.workers;
    if (o.arm) apply_setting(c, "arm", *o.arm);
    if (o.gamma) c.gamma = *o.gamma;
    if (o.kappa) c.kappa = *o.kappa;
    if (o.rho) c.rho = *o.rho;
    if (o.f) c.leverage_f = *o.f;
    if (o.theta) c.theta = *o.theta;
    if (o.n_banks) c.n_banks = *o.n_banks;
    if (o.sellers) c.s_sellers = *o.sellers;
    if (o.calib_trials) c.calib_trials = *o.calib_trials;
    for (const auto& w : validate(c))
        std::cerr << "warning: " << w << '\n';
    return c;
}

double amplitude_for(const SystemConfig& c, const CommonOptions& o) {
    if (o.amplitude)
        return *o.amplitude;
    const auto cal = calibrate_amplitude(calibration_settings(c),
                                         derive_seed(c.master_seed, 0, Stream::calibration));
    std::cerr << "calibrated amplitude " << format_number(cal.amplitude) << " (solo failure rate "
              << format_number(cal.failure_probability) << " over " << cal.trials << " trials)\n";
    return cal.amplitude;
}

int cmd_calibrate(const CommonOptions& o) {
    const SystemConfig c = resolve(o);
    const auto cal = calibrate_amplitude(calibration_settings(c),
                                         derive_seed(c.master_seed, 0, Stream::calibration));
    const double check = solo_failure_rate(cal.amplitude, c.calib_gamma, c.m_assets, c.dof, c.calib_trials,
                                           derive_seed(c.master_seed, 1, Stream::calibration));
    std::cout << "amplitude=" << format_number(cal.amplitude) << '\n'
              << "in_sample_failure_rate=" << format_number(cal.failure_probability) << '\n'
              << "fresh_failure_rate=" << format_number(check) << '\n'
              << "trials=" << cal.trials << '\n'
              << "iterations=" << cal.iterations << '\n';
    return kOk;
}

int cmd_run(const CommonOptions& o) {
    const SystemConfig c = resolve(o);
    const double amplitude = amplitude_for(c, o);
    const DistributionSummary s = run_cell(c, amplitude);
    const fs::path out = fs::path(o.out_dir) / "distribution.csv";
    write_distribution_csv(s, out);
    std::cout << describe(c) << '\n'
              << "f_star=" << s.f_star << " f_star_fraction=" << format_number(double(s.f_star) / double(c.n_banks))
              << " mean_F=" << format_number(s.mean_failures) << " discarded=" << s.discarded_samples << '\n'
              << "wrote " << out.string() << '\n';
    if (s.low_sample_warning)
        std::cerr << "warning: fewer than 1000 samples\n";
    return kOk;
}

int cmd_sweep(const CommonOptions& o) {
    const SystemConfig c = resolve(o);
    const double amplitude = amplitude_for(c, o);
    const SweepResult r = run_sweep(c, amplitude);
    const fs::path dir(o.out_dir);
    write_severity_csv(r, dir / "severity.csv");
    write_buffer_csv(r, dir / "buffer.csv");
    write_manifest(c, r, dir / "manifest.json");
    std::cout << describe(c) << '\n';
    std::cout << "gamma   F*_base";
    for (const auto& t : r.transferred)
        std::cout << "  F*(f=" << format_number(t.leverage_f) << ")";
    std::cout << '\n';
    for (std::size_t i = 0; i < r.baseline.gammas.size(); ++i) {
        std::cout << format_number(r.baseline.gammas[i]) << "    " << r.baseline.f_star[i];
        for (const auto& t : r.transferred)
            std::cout << "  " << t.f_star[i];
        std::cout << '\n';
    }
    for (const auto& b : r.buffers) {
        std::cout << "f=" << format_number(b.leverage_f) << " gamma_s:";
        for (double g : b.gamma_s)
            std::cout << ' ' << format_number(g);
        std::cout << '\n';
    }
    if (r.discard_rate > 0.01)
        std::cerr << "warning: discard rate " << format_number(r.discard_rate) << '\n';
    std::cout << "wrote " << (dir / "severity.csv").string() << ", " << (dir / "buffer.csv").string() << ", "
              << (dir / "manifest.json").string() << '\n';
    return kOk;
}

int cmd_netgen(const CommonOptions& o, const std::string& file) {
    const SystemConfig c = resolve(o);
    const Topology topology = generate_topology(c.n_banks, c.kappa,
                                                derive_seed(c.master_seed, 0, Stream::topology),
                                                {c.attractiveness_ratio});
    const WeightedNetwork net = tune_concentration(topology, c.rho, c.theta * double(c.n_banks));
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!file.empty()) {
        const fs::path path = fs::path(o.out_dir) / file;
        fs::create_directories(path.parent_path());
        file_out.open(path);
        out = &file_out;
    }
    *out << "# N=" << c.n_banks << " E=" << topology.edge_count()
         << " kappa=" << format_number(measure_denseness(topology))
         << " rho=" << format_number(measure_concentration(net)) << '\n';
    auto edges = topology.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        *out << edges[i].creditor << ',' << edges[i].debtor << ',' << format_number(net.weights[i]) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo contagion in interbank networks with credit default swaps"};
    app.require_subcommand(1);
    CommonOptions opts;
    std::string netgen_file;

    auto* calibrate = app.add_subcommand("calibrate", "calibrate the shock amplitude");
    auto* run = app.add_subcommand("run", "single cell: failure distribution");
    auto* sweep = app.add_subcommand("sweep", "severity and buffer curves over the gamma grid");
    auto* netgen = app.add_subcommand("netgen", "dump one generated network as an edge list");
    for (auto* cmd : {calibrate, run, sweep, netgen})
        add_common(cmd, opts);
    netgen->add_option("--file", netgen_file, "write to <out>/<file> instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*calibrate) return cmd_calibrate(opts);
        if (*run) return cmd_run(opts);
        if (*sweep) return cmd_sweep(opts);
        if (*netgen) return cmd_netgen(opts, netgen_file);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const CalibrationDiverged& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kCalibrationFailure;
    } catch (const SampleExhausted& e) {
        std::cerr << "sample exhaustion: " << e.what() << '\n';
        return kSampleExhaustion;
    } catch (const Unreachable& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        // e.g. a flat baseline curve that cannot be inverted
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
