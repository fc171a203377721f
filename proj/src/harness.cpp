#include "contagion/harness.hpp"

#include "contagion/errors.hpp"
#include "contagion/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace contagion {

const char* const kVersion = "0.1.0";

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] == '-')
            throw std::invalid_argument(value);
        const auto x = std::stoull(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad count for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError("bad flag for " + key + ": '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, trim(item)));
    if (out.empty())
        throw ConfigError("empty list for " + key);
    return out;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads; rethrows the
// first exception by index order of discovery.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// Every bank must hold at least as much as it owes to other banks. Negative
// deposits are tolerated: deposits take no part in default propagation.
bool feasible(const WeightedNetwork& network, double theta) {
    const BalanceSheetSet s = compute_balance_sheets(network, theta, 0.5);
    for (std::size_t n = 0; n < s.size(); ++n)
        if (s.assets(n) < s.borrowings[n] * (1.0 - 1e-12))
            return false;
    return true;
}

// Failure counts for one sample across all (gamma, arm) cells.
struct CellPlan {
    std::vector<double> gammas;
    bool baseline = true;
    std::vector<double> fs; ///< transferred arms
    std::size_t arms() const { return (baseline ? 1 : 0) + fs.size(); }
};

std::vector<std::size_t> evaluate_sample(const SystemConfig& config, const SampleWorld& world,
                                         const CellPlan& plan) {
    std::vector<std::size_t> out;
    out.reserve(plan.gammas.size() * plan.arms());
    std::vector<double> distress;
    for (double gamma : plan.gammas) {
        const BalanceSheetSet sheets = compute_balance_sheets(world.network, config.theta, gamma);
        if (distress.empty()) {
            distress = world.shocks ? initial_distress(sheets.external, world.portfolio, *world.shocks)
                                    : std::vector<double>(sheets.size(), 0.0);
        }
        if (plan.baseline)
            out.push_back(run_cascade(world.network, sheets, distress).failures);
        for (double f : plan.fs) {
            const TransferredSystem system = compute_risk_transfer(sheets, world.network, f, config.capital_allocation);
            const ProtectionPattern* protection = config.protection_enabled ? &world.protection : nullptr;
            out.push_back(run_cascade(world.network, system, protection, distress).failures);
        }
    }
    return out;
}

struct PlanOutcome {
    std::vector<std::vector<std::size_t>> failures; ///< [cell][sample]
    std::size_t discarded = 0;
};

PlanOutcome evaluate_plan(const SystemConfig& config, const CellPlan& plan, double amplitude) {
    const std::size_t cells = plan.gammas.size() * plan.arms();
    std::vector<std::vector<std::size_t>> per_sample(config.samples);
    std::vector<std::size_t> attempts(config.samples, 0);
    parallel_for(config.samples, config.workers, [&](std::size_t i) {
        const SampleWorld world = draw_world(config, i, amplitude);
        attempts[i] = world.attempts;
        per_sample[i] = evaluate_sample(config, world, plan);
    });

    PlanOutcome out;
    out.failures.assign(cells, std::vector<std::size_t>(config.samples));
    for (std::size_t i = 0; i < config.samples; ++i) {
        out.discarded += attempts[i] - 1;
        for (std::size_t c = 0; c < cells; ++c)
            out.failures[c][i] = per_sample[i][c];
    }
    return out;
}

SeverityCurve curve_from(const SystemConfig& config, const PlanOutcome& outcome, const CellPlan& plan,
                         std::size_t arm_slot, Arm arm, double f) {
    SeverityCurve curve;
    curve.gammas = plan.gammas;
    curve.samples = config.samples;
    curve.kappa = config.kappa;
    curve.rho = config.rho;
    curve.leverage_f = f;
    curve.arm = arm;
    for (std::size_t g = 0; g < plan.gammas.size(); ++g) {
        const auto& failures = outcome.failures[g * plan.arms() + arm_slot];
        const DistributionSummary s = summarize(failures, config.n_banks, outcome.discarded);
        curve.f_star.push_back(static_cast<double>(s.f_star));
        curve.mean_failures.push_back(s.mean_failures);
        curve.discarded.push_back(outcome.discarded);
    }
    finalize_curve(curve);
    return curve;
}

} // namespace

std::vector<std::string> validate(const SystemConfig& c) {
    if (c.n_banks < 3)
        throw ConfigError("n_banks must be at least 3");
    if (c.m_assets < 1)
        throw ConfigError("m_assets must be at least 1");
    if (c.s_sellers < 1 || c.s_sellers > c.n_banks)
        throw ConfigError("s_sellers must lie in [1, n_banks]");
    if (!(c.theta > 0.0 && c.theta < 1.0))
        throw ConfigError("theta must lie in (0, 1)");
    if (!(c.gamma > 0.0 && c.gamma < 1.0))
        throw ConfigError("gamma must lie in (0, 1)");
    if (!(c.kappa > 0.0 && c.kappa <= 1.0))
        throw ConfigError("kappa must lie in (0, 1]");
    if (!(c.rho > 0.0 && c.rho < 1.0))
        throw ConfigError("rho must lie in (0, 1)");
    if (!(c.leverage_f >= 0.0))
        throw ConfigError("f must be non-negative");
    if (!(c.dof > 1.0))
        throw ConfigError("dof must exceed 1");
    if (c.samples < 1)
        throw ConfigError("samples must be positive");
    if (!(c.calib_gamma >= 0.0 && c.calib_gamma < 1.0))
        throw ConfigError("calib_gamma must lie in [0, 1)");
    if (!(c.calib_p > 0.0 && c.calib_p < 1.0))
        throw ConfigError("calib_p must lie in (0, 1)");
    if (c.calib_trials < 1)
        throw ConfigError("calib_trials must be positive");
    if (c.gamma_grid.size() < 2)
        throw ConfigError("gamma_grid needs at least two points");
    for (std::size_t i = 0; i < c.gamma_grid.size(); ++i) {
        if (!(c.gamma_grid[i] > 0.0 && c.gamma_grid[i] < 1.0))
            throw ConfigError("gamma_grid values must lie in (0, 1)");
        if (i > 0 && !(c.gamma_grid[i] > c.gamma_grid[i - 1]))
            throw ConfigError("gamma_grid must be strictly increasing");
    }
    for (double f : c.f_set)
        if (!(f >= 0.0))
            throw ConfigError("f_set values must be non-negative");

    std::vector<std::string> warnings;
    auto check = [&](const char* name, double x, double lo, double hi) {
        if (x < lo || x > hi)
            warnings.push_back(std::string(name) + "=" + format_number(x) + " is outside the studied range [" +
                               format_number(lo) + ", " + format_number(hi) + "]");
    };
    check("gamma", c.gamma, 0.04, 0.14);
    for (double g : c.gamma_grid)
        check("gamma_grid", g, 0.04, 0.14);
    check("kappa", c.kappa, 0.01, 0.1);
    check("rho", c.rho, 0.1, 0.5);
    check("f", c.leverage_f, 0.0, 1.0);
    for (double f : c.f_set)
        check("f_set", f, 0.0, 1.0);
    if (c.samples < 1000)
        warnings.push_back("fewer than 1000 samples: the 99.9th percentile is a sample maximum");
    return warnings;
}

void apply_setting(SystemConfig& c, const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(raw_value);
    if (key == "n_banks") c.n_banks = parse_uint(key, value);
    else if (key == "m_assets") c.m_assets = parse_uint(key, value);
    else if (key == "s_sellers" || key == "sellers") c.s_sellers = parse_uint(key, value);
    else if (key == "theta") c.theta = parse_double(key, value);
    else if (key == "gamma") c.gamma = parse_double(key, value);
    else if (key == "kappa") c.kappa = parse_double(key, value);
    else if (key == "rho") c.rho = parse_double(key, value);
    else if (key == "leverage_f" || key == "f") c.leverage_f = parse_double(key, value);
    else if (key == "dof") c.dof = parse_double(key, value);
    else if (key == "calib_gamma") c.calib_gamma = parse_double(key, value);
    else if (key == "calib_p") c.calib_p = parse_double(key, value);
    else if (key == "calib_trials") c.calib_trials = parse_uint(key, value);
    else if (key == "samples") c.samples = parse_uint(key, value);
    else if (key == "master_seed" || key == "seed") c.master_seed = parse_uint(key, value);
    else if (key == "gamma_grid") c.gamma_grid = parse_list(key, value);
    else if (key == "f_set") c.f_set = parse_list(key, value);
    else if (key == "workers") c.workers = parse_uint(key, value);
    else if (key == "attractiveness_ratio") c.attractiveness_ratio = parse_double(key, value);
    else if (key == "protection_enabled") c.protection_enabled = parse_bool(key, value);
    else if (key == "shocks_enabled") c.shocks_enabled = parse_bool(key, value);
    else if (key == "capital_allocation") {
        if (value == "frozen") c.capital_allocation = CapitalAllocation::frozen;
        else if (value == "uniform_ratio") c.capital_allocation = CapitalAllocation::uniform_ratio;
        else throw ConfigError("capital_allocation must be frozen or uniform_ratio");
    }
    else if (key == "arm") {
        if (value == "baseline") c.arm = Arm::baseline;
        else if (value == "transferred") c.arm = Arm::transferred;
        else throw ConfigError("arm must be baseline or transferred");
    } else
        throw ConfigError("unknown configuration key '" + key + "'");
}

SystemConfig load_config(const std::filesystem::path& path, SystemConfig base) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

CalibrationSettings calibration_settings(const SystemConfig& c) {
    CalibrationSettings s;
    s.gamma_ref = c.calib_gamma;
    s.target_p = c.calib_p;
    s.m_assets = c.m_assets;
    s.dof = c.dof;
    s.trials = c.calib_trials;
    return s;
}

SampleWorld draw_world(const SystemConfig& config, std::uint64_t sample_index, double amplitude) {
    const double total_loans = config.theta * static_cast<double>(config.n_banks);
    for (std::size_t attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        auto seed = [&](Stream s) { return derive_seed(config.master_seed, sample_index, s, attempt); };
        const Topology topology = generate_topology(config.n_banks, config.kappa, seed(Stream::topology),
                                                    {config.attractiveness_ratio});
        WeightedNetwork network = tune_concentration(topology, config.rho, total_loans);
        if (!feasible(network, config.theta))
            continue;

        SampleWorld w;
        w.attempts = attempt + 1;
        w.portfolio = draw_portfolio(config.n_banks, config.m_assets, seed(Stream::portfolio));
        if (config.shocks_enabled)
            w.shocks = draw_shocks(config.m_assets, amplitude, config.dof, seed(Stream::shocks));
        // sellers ranked on the pre-transfer sheet; assets do not depend on gamma
        const BalanceSheetSet sheets = compute_balance_sheets(network, config.theta, config.gamma);
        w.sellers = select_sellers(sheets, config.s_sellers);
        w.protection = assign_protection(network, w.sellers, seed(Stream::protection));
        w.network = std::move(network);
        return w;
    }
    throw SampleExhausted("sample " + std::to_string(sample_index) + ": no feasible balance sheets after " +
                          std::to_string(kMaxSampleAttempts) + " draws");
}

namespace {

struct SampleOutcome {
    CascadeResult result;
    std::size_t attempts = 1;
};

SampleOutcome sample_outcome(const SystemConfig& config, std::uint64_t sample_index, double amplitude) {
    const SampleWorld world = draw_world(config, sample_index, amplitude);
    const BalanceSheetSet sheets = compute_balance_sheets(world.network, config.theta, config.gamma);
    const auto distress = world.shocks ? initial_distress(sheets.external, world.portfolio, *world.shocks)
                                       : std::vector<double>(sheets.size(), 0.0);
    if (config.arm == Arm::baseline)
        return {run_cascade(world.network, sheets, distress), world.attempts};
    const TransferredSystem system = compute_risk_transfer(sheets, world.network, config.leverage_f, config.capital_allocation);
    return {run_cascade(world.network, system, config.protection_enabled ? &world.protection : nullptr,
                        distress),
            world.attempts};
}

} // namespace

CascadeResult run_sample(const SystemConfig& config, std::uint64_t sample_index, double amplitude) {
    return sample_outcome(config, sample_index, amplitude).result;
}

DistributionSummary run_cell(const SystemConfig& config, double amplitude, std::vector<CascadeResult>* results) {
    std::vector<SampleOutcome> out(config.samples);
    parallel_for(config.samples, config.workers,
                 [&](std::size_t i) { out[i] = sample_outcome(config, i, amplitude); });
    std::vector<CascadeResult> cascades;
    cascades.reserve(out.size());
    std::size_t discarded = 0;
    for (auto& o : out) {
        discarded += o.attempts - 1;
        cascades.push_back(std::move(o.result));
    }
    DistributionSummary s = summarize(std::span<const CascadeResult>(cascades), config.n_banks, discarded);
    if (results)
        *results = std::move(cascades);
    return s;
}

SeverityCurve severity_curve(const SystemConfig& config, std::span<const double> gamma_grid, bool with_transfer,
                             double amplitude) {
    CellPlan plan;
    plan.gammas.assign(gamma_grid.begin(), gamma_grid.end());
    plan.baseline = !with_transfer;
    if (with_transfer)
        plan.fs = {config.leverage_f};
    SystemConfig c = config;
    c.gamma_grid = plan.gammas;
    const PlanOutcome outcome = evaluate_plan(c, plan, amplitude);
    return curve_from(c, outcome, plan, 0, with_transfer ? Arm::transferred : Arm::baseline,
                      with_transfer ? config.leverage_f : 0.0);
}

SweepResult run_sweep(const SystemConfig& config, double amplitude) {
    validate(config);
    CellPlan plan;
    plan.gammas = config.gamma_grid;
    plan.baseline = true;
    plan.fs = config.f_set;
    const PlanOutcome outcome = evaluate_plan(config, plan, amplitude);

    SweepResult r;
    r.amplitude = amplitude;
    r.discarded = outcome.discarded;
    r.discard_rate = static_cast<double>(outcome.discarded) /
                     static_cast<double>(outcome.discarded + config.samples);
    r.baseline = curve_from(config, outcome, plan, 0, Arm::baseline, 0.0);
    for (std::size_t k = 0; k < config.f_set.size(); ++k) {
        r.transferred.push_back(curve_from(config, outcome, plan, k + 1, Arm::transferred, config.f_set[k]));
        r.buffers.push_back(systemic_buffer_ratio(r.baseline, r.transferred.back(), config.theta));
    }
    return r;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

namespace {

void write_curve_rows(std::ostream& out, const SeverityCurve& c) {
    for (std::size_t i = 0; i < c.gammas.size(); ++i)
        out << format_number(c.gammas[i]) << ',' << format_number(c.leverage_f) << ','
            << format_number(c.kappa) << ',' << format_number(c.rho) << ',' << arm_name(c.arm) << ','
            << format_number(c.f_star[i]) << ',' << format_number(c.mean_failures[i]) << ',' << c.samples
            << ',' << c.discarded[i] << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

} // namespace

void write_severity_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "gamma,f,kappa,rho,arm,f_star,mean_F,samples,discarded\n";
    write_curve_rows(out, sweep.baseline);
    for (const auto& c : sweep.transferred)
        write_curve_rows(out, c);
}

void write_buffer_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "gamma,f,gamma_s,clamped,t_prime,l_prime,negative_impact\n";
    for (const auto& b : sweep.buffers)
        for (std::size_t i = 0; i < b.gammas.size(); ++i)
            out << format_number(b.gammas[i]) << ',' << format_number(b.leverage_f) << ','
                << format_number(b.gamma_s[i]) << ',' << (b.clamped[i] ? 1 : 0) << ','
                << format_number(b.t_prime[i]) << ',' << format_number(b.l_prime[i]) << ','
                << (b.negative_impact[i] ? 1 : 0) << '\n';
}

void write_distribution_csv(const DistributionSummary& summary, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "F,count,probability\n";
    for (std::size_t f = 0; f < summary.histogram.size(); ++f)
        if (summary.histogram[f] > 0)
            out << f << ',' << summary.histogram[f] << ','
                << format_number(static_cast<double>(summary.histogram[f]) /
                                 static_cast<double>(summary.sample_count))
                << '\n';
}

void write_manifest(const SystemConfig& c, const SweepResult& sweep, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["n_banks"] = c.n_banks;
    j["m_assets"] = c.m_assets;
    j["s_sellers"] = c.s_sellers;
    j["theta"] = c.theta;
    j["kappa"] = c.kappa;
    j["rho"] = c.rho;
    j["dof"] = c.dof;
    j["calib_gamma"] = c.calib_gamma;
    j["calib_p"] = c.calib_p;
    j["calib_trials"] = c.calib_trials;
    j["amplitude"] = sweep.amplitude;
    j["samples"] = c.samples;
    j["master_seed"] = c.master_seed;
    j["gamma_grid"] = c.gamma_grid;
    j["f_set"] = c.f_set;
    j["attractiveness_ratio"] = c.attractiveness_ratio;
    j["protection_enabled"] = c.protection_enabled;
    j["capital_allocation"] = c.capital_allocation == CapitalAllocation::frozen ? "frozen" : "uniform_ratio";
    j["discarded_samples"] = sweep.discarded;
    j["discard_rate"] = sweep.discard_rate;
    j["streams"] = {"topology", "weights", "portfolio", "shocks", "protection"};
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

std::string describe(const SystemConfig& c) {
    std::ostringstream s;
    s << "N=" << c.n_banks << " M=" << c.m_assets << " S=" << c.s_sellers << " theta=" << format_number(c.theta)
      << " gamma=" << format_number(c.gamma) << " kappa=" << format_number(c.kappa)
      << " rho=" << format_number(c.rho) << " f=" << format_number(c.leverage_f) << " arm=" << arm_name(c.arm)
      << " samples=" << c.samples << " seed=" << c.master_seed;
    return s.str();
}

} // namespace contagion
