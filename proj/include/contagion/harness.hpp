#pragma once

#include "contagion/balance.hpp"
#include "contagion/cascade.hpp"
#include "contagion/cds.hpp"
#include "contagion/market.hpp"
#include "contagion/metrics.hpp"
#include "contagion/netgen.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contagion {

inline constexpr std::size_t kMaxSampleAttempts = 32;

struct SystemConfig {
    std::size_t n_banks = 500;
    std::size_t m_assets = 2;
    std::size_t s_sellers = 10;
    double theta = 0.3;
    double gamma = 0.09;
    double kappa = 0.05;
    double rho = 0.3;
    double leverage_f = 0.0;
    double dof = 1.5;
    double calib_gamma = 0.07;
    double calib_p = 1e-3;
    std::size_t calib_trials = 10'000'000;
    std::size_t samples = 10'000;
    std::uint64_t master_seed = 20131001;
    std::vector<double> gamma_grid = {0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.12, 0.13, 0.14};
    std::vector<double> f_set = {0.0, 0.2, 0.4, 1.0};
    Arm arm = Arm::baseline;
    std::size_t workers = 1;
    double attractiveness_ratio = -0.5;
    /// Insurance contracts are written in the transferred arm.
    bool protection_enabled = true;
    CapitalAllocation capital_allocation = CapitalAllocation::uniform_ratio;
    /// When false every bank starts with zero external loss.
    bool shocks_enabled = true;
};

/// Throws ConfigError on values the model cannot run with; returns warnings
/// for values outside the studied parameter ranges.
std::vector<std::string> validate(const SystemConfig& config);

/// Applies one `key=value` setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(SystemConfig& config, const std::string& key, const std::string& value);

/// Reads a flat `key=value` file; blank lines and `#` comments are ignored.
SystemConfig load_config(const std::filesystem::path& path, SystemConfig base = {});

/// Everything random about one Monte-Carlo sample, shared across capital
/// ratios and arms so they see common random numbers.
struct SampleWorld {
    WeightedNetwork network;
    Portfolio portfolio;
    std::optional<ShockVector> shocks;
    std::vector<BankIndex> sellers;
    ProtectionPattern protection;
    std::size_t attempts = 1; ///< draws needed to obtain feasible sheets
};

/// Draws the random ingredients of one sample, redrawing (with a fresh attempt
/// key) whenever some bank's assets fall short of its interbank borrowings.
/// Throws SampleExhausted after kMaxSampleAttempts such draws.
SampleWorld draw_world(const SystemConfig& config, std::uint64_t sample_index, double amplitude);

/// Full pipeline for the cell (config.gamma, config.leverage_f, config.arm).
CascadeResult run_sample(const SystemConfig& config, std::uint64_t sample_index, double amplitude);

/// Distribution of failures for the configured cell.
DistributionSummary run_cell(const SystemConfig& config, double amplitude,
                             std::vector<CascadeResult>* results = nullptr);

/// F* over `gamma_grid` for one arm at config.leverage_f.
SeverityCurve severity_curve(const SystemConfig& config, std::span<const double> gamma_grid,
                             bool with_transfer, double amplitude);

struct SweepResult {
    double amplitude = 0.0;
    SeverityCurve baseline;
    std::vector<SeverityCurve> transferred; ///< one per f in f_set
    std::vector<BufferCurve> buffers;       ///< one per f in f_set
    std::size_t discarded = 0;
    double discard_rate = 0.0;
};

/// Baseline curve, one transferred curve per f, and the buffer curves.
SweepResult run_sweep(const SystemConfig& config, double amplitude);

CalibrationSettings calibration_settings(const SystemConfig& config);

void write_severity_csv(const SweepResult& sweep, const std::filesystem::path& path);
void write_buffer_csv(const SweepResult& sweep, const std::filesystem::path& path);
void write_manifest(const SystemConfig& config, const SweepResult& sweep,
                    const std::filesystem::path& path);
void write_distribution_csv(const DistributionSummary& summary, const std::filesystem::path& path);

std::string format_number(double x);
std::string describe(const SystemConfig& config);

extern const char* const kVersion;

} // namespace contagion
