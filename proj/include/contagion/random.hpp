#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace contagion {

/// Independent sub-streams drawn for one Monte-Carlo sample.
enum class Stream : std::uint64_t {
    topology = 1,
    weights = 2,
    portfolio = 3,
    shocks = 4,
    protection = 5,
    calibration = 6,
};

std::string_view stream_name(Stream s);

std::uint64_t splitmix64(std::uint64_t& state);

/// Keyed hash of (master, sample index, label, attempt). Distinct keys give
/// statistically independent seeds; identical keys give identical seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample_index, Stream label,
                          std::uint64_t attempt = 0);

/// Thin wrapper over mt19937_64 with distribution code written out so that
/// draws do not depend on the standard library's distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    bool coin() { return (engine_() >> 63) != 0; }

    double exponential();
    /// Standard Student-t with `dof` degrees of freedom (Bailey's polar method).
    double student_t(double dof);

private:
    std::mt19937_64 engine_;
};

} // namespace contagion
