#include "contagion/random.hpp"

#include <cmath>

namespace contagion {

std::string_view stream_name(Stream s) {
    switch (s) {
    case Stream::topology: return "topology";
    case Stream::weights: return "weights";
    case Stream::portfolio: return "portfolio";
    case Stream::shocks: return "shocks";
    case Stream::protection: return "protection";
    case Stream::calibration: return "calibration";
    }
    return "unknown";
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample_index, Stream label,
                          std::uint64_t attempt) {
    std::uint64_t state = master;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t key : {sample_index, static_cast<std::uint64_t>(label), attempt}) {
        state = h ^ (key * 0xd6e8feb86659fd93ULL);
        h = splitmix64(state);
    }
    return h;
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    // rejection on the top of the range keeps the draw unbiased
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n + 1) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % n;
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::student_t(double dof) {
    double u, v, w;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        w = u * u + v * v;
    } while (w >= 1.0 || w == 0.0);
    return u * std::sqrt(dof * (std::pow(w, -2.0 / dof) - 1.0) / w);
}

} // namespace contagion
