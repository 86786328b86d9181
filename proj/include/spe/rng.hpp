#pragma once

#include <cmath>
#include <cstdint>

namespace spe {

// Deterministic splitmix64 generator. Constant-time seeding makes per-shot
// streams cheap, so parallel and serial execution can draw from identical
// per-shot streams; output is reproducible across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream for a given (seed, stream_id) pair.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix(seed, stream_id));
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return finalize(a + 0x9e3779b97f4a7c15ULL * (b + 1));
    }

    std::uint64_t integer() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return finalize(state_);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(integer() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Index of the first success in a Bernoulli(p) sequence starting at 0;
    // returns a value >= limit when no success occurs before `limit`.
    std::uint64_t geometric_skip(double p, std::uint64_t limit) {
        if (p <= 0.0) return limit;
        if (p >= 1.0) return 0;
        double u = uniform();
        if (u <= 0.0) return limit;
        double g = std::log(u) / std::log1p(-p);
        if (g >= static_cast<double>(limit)) return limit;
        return static_cast<std::uint64_t>(g);
    }

  private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace spe
