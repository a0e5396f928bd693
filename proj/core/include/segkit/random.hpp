#pragma once

#include <cstdint>
#include <random>

namespace segkit {

/// Seeded generator whose derived draws are identical across standard
/// libraries (std distributions are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi].
    long long uniform_int(long long lo, long long hi) {
        auto const span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) {
            return static_cast<long long>(engine_());
        }
        std::uint64_t const limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v = engine_();
        while (v >= limit) {
            v = engine_();
        }
        return lo + static_cast<long long>(v % span);
    }

    /// Uniform real in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::mt19937_64 engine_;
};

} // namespace segkit
