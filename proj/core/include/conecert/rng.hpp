#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace conecert {

/// Seeded random source with labeled substreams.
///
/// Every run draws all randomness from one root seed; components derive
/// their own stream via a fixed label, so adding or reordering components
/// never perturbs the values another component sees. The uniform/normal
/// helpers map raw engine output directly (no std::*_distribution), which
/// keeps byte-level reproducibility independent of the standard library.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : root_(seed), engine_(mix(seed)) {}

    /// Derive an independent substream from the root seed and a label.
    [[nodiscard]] SplitRng stream(std::string_view label) const {
        return SplitRng(mix(root_ ^ fnv1a(label)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Standard normal via Box-Muller (one value per call, deterministic).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    [[nodiscard]] std::uint64_t root_seed() const { return root_; }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 1469598103934665603ull;
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    /// splitmix64 finalizer; decorrelates nearby seeds before feeding the engine.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t root_;
    std::mt19937_64 engine_;
};

} // namespace conecert
