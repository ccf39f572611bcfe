#pragma once

#include <cmath>
#include <cstdint>

namespace lcrl {

// Counter-derived random streams. Each (base seed, stream index) pair yields
// an independent generator, so Monte Carlo episodes can be drawn in any order
// (or in parallel) and still reproduce bit-identically.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

    static RngStream substream(std::uint64_t base_seed, std::uint64_t index) {
        std::uint64_t key = mix(base_seed ^ mix(index * 0x9e3779b97f4a7c15ULL + 0x1234567890abcdefULL));
        return RngStream(key);
    }

    // Derives a disjoint seed namespace (e.g. evaluation vs. algorithm noise).
    static std::uint64_t derive_namespace(std::uint64_t base_seed, std::uint64_t tag) {
        return mix(base_seed ^ mix(tag ^ 0xd6e8feb86659fd93ULL));
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform on (0, 1]; never returns 0 so it is safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (platform-stable, no library distribution
    // object whose draw order could differ between standard libraries).
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace lcrl
