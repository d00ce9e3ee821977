#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qtel {

// SplitMix64 finalizer; used to decorrelate seeds of derived sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic 64-bit random stream.
//
// The engine (mt19937_64) is fully specified by the standard, and the
// distribution transforms below are hand-written, so a given seed produces the
// same numbers on every platform and toolchain. Reproducibility across thread
// counts is obtained by giving each parallel unit of work its own substream:
// substream(id) depends only on (seed, id), never on draw order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng substream(std::uint64_t id) const {
        return Rng(splitmix64(seed_ ^ splitmix64(~id)));
    }

    std::uint64_t next_u64() { return eng_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // unbiased integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t bound = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= bound);
        return x % n;
    }

    // standard normal via Box-Muller (second value cached)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform01();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u));
        const double t = 2.0 * M_PI * v;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qtel
