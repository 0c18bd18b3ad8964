#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "sdfkit/util/hash.hpp"

namespace sdfkit {

// Seeds for sub-tasks are derived from (master seed, tag, indices) instead of
// consuming a shared engine, so per-shape / per-epoch streams are independent
// of scheduling and a resumed run draws the same numbers as an uninterrupted one.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t x = splitmix64(base ^ fnv1a64(tag));
    x = splitmix64(x ^ a);
    x = splitmix64(x ^ b);
    return x;
}

// mt19937_64 with explicit uniform/normal transforms. std::*_distribution is
// implementation-defined; these transforms keep the byte streams ours.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0,1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t index(std::uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64 and determinism is what matters
        return std::uint64_t((static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    // standard normal via Box-Muller, one cached value
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sdfkit
