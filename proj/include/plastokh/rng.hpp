#pragma once

#include <cmath>
#include <cstdint>

namespace plastokh {

/// splitmix64; used for seeding and for deriving per-path substreams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** generator. Small, fast, and bit-stable across platforms,
/// which the determinism contract requires (std::normal_distribution is
/// implementation-defined).
class Xoshiro256 {
public:
    explicit Xoshiro256(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// uniform in (0,1); never returns exactly 0
    double next_uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

/// Standard-normal stream via Box-Muller on explicit uniforms.
class NormalStream {
public:
    explicit NormalStream(uint64_t seed) : eng_(seed) {}

    /// Substream for path `index` of ensemble `seed`; streams with
    /// distinct (seed, index) are independent for all practical purposes.
    static NormalStream substream(uint64_t seed, uint64_t index) {
        uint64_t sm = seed;
        (void)splitmix64(sm);
        sm ^= 0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL;
        return NormalStream(splitmix64(sm));
    }

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = eng_.next_uniform();
        const double u2 = eng_.next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    Xoshiro256 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace plastokh
