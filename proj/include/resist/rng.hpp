#ifndef RESIST_RNG_HPP
#define RESIST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace resist {

// splitmix64 step (Vigna). All randomness in the library flows through this
// generator so that runs are reproducible across platforms and compilers.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49bb133111aebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to turn substream labels ("graph", "attack", ...) into keys.
inline std::uint64_t label_key(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic keyed random stream.
//
// A stream is addressed by a master seed plus a list of keys; the keys are
// folded into the state one splitmix64 step at a time. Substreams keyed by
// (seed, label, t, i, j) are therefore independent of the order in which the
// simulator visits links or nodes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // One warm-up step so that seed 0 does not start at state 0.
        splitmix64_next(state_);
    }

    static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
        Rng r(seed);
        for (std::uint64_t k : keys) {
            r.state_ ^= k;
            splitmix64_next(r.state_);
        }
        return r;
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n), n > 0 (Lemire multiply-shift).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; avoids std::normal_distribution, whose
    // output is implementation-defined.
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace resist

#endif
