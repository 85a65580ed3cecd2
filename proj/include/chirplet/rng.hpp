#ifndef CHIRPLET_RNG_HPP
#define CHIRPLET_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

// Portable, seedable random streams. Every generator here has a fully
// documented bit-exact output sequence so seeded experiments reproduce
// across platforms and languages; std:: distributions are avoided because
// their streams are implementation-defined.

namespace chirplet {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seeding and for
// deriving independent per-trial seeds from a master seed.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stable seed for sub-stream (a, b) of a master seed. Streams for distinct
// (a, b) pairs are decorrelated by two rounds of mixing.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) {
    std::uint64_t h = splitmix64_mix(master ^ 0x5851F42D4C957F2DULL);
    h = splitmix64_mix(h ^ splitmix64_mix(a + 1));
    h = splitmix64_mix(h ^ splitmix64_mix(b + 0x9E3779B97F4A7C15ULL));
    return h;
}

// xoshiro256++ 1.0 (Blackman & Vigna 2019), seeded through SplitMix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : state_) {
            z = splitmix64_mix(z);
            word = z;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1): top 53 bits of the stream.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n); n must be nonzero. Plain modulo: the bias
    // is below 2^-50 for any n used here and the stream stays portable.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

    // One pair of independent standard normal variates via Box-Muller.
    std::pair<double, double> next_normal_pair() {
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace chirplet

#endif  // CHIRPLET_RNG_HPP
