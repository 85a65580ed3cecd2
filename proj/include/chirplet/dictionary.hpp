#ifndef CHIRPLET_DICTIONARY_HPP
#define CHIRPLET_DICTIONARY_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "chirplet/errors.hpp"
#include "chirplet/gaussian_chirplet.hpp"

namespace chirplet {

// Lattice configuration: radix of scales and the first level whose logons
// are chirped/rotated.
struct DictionaryConfig {
    std::size_t n_samples = 0;
    int radix = 2;
    int first_rotated_level = 1;
};

// One (scale, chirp-rate) family of the lattice. Each block implicitly
// spans all N x N (tc, fc) translations: tc = gamma_t samples,
// fc = 2*pi*gamma_f/N rad/sample.
struct DictionaryBlock {
    int level = 0;            // scale index k
    long chirp_index = 0;     // signed m; 0 for unrotated (Gabor) blocks
    bool rotated = false;     // false for the levels below first_rotated_level
    double time_spread = 1.0; // a^(2k)
    double chirp_rate = 0.0;  // (2*pi/N) * m / a^(2k)
};

// Discretized chirplet parameter lattice. Only block descriptors are
// stored; the N^2 translations per block are generated on demand.
//
// Levels: D = floor(log_a(N) / 2) total. Levels below first_rotated_level
// contribute one unrotated (chirp-rate 0) block each; rotated levels
// k = 0 .. D - i0 - 1 carry time spread a^(2k) and 4*a^(2k) chirp rates
// indexed by signed m in [-2*a^(2k), 2*a^(2k) - 1], giving rotation angles
// arctan(m / a^(2k)) strictly inside (-pi/2, pi/2). The signed range keeps
// the per-scale count at 4*a^(2k) while covering descending chirps.
//
// Enumeration order is fixed: unrotated levels ascending, then rotated
// levels ascending with m ascending inside each level. Argmax ties in the
// estimator resolve to the earliest block in this order.
class Dictionary {
  public:
    explicit Dictionary(const DictionaryConfig& cfg) : cfg_(cfg) {
        const double n = static_cast<double>(cfg.n_samples);
        if (cfg.n_samples < kMinSignalLength)
            throw InvalidInputError("Dictionary: need at least 4 samples");
        if (cfg.radix < 2)
            throw InvalidInputError("Dictionary: radix must be >= 2");
        if (cfg.first_rotated_level < 0)
            throw InvalidInputError("Dictionary: first rotated level must be >= 0");
        levels_ = static_cast<int>(
            std::floor(0.5 * std::log(n) / std::log(static_cast<double>(cfg.radix))));
        if (levels_ < cfg.first_rotated_level + 1)
            throw InvalidInputError(
                "Dictionary: signal too short for this radix/first-rotated-level "
                "(needs at least one rotated scale)");

        const double fundamental = 2.0 * std::numbers::pi / n;  // F/T
        for (int k = 0; k < cfg.first_rotated_level; ++k) {
            DictionaryBlock b;
            b.level = k;
            b.chirp_index = 0;
            b.rotated = false;
            b.time_spread = std::pow(static_cast<double>(cfg.radix), 2 * k);
            b.chirp_rate = 0.0;
            blocks_.push_back(b);
        }
        for (int k = 0; k < levels_ - cfg.first_rotated_level; ++k) {
            const double spread = std::pow(static_cast<double>(cfg.radix), 2 * k);
            const long half = 2 * static_cast<long>(std::llround(spread));
            for (long m = -half; m < half; ++m) {
                DictionaryBlock b;
                b.level = k;
                b.chirp_index = m;
                b.rotated = true;
                b.time_spread = spread;
                b.chirp_rate = fundamental * static_cast<double>(m) / spread;
                blocks_.push_back(b);
            }
        }
    }

    const DictionaryConfig& config() const { return cfg_; }
    std::size_t n_samples() const { return cfg_.n_samples; }

    // Number of decomposition levels D.
    int levels() const { return levels_; }

    // Every (scale, chirp-rate) block in enumeration order.
    const std::vector<DictionaryBlock>& blocks() const { return blocks_; }

    // Total lattice size M = N^2 * (i0 + sum_k 4*a^(2k)).
    std::uint64_t total_atom_count() const {
        const std::uint64_t n = cfg_.n_samples;
        return n * n * static_cast<std::uint64_t>(blocks_.size());
    }

    // Parameters of the lattice point (rotated-scale k, chirp index m,
    // time translation gamma_t, frequency translation gamma_f).
    ChirpletParams params_at(int k, long m, std::size_t gamma_t,
                             std::size_t gamma_f) const {
        if (k < 0 || k >= levels_ - cfg_.first_rotated_level)
            throw InvalidInputError("Dictionary::params_at: scale index out of range");
        const double spread = std::pow(static_cast<double>(cfg_.radix), 2 * k);
        const long half = 2 * static_cast<long>(std::llround(spread));
        if (m < -half || m >= half)
            throw InvalidInputError("Dictionary::params_at: chirp index out of range");
        return translate(k, m, gamma_t, gamma_f);
    }

    ChirpletParams params_of(const DictionaryBlock& b, std::size_t gamma_t,
                             std::size_t gamma_f) const {
        return translate(b.level, b.rotated ? b.chirp_index : 0, gamma_t, gamma_f,
                         b.rotated);
    }

  private:
    ChirpletParams translate(int k, long m, std::size_t gamma_t,
                             std::size_t gamma_f, bool rotated = true) const {
        if (gamma_t >= cfg_.n_samples || gamma_f >= cfg_.n_samples)
            throw InvalidInputError("Dictionary: translation index out of range");
        const double n = static_cast<double>(cfg_.n_samples);
        ChirpletParams p;
        p.tc = static_cast<double>(gamma_t);
        p.fc = 2.0 * std::numbers::pi * static_cast<double>(gamma_f) / n;
        p.dt = std::pow(static_cast<double>(cfg_.radix), 2 * k);
        p.c = rotated ? (2.0 * std::numbers::pi / n) * static_cast<double>(m) / p.dt
                      : 0.0;
        return p;
    }

    DictionaryConfig cfg_;
    int levels_ = 0;
    std::vector<DictionaryBlock> blocks_;
};

}  // namespace chirplet

#endif  // CHIRPLET_DICTIONARY_HPP
