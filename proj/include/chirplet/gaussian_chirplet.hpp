#ifndef CHIRPLET_GAUSSIAN_CHIRPLET_HPP
#define CHIRPLET_GAUSSIAN_CHIRPLET_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "chirplet/errors.hpp"
#include "chirplet/signal.hpp"

namespace chirplet {

// Below ~0.5 samples of spread the sampled Gaussian degenerates toward a
// single-sample spike and the chirp phase is meaningless.
constexpr double kMinTimeSpread = 0.5;

inline double wrap_frequency(double w) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    w = std::fmod(w, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

// Four-parameter Gaussian chirplet index: time center (samples), frequency
// center (rad/sample), chirp-rate (rad/sample^2), effective time spread
// (samples). Instantaneous frequency of the sampled waveform is
// fc + 2*c*(t - tc); the IF slope is twice the chirp-rate.
struct ChirpletParams {
    double tc = 0.0;
    double fc = 0.0;
    double c = 0.0;
    double dt = 1.0;
};

// Estimated atom: parameters, complex coefficient, and the coherence of
// the projection against the residue it was estimated from.
struct ChirpletAtom {
    ChirpletParams params;
    std::complex<double> coeff{0.0, 0.0};
    double cc = 0.0;
};

// Samples the Gaussian chirplet at integer t = 0..N-1 and renormalizes to
// unit discrete energy. Renormalization (rather than the continuous-time
// amplitude factor) keeps <f, g> an exact projection even for atoms
// truncated at the record boundaries.
inline AnalyticSignal sample_chirplet(const ChirpletParams& p, std::size_t n) {
    if (n < kMinSignalLength)
        throw InvalidInputError("sample_chirplet: need at least 4 samples");
    if (!(p.dt > kMinTimeSpread))
        throw DomainError("sample_chirplet: time spread must exceed 0.5 samples");
    if (!(std::isfinite(p.tc) && std::isfinite(p.fc) && std::isfinite(p.c) &&
          std::isfinite(p.dt)))
        throw InvalidInputError("sample_chirplet: non-finite parameter");
    if (p.tc < 0.0 || p.tc >= static_cast<double>(n))
        throw InvalidInputError("sample_chirplet: time center outside record");

    AnalyticSignal g;
    g.samples.resize(n);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(i) - p.tc;
        const double u = d / p.dt;
        const double env = std::exp(-0.5 * u * u);
        const double phase = (p.c * d + p.fc) * d;
        g.samples[i] = std::polar(env, phase);
        e += env * env;
    }
    if (e <= 0.0)
        throw DomainError("sample_chirplet: degenerate atom (zero energy)");
    const double inv = 1.0 / std::sqrt(e);
    for (auto& v : g.samples) v *= inv;
    return g;
}

}  // namespace chirplet

#endif  // CHIRPLET_GAUSSIAN_CHIRPLET_HPP
