#ifndef CHIRPLET_SIGNAL_HPP
#define CHIRPLET_SIGNAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "chirplet/errors.hpp"
#include "chirplet/fft.hpp"
#include "chirplet/rng.hpp"

namespace chirplet {

// Complex (analytic) discrete signal. All core math runs in normalized
// units: time in samples, frequency in rad/sample. The sample rate is
// carried as metadata only; 0 means "normalized" (no physical rate).
struct AnalyticSignal {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

constexpr std::size_t kMinSignalLength = 4;

inline double energy(const AnalyticSignal& f) {
    double e = 0.0;
    for (const auto& v : f.samples) e += std::norm(v);
    return e;
}

// <f, g> = sum_n f[n] * conj(g[n]). For unit-energy g this is the
// projection coefficient of f onto g.
inline std::complex<double> inner_product(const AnalyticSignal& f,
                                          const AnalyticSignal& g) {
    if (f.size() != g.size())
        throw InvalidInputError("inner_product: length mismatch");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < f.size(); ++n)
        acc += f.samples[n] * std::conj(g.samples[n]);
    return acc;
}

// Analytic extension of a real sequence: real part is the input, imaginary
// part its discrete Hilbert transform. DFT method: zero the negative
// frequency bins, double the positive ones, keep DC and Nyquist unscaled.
inline AnalyticSignal make_analytic(const std::vector<double>& x,
                                    double sample_rate_hz = 0.0) {
    const std::size_t n = x.size();
    if (n < kMinSignalLength)
        throw InvalidInputError("make_analytic: need at least 4 samples");
    for (double v : x)
        if (!std::isfinite(v))
            throw InvalidInputError("make_analytic: non-finite sample");

    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = {x[i], 0.0};
    Fft plan(n);
    spec = plan.forward(spec);

    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < n; ++k) {
        if (k < half || (k == half && n % 2 != 0)) {
            spec[k] *= 2.0;             // positive frequencies
        } else if (k == half) {
            ;                           // Nyquist bin stays unscaled
        } else {
            spec[k] = {0.0, 0.0};       // negative frequencies
        }
    }
    AnalyticSignal out{plan.inverse(spec), sample_rate_hz};
    // The construction leaves a numerically tiny imaginary residue on the
    // real part; pin it to the input exactly, as contracted.
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i].real(x[i]);
    return out;
}

// f plus complex circular Gaussian white noise, scaled so the realized
// SNR equals snr_db exactly: 10*log10(energy(f)/energy(noise)) == snr_db.
// Bit-reproducible for a fixed seed (xoshiro256++ / Box-Muller stream).
inline AnalyticSignal add_noise(const AnalyticSignal& f, double snr_db,
                                std::uint64_t seed) {
    const double ef = energy(f);
    if (ef <= 0.0)
        throw DomainError("add_noise: signal has zero energy");

    Xoshiro256pp rng(seed);
    std::vector<std::complex<double>> w(f.size());
    double ew = 0.0;
    for (auto& v : w) {
        const auto [re, im] = rng.next_normal_pair();
        v = {re, im};
        ew += std::norm(v);
    }
    const double target = ef * std::pow(10.0, -snr_db / 10.0);
    const double scale = std::sqrt(target / ew);

    AnalyticSignal out = f;
    for (std::size_t n = 0; n < w.size(); ++n) out.samples[n] += scale * w[n];
    return out;
}

}  // namespace chirplet

#endif  // CHIRPLET_SIGNAL_HPP
