#ifndef CHIRPLET_DECOMPOSITION_HPP
#define CHIRPLET_DECOMPOSITION_HPP

#include <vector>

#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/signal.hpp"

namespace chirplet {

// Ordered chirplet expansion of one signal plus the residual-energy trace
// recorded by the estimator: trace[k] = ||R^k f||^2, one entry per extracted
// atom plus the leading ||f||^2 (so trace.size() == atoms.size() + 1 for
// estimator output; decompositions loaded from file carry no trace).
struct Decomposition {
    std::size_t n_samples = 0;
    double sample_rate_hz = 0.0;
    int radix = 2;
    int first_rotated_level = 1;
    double cc_threshold = 0.0;
    std::vector<ChirpletAtom> atoms;
    std::vector<double> residual_energy_trace;
    bool degenerate_input = false;  // set when an all-zero signal came in
};

// Synthesizes sum_n coeff_n * g_n over the decomposition's atoms.
inline AnalyticSignal reconstruct(const Decomposition& d) {
    AnalyticSignal out;
    out.sample_rate_hz = d.sample_rate_hz;
    out.samples.assign(d.n_samples, {0.0, 0.0});
    for (const auto& atom : d.atoms) {
        const AnalyticSignal g = sample_chirplet(atom.params, d.n_samples);
        for (std::size_t i = 0; i < d.n_samples; ++i)
            out.samples[i] += atom.coeff * g.samples[i];
    }
    return out;
}

}  // namespace chirplet

#endif  // CHIRPLET_DECOMPOSITION_HPP
