#ifndef CHIRPLET_ESTIMATOR_HPP
#define CHIRPLET_ESTIMATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "chirplet/decomposition.hpp"
#include "chirplet/dictionary.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/fft.hpp"
#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/signal.hpp"

namespace chirplet {

// Knobs for the MPEM loop. The stopping thresholds are not fixed by theory;
// the defaults are calibrated by the noise-stopping Monte-Carlo test.
struct EstimatorOptions {
    std::size_t max_atoms = 10;     // hard cap on extracted atoms
    double cc_threshold = 0.005;    // stop once the latest atom's coherence drops below
    int em_passes = 3;              // full EM passes per outer iteration (0 = plain MP)
    double em_tol = 1e-6;           // relative ||e||^2 change that ends EM early
    int nr_max_iters = 50;          // Newton refinement iteration cap
    double nr_step_tol = 1e-8;      // step norm, in normalized parameter units
    double residual_floor = 1e-12;  // stop when ||R||^2 <= floor * ||f||^2
    bool em_full_rescan = false;    // M-step redoes a full dictionary scan (slow)
};

inline void validate_options(const EstimatorOptions& o) {
    if (o.max_atoms < 1)
        throw InvalidInputError("EstimatorOptions: max_atoms must be >= 1");
    if (!(o.cc_threshold > 0.0 && o.cc_threshold < 1.0))
        throw InvalidInputError("EstimatorOptions: cc_threshold must lie in (0, 1)");
    if (o.em_passes < 0)
        throw InvalidInputError("EstimatorOptions: em_passes must be >= 0");
    if (!(o.em_tol > 0.0))
        throw InvalidInputError("EstimatorOptions: em_tol must be positive");
    if (o.nr_max_iters < 0)
        throw InvalidInputError("EstimatorOptions: nr_max_iters must be >= 0");
    if (!(o.nr_step_tol > 0.0))
        throw InvalidInputError("EstimatorOptions: nr_step_tol must be positive");
    if (!(o.residual_floor > 0.0))
        throw InvalidInputError("EstimatorOptions: residual_floor must be positive");
}

// Restricts which dictionary blocks a coarse scan may visit (the Gabor-only
// baseline passes a filter accepting only zero chirp-rate blocks).
using BlockFilter = std::function<bool(const DictionaryBlock&)>;

// Winning lattice point of a coarse scan.
struct LatticeMatch {
    ChirpletParams params;
    std::complex<double> coeff{0.0, 0.0};
    double gain = 0.0;  // |coeff|^2
    std::size_t block_index = 0;
    std::size_t time_index = 0;
    std::size_t freq_index = 0;
};

struct RefineResult {
    ChirpletParams params;
    std::complex<double> coeff{0.0, 0.0};
    double gain = 0.0;  // |coeff|^2 at params
};

namespace detail {

// Optimizer coordinates relative to a reference spread s:
// v = (tc/s, fc*s, c*s^2, ln(dt/s)). In these units the curvature of
// |<f, g>|^2 is O(1) in every direction regardless of the atom's scale, so
// one finite-difference step size serves all four parameters.
struct VSpace {
    double s = 1.0;

    std::array<double, 4> from(const ChirpletParams& p) const {
        return {p.tc / s, p.fc * s, p.c * s * s, std::log(p.dt / s)};
    }
    ChirpletParams to(const std::array<double, 4>& v) const {
        ChirpletParams p;
        p.tc = v[0] * s;
        p.fc = v[1] / s;
        p.c = v[2] / (s * s);
        p.dt = s * std::exp(v[3]);
        return p;
    }
};

// Safety box: tc inside the record, dt above the degeneracy floor and below
// a few record lengths, fc wrapped to its 2*pi period (wrapping changes the
// atom only by a constant unit phase, which the coefficient absorbs).
inline ChirpletParams clamp_params(ChirpletParams p, std::size_t n) {
    const double nd = static_cast<double>(n);
    p.dt = std::clamp(p.dt, kMinTimeSpread + 1e-9, 4.0 * nd);
    p.tc = std::clamp(p.tc, 0.0, std::nextafter(nd, 0.0));
    p.fc = wrap_frequency(p.fc);
    return p;
}

struct Candidate {
    ChirpletParams p;
    std::complex<double> a{0.0, 0.0};
    double j = -1.0;  // |a|^2, or -1 for unusable parameters
};

inline Candidate eval_candidate(const AnalyticSignal& f, ChirpletParams p) {
    Candidate c;
    if (!(std::isfinite(p.tc) && std::isfinite(p.fc) && std::isfinite(p.c) &&
          std::isfinite(p.dt)) ||
        !(p.dt > 0.0)) {
        c.p = p;
        return c;
    }
    c.p = clamp_params(p, f.size());
    const AnalyticSignal g = sample_chirplet(c.p, f.size());
    c.a = inner_product(f, g);
    c.j = std::norm(c.a);
    return c;
}

// Gaussian elimination with partial pivoting; false on (near-)singular A.
inline bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b,
                   std::array<double, 4>& x) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 4; ++r) {
            const double m = a[r][col] / a[col][col];
            for (int cc = col; cc < 4; ++cc) a[r][cc] -= m * a[col][cc];
            b[r] -= m * b[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double acc = b[r];
        for (int cc = r + 1; cc < 4; ++cc) acc -= a[r][cc] * x[cc];
        x[r] = acc / a[r][r];
        if (!std::isfinite(x[r])) return false;
    }
    return true;
}

constexpr double kFdStep = 1e-4;  // finite-difference step in VSpace units

}  // namespace detail

// Best single lattice atom for the residual: for every (scale, chirp-rate)
// block and every integer time center, the inner products against all N
// frequency translations come from one length-N DFT of the windowed,
// dechirped residual. The winner's coefficient is then recomputed exactly
// against the sampled atom, so selection speed never degrades the estimate.
// Ties resolve to the earliest block / time / frequency index, in that
// order of significance.
inline LatticeMatch mp_coarse(const AnalyticSignal& residual, const Dictionary& dict,
                              const BlockFilter& filter = {}) {
    const std::size_t n = residual.size();
    if (n != dict.n_samples())
        throw InvalidInputError("mp_coarse: signal length does not match dictionary");
    if (!(energy(residual) > 0.0))
        throw DomainError("mp_coarse: degenerate zero residual");

    const Fft fft(n);
    std::vector<std::complex<double>> h(n), spectrum(n);
    bool found = false;
    double best_gain = -1.0;
    std::size_t best_block = 0, best_t = 0, best_f = 0;

    const auto& blocks = dict.blocks();
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const DictionaryBlock& b = blocks[bi];
        if (filter && !filter(b)) continue;

        // Past 39 spreads the envelope (and its square) underflows to exact
        // zero, so truncating the window there is lossless.
        const std::size_t d_max = std::min<std::size_t>(
            n - 1, static_cast<std::size_t>(std::ceil(39.0 * b.time_spread)));
        const std::size_t w_len = 2 * d_max + 1;
        std::vector<std::complex<double>> w(w_len);
        std::vector<double> env2(w_len + 1, 0.0);  // prefix sums of envelope^2
        for (std::size_t i = 0; i < w_len; ++i) {
            const double d = static_cast<double>(i) - static_cast<double>(d_max);
            const double u = d / b.time_spread;
            const double env = std::exp(-0.5 * u * u);
            w[i] = std::polar(env, -b.chirp_rate * d * d);
            env2[i + 1] = env2[i] + env * env;
        }

        for (std::size_t tc = 0; tc < n; ++tc) {
            const std::size_t lo = tc > d_max ? tc - d_max : 0;
            const std::size_t hi = std::min(n - 1, tc + d_max);
            const double norm2 =
                env2[hi - tc + d_max + 1] - env2[d_max - (tc - lo)];

            std::fill(h.begin(), h.end(), std::complex<double>{0.0, 0.0});
            for (std::size_t m = lo; m <= hi; ++m)
                h[m] = residual.samples[m] * w[m + d_max - tc];
            fft.forward_into(h, spectrum);

            const double inv_norm2 = 1.0 / norm2;
            for (std::size_t gf = 0; gf < n; ++gf) {
                const double gain = std::norm(spectrum[gf]) * inv_norm2;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_block = bi;
                    best_t = tc;
                    best_f = gf;
                    found = true;
                }
            }
        }
    }
    if (!found)
        throw InvalidInputError("mp_coarse: block filter excluded every block");

    LatticeMatch out;
    out.block_index = best_block;
    out.time_index = best_t;
    out.freq_index = best_f;
    out.params = dict.params_of(blocks[best_block], best_t, best_f);
    const AnalyticSignal g = sample_chirplet(out.params, n);
    out.coeff = inner_product(residual, g);
    out.gain = std::norm(out.coeff);
    return out;
}

// The directional derivatives the refiner uses — central differences of
// J = |<f, g>|^2 in VSpace, mapped back to plain (tc, fc, c, dt) axes by the
// chain rule. Exposed so tests can compare them with an independent oracle.
inline std::array<double, 4> refine_gradient(const AnalyticSignal& f,
                                             const ChirpletParams& p) {
    const detail::VSpace vs{p.dt};
    const auto v0 = vs.from(p);
    std::array<double, 4> g{};
    for (int i = 0; i < 4; ++i) {
        auto vp = v0, vm = v0;
        vp[i] += detail::kFdStep;
        vm[i] -= detail::kFdStep;
        g[i] = (detail::eval_candidate(f, vs.to(vp)).j -
                detail::eval_candidate(f, vs.to(vm)).j) /
               (2.0 * detail::kFdStep);
    }
    return {g[0] / p.dt, g[1] * p.dt, g[2] * p.dt * p.dt, g[3] / p.dt};
}

// Local maximization of J(I) = |<f, g_I>|^2 over all four continuous
// parameters, started from `init`. Newton steps on a finite-difference
// Hessian with a backtracking line search; iterations whose Newton
// direction is not an ascent direction fall back to gradient ascent.
// The best point seen is tracked throughout, so J(returned) >= J(init).
inline RefineResult refine_nr(const AnalyticSignal& f, const ChirpletParams& init,
                              const EstimatorOptions& opts = {}) {
    using detail::Candidate;
    const std::size_t n = f.size();
    if (n < kMinSignalLength)
        throw InvalidInputError("refine_nr: need at least 4 samples");

    Candidate best = detail::eval_candidate(f, init);
    if (best.j < 0.0)
        throw InvalidInputError("refine_nr: invalid initial parameters");

    constexpr double h = detail::kFdStep;
    Candidate cur = best;
    for (int iter = 0; iter < opts.nr_max_iters; ++iter) {
        const detail::VSpace vs{cur.p.dt};
        const auto v0 = vs.from(cur.p);
        const double j0 = cur.j;

        auto j_at = [&](const std::array<double, 4>& v) {
            return detail::eval_candidate(f, vs.to(v)).j;
        };

        std::array<double, 4> grad{};
        std::array<std::array<double, 4>, 4> hess{};
        std::array<double, 4> jp{}, jm{};
        for (int i = 0; i < 4; ++i) {
            auto vp = v0, vm = v0;
            vp[i] += h;
            vm[i] -= h;
            jp[i] = j_at(vp);
            jm[i] = j_at(vm);
            grad[i] = (jp[i] - jm[i]) / (2.0 * h);
            hess[i][i] = (jp[i] - 2.0 * j0 + jm[i]) / (h * h);
        }
        for (int i = 0; i < 4; ++i) {
            for (int k = i + 1; k < 4; ++k) {
                auto vpp = v0, vpm = v0, vmp = v0, vmm = v0;
                vpp[i] += h; vpp[k] += h;
                vpm[i] += h; vpm[k] -= h;
                vmp[i] -= h; vmp[k] += h;
                vmm[i] -= h; vmm[k] -= h;
                hess[i][k] = hess[k][i] =
                    (j_at(vpp) - j_at(vpm) - j_at(vmp) + j_at(vmm)) / (4.0 * h * h);
            }
        }

        double gnorm = 0.0;
        for (double v : grad) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (!(gnorm > 0.0)) break;  // flat point — nothing to climb

        // Newton direction for a maximum; requires d . grad > 0 to be usable.
        std::array<double, 4> dir{};
        bool newton = false;
        {
            std::array<double, 4> rhs{-grad[0], -grad[1], -grad[2], -grad[3]};
            std::array<double, 4> d{};
            if (detail::solve4(hess, rhs, d)) {
                const double along =
                    d[0] * grad[0] + d[1] * grad[1] + d[2] * grad[2] + d[3] * grad[3];
                if (along > 0.0) {
                    dir = d;
                    newton = true;
                }
            }
        }
        if (!newton)
            for (int i = 0; i < 4; ++i) dir[i] = grad[i] / gnorm;

        // Backtracking line search along dir: try the full step and halve
        // down to 2^-30 until J improves.
        auto attempt = [&](const std::array<double, 4>& d) {
            std::pair<double, Candidate> out{0.0, Candidate{}};
            double t = 1.0;
            for (int e = 0; e <= 30; ++e, t *= 0.5) {
                Candidate c = detail::eval_candidate(
                    f, vs.to({v0[0] + t * d[0], v0[1] + t * d[1], v0[2] + t * d[2],
                              v0[3] + t * d[3]}));
                if (c.j > j0) {
                    out = {t, c};
                    break;
                }
            }
            return out;
        };

        auto [step, cand] = attempt(dir);
        if (step == 0.0 && newton) {
            for (int i = 0; i < 4; ++i) dir[i] = grad[i] / gnorm;
            std::tie(step, cand) = attempt(dir);
        }
        if (step == 0.0) break;  // no improving step at any scale

        cur = cand;
        if (cur.j > best.j) best = cur;

        double dnorm = 0.0;
        for (double v : dir) dnorm += v * v;
        if (step * std::sqrt(dnorm) < opts.nr_step_tol) break;
    }

    return {best.p, best.a, best.j};
}

// Coherence of a projection: energy captured by the coefficient over the
// energy of the residue it was estimated from (the residue BEFORE the atom
// is extracted). Always in [0, 1] by Cauchy-Schwarz for unit-energy atoms.
inline double coherence(std::complex<double> coeff, double residual_energy) {
    if (!(residual_energy > 0.0))
        throw DomainError("coherence: residual energy must be positive");
    return std::norm(coeff) / residual_energy;
}

// Joint refinement of all atoms by expectation-maximization. Each EM
// iteration rebuilds one atom (round-robin: iteration i updates atom
// (i-1) mod P) from its complete data y_n = a_n g_n + e, i.e. the signal
// minus every other atom. The M-step re-estimates the atom from y_n with
// the same Newton refinement used for single-atom estimation, seeded at the
// atom's current parameters; if that stalls, the +-2 translation cells
// around it are probed and the best one refined (or, in full-rescan mode, a
// whole dictionary scan re-seeds it). Because every M-step result scores at
// least as well against y_n as the current atom does, ||e||^2 never
// increases. Runs at most em_passes full passes, stopping early once the
// relative change of ||e||^2 over a pass drops below em_tol.
inline std::vector<ChirpletAtom> em_refine(const AnalyticSignal& f,
                                           std::vector<ChirpletAtom> atoms,
                                           const EstimatorOptions& opts = {},
                                           const Dictionary* dict = nullptr,
                                           const BlockFilter& filter = {}) {
    if (atoms.empty()) throw InvalidInputError("em_refine: empty atom list");
    validate_options(opts);
    const std::size_t n = f.size();
    const std::size_t count = atoms.size();

    std::vector<AnalyticSignal> g(count);
    for (std::size_t k = 0; k < count; ++k)
        g[k] = sample_chirplet(atoms[k].params, n);

    auto residual_energy = [&]() {
        double e2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> v = f.samples[i];
            for (std::size_t k = 0; k < count; ++k)
                v -= atoms[k].coeff * g[k].samples[i];
            e2 += std::norm(v);
        }
        return e2;
    };
    double e2_prev = residual_energy();

    AnalyticSignal y;
    y.sample_rate_hz = f.sample_rate_hz;
    y.samples.resize(n);

    for (int pass = 0; pass < opts.em_passes; ++pass) {
        for (std::size_t idx = 0; idx < count; ++idx) {
            for (std::size_t i = 0; i < n; ++i) {
                std::complex<double> v = f.samples[i];
                for (std::size_t k = 0; k < count; ++k)
                    if (k != idx) v -= atoms[k].coeff * g[k].samples[i];
                y.samples[i] = v;
            }

            const double j_init = std::norm(inner_product(y, g[idx]));
            RefineResult r = refine_nr(y, atoms[idx].params, opts);

            if (opts.em_full_rescan && dict != nullptr) {
                try {
                    const LatticeMatch lat = mp_coarse(y, *dict, filter);
                    const RefineResult r2 = refine_nr(y, lat.params, opts);
                    if (r2.gain > r.gain) r = r2;
                } catch (const DomainError&) {
                    // zero complete data — keep the local result
                }
            } else if (!(r.gain > j_init * (1.0 + 1e-9))) {
                // Stalled in place: probe the surrounding translation cells.
                const double df = 2.0 * std::numbers::pi / static_cast<double>(n);
                detail::Candidate probe;
                for (int a = -2; a <= 2; ++a) {
                    for (int b = -2; b <= 2; ++b) {
                        if (a == 0 && b == 0) continue;
                        ChirpletParams q = r.params;
                        q.tc += a;
                        q.fc += b * df;
                        const detail::Candidate c = detail::eval_candidate(y, q);
                        if (c.j > probe.j) probe = c;
                    }
                }
                if (probe.j > r.gain) {
                    const RefineResult r2 = refine_nr(y, probe.p, opts);
                    if (r2.gain > r.gain) r = r2;
                }
            }

            atoms[idx].params = r.params;
            atoms[idx].coeff = r.coeff;
            g[idx] = sample_chirplet(r.params, n);
        }

        const double e2 = residual_energy();
        const bool settled = std::abs(e2_prev - e2) < opts.em_tol * std::max(e2_prev, 1e-300);
        e2_prev = e2;
        if (settled) break;
    }
    return atoms;
}

// The full estimation loop: greedy coarse match on the residue, Newton
// refinement, EM refinement of everything extracted so far, then the
// residue is rebuilt and the coherence stop is checked. The trace records
// ||f||^2 followed by the residual energy after every outer iteration.
// An all-zero input yields an empty decomposition flagged degenerate.
inline Decomposition mpem_decompose(const AnalyticSignal& f, const Dictionary& d,
                                    const EstimatorOptions& opts = {},
                                    const BlockFilter& filter = {}) {
    validate_options(opts);
    if (f.size() != d.n_samples())
        throw InvalidInputError("mpem_decompose: signal length does not match dictionary");

    Decomposition out;
    out.n_samples = f.size();
    out.sample_rate_hz = f.sample_rate_hz;
    out.radix = d.config().radix;
    out.first_rotated_level = d.config().first_rotated_level;
    out.cc_threshold = opts.cc_threshold;

    const double f2 = energy(f);
    out.residual_energy_trace.push_back(f2);
    if (!(f2 > 0.0)) {
        out.degenerate_input = true;
        return out;
    }

    AnalyticSignal residual = f;
    double r2 = f2;
    while (out.atoms.size() < opts.max_atoms) {
        if (r2 <= opts.residual_floor * f2) break;  // nothing left worth modeling

        const LatticeMatch lat = mp_coarse(residual, d, filter);
        const RefineResult ref = refine_nr(residual, lat.params, opts);

        ChirpletAtom atom;
        atom.params = ref.params;
        atom.coeff = ref.coeff;
        atom.cc = coherence(ref.coeff, r2);
        out.atoms.push_back(atom);

        if (opts.em_passes > 0)
            out.atoms = em_refine(f, std::move(out.atoms), opts, &d, filter);

        residual = f;
        for (const auto& a : out.atoms) {
            const AnalyticSignal ga = sample_chirplet(a.params, out.n_samples);
            for (std::size_t i = 0; i < residual.size(); ++i)
                residual.samples[i] -= a.coeff * ga.samples[i];
        }
        r2 = energy(residual);
        out.residual_energy_trace.push_back(r2);

        if (atom.cc < opts.cc_threshold) break;
    }
    return out;
}

}  // namespace chirplet

#endif  // CHIRPLET_ESTIMATOR_HPP
