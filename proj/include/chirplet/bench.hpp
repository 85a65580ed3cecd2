#ifndef CHIRPLET_BENCH_HPP
#define CHIRPLET_BENCH_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chirplet/decomposition.hpp"
#include "chirplet/dictionary.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/estimator.hpp"
#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/rng.hpp"
#include "chirplet/signal.hpp"
#include "chirplet/spectra.hpp"
#include "chirplet/stats.hpp"

namespace chirplet {

// The synthetic crossing pair: both components share time center N/2 + 1,
// frequency center pi/2 and spread N/3; the chirp-rates are +-pi/N.
inline ChirpletParams crossed_up_params(std::size_t n) {
    const double nd = static_cast<double>(n);
    return {nd / 2.0 + 1.0, std::numbers::pi / 2.0, std::numbers::pi / nd, nd / 3.0};
}

inline ChirpletParams crossed_down_params(std::size_t n) {
    ChirpletParams p = crossed_up_params(n);
    p.c = -p.c;
    return p;
}

// Unit-amplitude sum of the upward and downward unit-energy chirplets.
inline AnalyticSignal make_crossed_signal(std::size_t n) {
    if (n < 32) throw InvalidInputError("make_crossed_signal: need at least 32 samples");
    AnalyticSignal f = sample_chirplet(crossed_up_params(n), n);
    const AnalyticSignal g = sample_chirplet(crossed_down_params(n), n);
    for (std::size_t i = 0; i < n; ++i) f.samples[i] += g.samples[i];
    return f;
}

// Gabor-first comparator: the identical estimation pipeline with the
// coarse scan restricted to zero chirp-rate (logon) blocks; the Newton and
// EM refinements still move all four parameters. This is the approach whose
// lack of robustness on deeply crossed components motivates the chirp-aware
// scan, and it stands in for an external comparator here.
inline Decomposition baseline_decompose(const AnalyticSignal& f, const Dictionary& d,
                                        const EstimatorOptions& opts = {}) {
    return mpem_decompose(f, d, opts,
                          [](const DictionaryBlock& b) { return b.chirp_rate == 0.0; });
}

// Normalized difference of the comparator's and the pipeline's squared
// reconstruction errors; +1 means the pipeline was perfect, -1 the
// comparator. Undefined when both errors vanish.
inline double robustness_index(double e_l, double e_p) {
    if (!(e_l >= 0.0) || !(e_p >= 0.0))
        throw InvalidInputError("robustness_index: squared errors must be non-negative");
    if (!(e_l + e_p > 0.0))
        throw DomainError("robustness_index: both errors are zero");
    return (e_l - e_p) / (e_l + e_p);
}

struct BenchConfig {
    std::vector<double> snr_list{-30.0, -20.0, -10.0, 0.0, 10.0, 20.0};
    std::size_t trials_per_snr = 100;
    std::size_t bootstrap_n = 1000;
    std::uint64_t seed = 1;
    // 256 samples puts chirped cells with 16-sample spread in the lattice;
    // shorter records leave the crossing pair almost invisible to the
    // rotated blocks and the comparison degenerates.
    std::size_t n_samples = 256;
    int radix = 2;
    int first_rotated_level = 1;
    // Two atoms with EM on: enough to model the crossing pair, same budget
    // for both methods.
    EstimatorOptions estimator{.max_atoms = 2};
};

struct RobustnessRow {
    double snr_db = 0.0;
    double mean_ri = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_trials = 0;
};

struct RobustnessReport {
    BenchConfig config;
    std::vector<RobustnessRow> rows;
    std::vector<std::vector<double>> ris;  // raw per-trial indices, per SNR row
};

namespace detail {
inline double squared_error(const AnalyticSignal& a, const AnalyticSignal& b) {
    if (a.size() != b.size())
        throw InvalidInputError("squared_error: length mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e += std::norm(a.samples[i] - b.samples[i]);
    return e;
}
}  // namespace detail

// Paired noise protocol: per SNR and trial, one seeded noisy copy of the
// crossing pair is decomposed by both methods (identical input), each
// reconstruction is scored against the CLEAN signal over all samples, and
// the robustness index of the error pair is recorded. Per SNR the report
// carries the mean index, a 95% percentile-bootstrap interval for it, and
// the right-tailed signed-rank p-value against median 0 (NaN when fewer
// than 10 trials or every index is zero). Trial t at SNR row s draws its
// noise from derive_seed(seed, s, t), so the whole report is a pure
// function of the configuration.
inline RobustnessReport run_robustness_experiment(const BenchConfig& cfg) {
    if (cfg.trials_per_snr < 2)
        throw InvalidInputError("run_robustness_experiment: need at least 2 trials per SNR");
    if (cfg.bootstrap_n < 1)
        throw InvalidInputError("run_robustness_experiment: need at least 1 resample");
    if (cfg.snr_list.empty())
        throw InvalidInputError("run_robustness_experiment: empty SNR list");
    validate_options(cfg.estimator);

    const AnalyticSignal clean = make_crossed_signal(cfg.n_samples);
    const Dictionary dict(
        DictionaryConfig{cfg.n_samples, cfg.radix, cfg.first_rotated_level});

    RobustnessReport rep;
    rep.config = cfg;
    for (std::size_t si = 0; si < cfg.snr_list.size(); ++si) {
        std::vector<double> ris(cfg.trials_per_snr);
        for (std::size_t t = 0; t < cfg.trials_per_snr; ++t) {
            const std::uint64_t s = derive_seed(cfg.seed, si, t);
            const AnalyticSignal noisy = add_noise(clean, cfg.snr_list[si], s);
            const Decomposition dp = mpem_decompose(noisy, dict, cfg.estimator);
            const Decomposition dl = baseline_decompose(noisy, dict, cfg.estimator);
            const double e_p = detail::squared_error(reconstruct(dp), clean);
            const double e_l = detail::squared_error(reconstruct(dl), clean);
            ris[t] = robustness_index(e_l, e_p);
        }

        RobustnessRow row;
        row.snr_db = cfg.snr_list[si];
        row.n_trials = cfg.trials_per_snr;
        row.mean_ri = mean(ris);
        const Interval ci = bootstrap_mean_ci(
            ris, cfg.bootstrap_n, derive_seed(cfg.seed, si, ~std::uint64_t{0}));
        row.ci_low = ci.lo;
        row.ci_high = ci.hi;
        if (ris.size() >= 10) {
            try {
                row.p_value = signed_rank_right(ris);
            } catch (const DomainError&) {
                // all indices exactly zero — leave NaN
            }
        }
        rep.rows.push_back(row);
        rep.ris.push_back(std::move(ris));
    }
    return rep;
}

// columns: snr_db, mean_ri, ci_low, ci_high, p_value, n
inline std::string report_csv(const RobustnessReport& r) {
    std::ostringstream out;
    out << "snr_db,mean_ri,ci_low,ci_high,p_value,n\n";
    for (const RobustnessRow& row : r.rows)
        out << detail::format_real(row.snr_db) << ','
            << detail::format_real(row.mean_ri) << ','
            << detail::format_real(row.ci_low) << ','
            << detail::format_real(row.ci_high) << ','
            << detail::format_real(row.p_value) << ',' << row.n_trials << '\n';
    return out.str();
}

inline std::string report_text(const RobustnessReport& r) {
    char line[160];
    std::ostringstream out;
    out << "robustness: n=" << r.config.n_samples
        << " trials=" << r.config.trials_per_snr
        << " bootstrap=" << r.config.bootstrap_n << " seed=" << r.config.seed
        << "\n";
    out << "  snr_db    mean_ri     ci_low    ci_high    p_value      n\n";
    for (const RobustnessRow& row : r.rows) {
        std::snprintf(line, sizeof line, "%8.1f %10.4f %10.4f %10.4f %10.3g %6zu\n",
                      row.snr_db, row.mean_ri, row.ci_low, row.ci_high, row.p_value,
                      row.n_trials);
        out << line;
    }
    return out.str();
}

}  // namespace chirplet

#endif  // CHIRPLET_BENCH_HPP
