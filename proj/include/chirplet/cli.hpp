#ifndef CHIRPLET_CLI_HPP
#define CHIRPLET_CLI_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chirplet/bench.hpp"
#include "chirplet/decomposition.hpp"
#include "chirplet/dictionary.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/estimator.hpp"
#include "chirplet/io.hpp"
#include "chirplet/signal.hpp"
#include "chirplet/spectra.hpp"

// Command-line surface. Exit codes: 0 success, 1 command-line usage error,
// 2 bad or unreadable data (I/O, parse, format, invalid inputs),
// 3 numerical failure (degenerate computations).

namespace chirplet {
namespace cli {

// Post-parse misuse that should still read as a usage error (exit 1).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string extension(const std::string& path) {
    const std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

inline LoadedSignal load_by_extension(const std::string& path) {
    return load_signal(path,
                       extension(path) == ".wav" ? SignalFormat::wav : SignalFormat::csv);
}

struct DecomposeArgs {
    std::string input, output;
    std::size_t atoms = 10;
    double cc_thresh = 0.005;
    int em_passes = 3;
    int radix = 2;
    int i0 = 1;
    double rate = 0.0;
    std::size_t max_samples = 4096;
};

inline int run_decompose(const DecomposeArgs& a) {
    if (a.atoms < 1) throw UsageError("--atoms must be >= 1");
    if (!(a.cc_thresh > 0.0 && a.cc_thresh < 1.0))
        throw UsageError("--cc-thresh must lie in (0, 1)");
    if (a.em_passes < 0) throw UsageError("--em-passes must be >= 0");
    if (a.radix < 2) throw UsageError("--radix must be >= 2");
    if (a.i0 < 0) throw UsageError("--i0 must be >= 0");

    LoadedSignal in = load_by_extension(a.input);
    if (!in.warning.empty()) std::cerr << "warning: " << in.warning << '\n';
    if (a.rate > 0.0) in.sample_rate_hz = a.rate;
    if (in.samples.size() > a.max_samples)
        throw InvalidInputError(
            "signal has " + std::to_string(in.samples.size()) + " samples (cap " +
            std::to_string(a.max_samples) +
            "); decimate or segment it first, or raise --max-samples");

    const AnalyticSignal f = make_analytic(in.samples, in.sample_rate_hz);
    const Dictionary dict(
        DictionaryConfig{in.samples.size(), a.radix, a.i0});
    EstimatorOptions opts;
    opts.max_atoms = a.atoms;
    opts.cc_threshold = a.cc_thresh;
    opts.em_passes = a.em_passes;

    const Decomposition dec = mpem_decompose(f, dict, opts);
    save_decomposition(dec, a.output);
    if (dec.degenerate_input)
        std::cerr << "warning: all-zero input; wrote an empty decomposition\n";

    const double in_e = dec.residual_energy_trace.front();
    const double out_e = dec.residual_energy_trace.back();
    std::printf("%zu atoms; residual energy %.6g (%.3g%% of input)\n",
                dec.atoms.size(), out_e, in_e > 0.0 ? 100.0 * out_e / in_e : 0.0);
    return 0;
}

struct SynthArgs {
    std::string input, output;
};

inline int run_synth(const SynthArgs& a) {
    const Decomposition dec = load_decomposition(a.input);
    const AnalyticSignal rec = reconstruct(dec);
    std::vector<double> real_part(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) real_part[i] = rec.samples[i].real();

    if (extension(a.output) == ".wav") {
        double rate = dec.sample_rate_hz;
        if (!(rate > 0.0)) {
            rate = 8000.0;
            std::cerr << "warning: decomposition carries no sample rate; writing "
                         "8000 Hz\n";
        }
        write_wav(a.output, real_part, rate);
    } else {
        write_signal_csv(a.output, real_part, dec.sample_rate_hz);
    }
    std::printf("wrote %zu samples from %zu atoms\n", real_part.size(),
                dec.atoms.size());
    return 0;
}

struct RenderArgs {
    std::string input, output;
    bool use_acs = false;
    bool use_stft = false;
    std::size_t window = 11;
    std::size_t hop = 1;
    double rate = 0.0;
};

inline int run_render(const RenderArgs& a) {
    const bool json_in = extension(a.input) == ".json";
    TFGrid grid;
    if (a.use_acs) {
        if (!json_in)
            throw UsageError("--acs renders a decomposition; pass a .json file");
        const Decomposition dec = load_decomposition(a.input);
        grid = acs(dec, TFGridSpec{dec.n_samples});
    } else {
        AnalyticSignal f;
        if (json_in) {
            f = reconstruct(load_decomposition(a.input));
        } else {
            LoadedSignal in = load_by_extension(a.input);
            if (!in.warning.empty()) std::cerr << "warning: " << in.warning << '\n';
            if (a.rate > 0.0) in.sample_rate_hz = a.rate;
            f = make_analytic(in.samples, in.sample_rate_hz);
        }
        grid = stft_spectrogram(f, a.window, a.hop);
    }
    if (grid.clipped)
        std::cerr << "warning: grid does not cover the full atom support\n";
    export_grid(grid, a.output,
                extension(a.output) == ".png" ? GridFormat::png : GridFormat::csv);
    std::printf("wrote %zux%zu grid\n", grid.n_freq(), grid.n_time());
    return 0;
}

struct BenchArgs {
    std::vector<double> snr;
    std::size_t trials = 100;
    std::size_t boot = 1000;
    std::uint64_t seed = 1;
    std::size_t n = 256;
    std::string output;
};

inline int run_bench(const BenchArgs& a) {
    if (a.trials < 2) throw UsageError("--trials must be >= 2");
    if (a.boot < 1) throw UsageError("--boot must be >= 1");
    BenchConfig cfg;
    if (!a.snr.empty()) cfg.snr_list = a.snr;
    cfg.trials_per_snr = a.trials;
    cfg.bootstrap_n = a.boot;
    cfg.seed = a.seed;
    cfg.n_samples = a.n;

    const RobustnessReport rep = run_robustness_experiment(cfg);
    std::cout << report_text(rep);
    if (!a.output.empty()) {
        std::ofstream out(a.output);
        if (!out) throw IoError("bench: cannot open " + a.output);
        out << report_csv(rep);
        out.flush();
        if (!out) throw IoError("bench: write failed for " + a.output);
    }
    return 0;
}

struct InfoArgs {
    std::string input;
};

inline int run_info(const InfoArgs& a) {
    const Decomposition dec = load_decomposition(a.input);
    std::printf("n_samples: %zu\nsample_rate_hz: %g\nradix: %d\ni0: %d\n"
                "cc_threshold: %g\natoms: %zu\n",
                dec.n_samples, dec.sample_rate_hz, dec.radix,
                dec.first_rotated_level, dec.cc_threshold, dec.atoms.size());
    if (dec.atoms.empty()) return 0;
    std::printf("%4s %12s %12s %12s %12s %12s %12s %10s\n", "#", "amp", "phase",
                "tc", "fc", "c", "dt", "cc");
    for (std::size_t i = 0; i < dec.atoms.size(); ++i) {
        const ChirpletAtom& at = dec.atoms[i];
        std::printf("%4zu %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g %10.4g\n", i,
                    std::abs(at.coeff), std::arg(at.coeff), at.params.tc,
                    at.params.fc, at.params.c, at.params.dt, at.cc);
    }
    return 0;
}

}  // namespace cli

inline int cli_main(int argc, char** argv) {
    CLI::App app{"sparse chirplet decomposition and time-frequency rendering"};
    app.require_subcommand(1);

    cli::DecomposeArgs da;
    CLI::App* dc = app.add_subcommand(
        "decompose", "estimate a chirplet decomposition of a signal file");
    dc->add_option("input", da.input, "input signal (.wav or .csv)")->required();
    dc->add_option("-o,--output", da.output, "output decomposition (.json)")->required();
    dc->add_option("--atoms", da.atoms, "maximum number of atoms");
    dc->add_option("--cc-thresh", da.cc_thresh, "coherence stopping threshold");
    dc->add_option("--em-passes", da.em_passes, "EM passes per extracted atom");
    dc->add_option("--radix", da.radix, "dictionary scale radix");
    dc->add_option("--i0", da.i0, "first rotated dictionary level");
    dc->add_option("--rate", da.rate, "override sample rate (Hz)");
    dc->add_option("--max-samples", da.max_samples, "input length cap");

    cli::SynthArgs sa;
    CLI::App* sy = app.add_subcommand(
        "synth", "reconstruct a signal from a decomposition");
    sy->add_option("input", sa.input, "decomposition (.json)")->required();
    sy->add_option("-o,--output", sa.output, "output signal (.wav or .csv)")->required();

    cli::RenderArgs ra;
    CLI::App* re = app.add_subcommand(
        "render", "render a time-frequency grid (.csv or .png)");
    re->add_option("input", ra.input, "decomposition (.json) or signal file")->required();
    CLI::Option* acs_flag = re->add_flag("--acs", ra.use_acs,
                                         "adaptive chirplet spectrogram");
    CLI::Option* stft_flag = re->add_flag("--stft", ra.use_stft,
                                          "short-time Fourier spectrogram");
    acs_flag->excludes(stft_flag);
    stft_flag->excludes(acs_flag);
    re->add_option("--window", ra.window, "STFT window length (odd)");
    re->add_option("--hop", ra.hop, "STFT hop (samples)");
    re->add_option("--rate", ra.rate, "override sample rate (Hz)");
    re->add_option("-o,--output", ra.output, "output grid (.csv or .png)")->required();

    cli::BenchArgs ba;
    CLI::App* be = app.add_subcommand(
        "bench", "noise-robustness benchmark against the Gabor-first baseline");
    be->add_option("--snr", ba.snr, "SNR list in dB")->delimiter(',');
    be->add_option("--trials", ba.trials, "trials per SNR");
    be->add_option("--boot", ba.boot, "bootstrap resamples");
    be->add_option("--seed", ba.seed, "master seed");
    be->add_option("--n", ba.n, "signal length");
    be->add_option("-o,--output", ba.output, "report CSV path");

    cli::InfoArgs ia;
    CLI::App* in = app.add_subcommand("info", "print a decomposition's atom table");
    in->add_option("input", ia.input, "decomposition (.json)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (dc->parsed()) return cli::run_decompose(da);
        if (sy->parsed()) return cli::run_synth(sa);
        if (re->parsed()) {
            if (!ra.use_acs && !ra.use_stft)
                throw cli::UsageError("render needs --acs or --stft");
            return cli::run_render(ra);
        }
        if (be->parsed()) return cli::run_bench(ba);
        if (in->parsed()) return cli::run_info(ia);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace chirplet

#endif  // CHIRPLET_CLI_HPP
