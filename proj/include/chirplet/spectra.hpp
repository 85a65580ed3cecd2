#ifndef CHIRPLET_SPECTRA_HPP
#define CHIRPLET_SPECTRA_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "chirplet/decomposition.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/fft.hpp"
#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/png.hpp"
#include "chirplet/signal.hpp"

namespace chirplet {

// Non-negative time-frequency raster. Row-major by frequency:
// values[fi * n_time + ti], both axes ascending.
struct TFGrid {
    std::vector<double> values;
    std::vector<double> time_axis;  // samples
    std::vector<double> freq_axis;  // rad/sample
    std::string meta;
    bool clipped = false;  // an atom's support spilled off the grid

    std::size_t n_time() const { return time_axis.size(); }
    std::size_t n_freq() const { return freq_axis.size(); }
    double at(std::size_t fi, std::size_t ti) const {
        return values[fi * n_time() + ti];
    }
};

// Raster layout request. Zero counts and NaN spans pick the defaults:
// n_time = N over [0, N-1], n_freq = N/2 + 1 over [0, pi] (an analytic
// signal carries no energy outside that band).
struct TFGridSpec {
    std::size_t n_samples = 0;
    std::size_t n_time = 0;
    std::size_t n_freq = 0;
    double t_min = std::numeric_limits<double>::quiet_NaN();
    double t_max = std::numeric_limits<double>::quiet_NaN();
    double f_min = std::numeric_limits<double>::quiet_NaN();
    double f_max = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline TFGrid make_grid(const TFGridSpec& spec) {
    if (spec.n_samples < kMinSignalLength)
        throw InvalidInputError("TFGridSpec: n_samples too small");
    const std::size_t nt = spec.n_time ? spec.n_time : spec.n_samples;
    const std::size_t nf = spec.n_freq ? spec.n_freq : spec.n_samples / 2 + 1;
    if (nt < 2 || nf < 2)
        throw InvalidInputError("TFGridSpec: need at least 2 cells per axis");
    const double t0 = std::isnan(spec.t_min) ? 0.0 : spec.t_min;
    const double t1 = std::isnan(spec.t_max) ? static_cast<double>(spec.n_samples - 1)
                                             : spec.t_max;
    const double f0 = std::isnan(spec.f_min) ? 0.0 : spec.f_min;
    const double f1 = std::isnan(spec.f_max) ? std::numbers::pi : spec.f_max;
    if (!(t0 < t1) || !(f0 < f1))
        throw InvalidInputError("TFGridSpec: axis span is empty");

    TFGrid g;
    g.time_axis.resize(nt);
    for (std::size_t i = 0; i < nt; ++i)
        g.time_axis[i] = t0 + (t1 - t0) * static_cast<double>(i) /
                                  static_cast<double>(nt - 1);
    g.freq_axis.resize(nf);
    for (std::size_t i = 0; i < nf; ++i)
        g.freq_axis[i] = f0 + (f1 - f0) * static_cast<double>(i) /
                                  static_cast<double>(nf - 1);
    g.values.assign(nt * nf, 0.0);
    return g;
}

// Shortest decimal that reparses to the same double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// Wigner-Ville distribution of one estimated chirplet in closed form,
//   W(t, w) = 2 |a|^2 exp(-((t - tc)/dt)^2 - dt^2 (w - fc - 2c(t - tc))^2),
// a non-negative Gaussian ridge along the instantaneous frequency
// fc + 2c(t - tc). Its plane integral is 2*pi*|a|^2, so the grid sum times
// the cell area over 2*pi recovers |a|^2; `clipped` is set when more than
// ~2% of that mass fell outside the raster.
inline TFGrid chirplet_wvd(const ChirpletAtom& atom, const TFGridSpec& spec) {
    TFGrid g = detail::make_grid(spec);
    const ChirpletParams& p = atom.params;
    if (!(p.dt > kMinTimeSpread))
        throw InvalidInputError("chirplet_wvd: invalid time spread");

    const std::size_t nt = g.n_time(), nf = g.n_freq();
    const double a2 = std::norm(atom.coeff);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double t = g.time_axis[ti];
        const double u = (t - p.tc) / p.dt;
        if (std::abs(u) > 26.0) continue;  // envelope underflows
        const double eu = 2.0 * a2 * std::exp(-u * u);
        const double ridge = p.fc + 2.0 * p.c * (t - p.tc);
        for (std::size_t fi = 0; fi < nf; ++fi) {
            const double w = p.dt * (g.freq_axis[fi] - ridge);
            if (std::abs(w) > 26.0) continue;
            g.values[fi * nt + ti] = eu * std::exp(-w * w);
        }
    }

    const double cell_t = g.time_axis[1] - g.time_axis[0];
    const double cell_f = g.freq_axis[1] - g.freq_axis[0];
    double mass = 0.0;
    for (double v : g.values) mass += v;
    mass *= cell_t * cell_f / (2.0 * std::numbers::pi);
    g.clipped = a2 > 0.0 && mass < 0.98 * a2;
    g.meta = "wvd";
    return g;
}

// Adaptive chirplet spectrogram: the plain sum of each atom's closed-form
// WVD. No cross-terms arise because each term is rendered separately.
inline TFGrid acs(const Decomposition& d, const TFGridSpec& spec) {
    TFGrid g = detail::make_grid(spec);
    g.meta = "acs";
    for (const ChirpletAtom& atom : d.atoms) {
        const TFGrid w = chirplet_wvd(atom, spec);
        for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += w.values[i];
        g.clipped = g.clipped || w.clipped;
    }
    return g;
}

// Magnitude-squared STFT with a Gaussian window (sigma = window_len/6),
// frames centered every `hop` samples, transform length N. Values are
// scaled by hop/(N * sum(window^2)) so the grid total approximates the
// signal energy for unit hop (band-limited content assumed — the grid only
// keeps the non-negative-frequency bins an analytic signal occupies).
inline TFGrid stft_spectrogram(const AnalyticSignal& f, std::size_t window_len,
                               std::size_t hop) {
    const std::size_t n = f.size();
    if (n < kMinSignalLength)
        throw InvalidInputError("stft_spectrogram: signal too short");
    if (window_len < 3 || window_len % 2 == 0)
        throw InvalidInputError("stft_spectrogram: window length must be odd and >= 3");
    if (window_len > n)
        throw InvalidInputError("stft_spectrogram: window longer than signal");
    if (hop < 1) throw InvalidInputError("stft_spectrogram: hop must be >= 1");

    const std::size_t half = window_len / 2;
    const double sigma = static_cast<double>(window_len) / 6.0;
    std::vector<double> w(window_len);
    double wsum2 = 0.0;
    for (std::size_t j = 0; j < window_len; ++j) {
        const double d = (static_cast<double>(j) - static_cast<double>(half)) / sigma;
        w[j] = std::exp(-0.5 * d * d);
        wsum2 += w[j] * w[j];
    }

    const std::size_t nf = n / 2 + 1;
    const std::size_t frames = (n + hop - 1) / hop;
    TFGrid g;
    g.freq_axis.resize(nf);
    for (std::size_t k = 0; k < nf; ++k)
        g.freq_axis[k] = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    g.time_axis.resize(frames);
    g.values.assign(nf * frames, 0.0);

    const Fft fft(n);
    std::vector<std::complex<double>> buf(n), spec(n);
    const double scale =
        static_cast<double>(hop) / (static_cast<double>(n) * wsum2);
    for (std::size_t ti = 0; ti < frames; ++ti) {
        const std::size_t center = ti * hop;
        g.time_axis[ti] = static_cast<double>(center);
        std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
        for (std::size_t j = 0; j < window_len; ++j) {
            const std::ptrdiff_t idx =
                static_cast<std::ptrdiff_t>(center + j) - static_cast<std::ptrdiff_t>(half);
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
                buf[j] = f.samples[static_cast<std::size_t>(idx)] * w[j];
        }
        fft.forward_into(buf, spec);
        for (std::size_t k = 0; k < nf; ++k)
            g.values[k * frames + ti] = scale * std::norm(spec[k]);
    }
    g.meta = "stft window=" + std::to_string(window_len) + " hop=" +
             std::to_string(hop) + " scale=hop/(nfft*sum(w^2))";
    return g;
}

enum class GridFormat { csv, png };

// CSV layout: first row is the time axis (corner cell empty), each
// following row is one frequency value followed by that row of the grid,
// all at full double precision. PNG: single-channel 8-bit, log display
// with the grid maximum at 0 dB mapped to 255 and a -60 dB floor mapped
// to 0; rows are flipped so low frequencies sit at the bottom.
inline void export_grid(const TFGrid& g, const std::string& path, GridFormat fmt) {
    const std::size_t nt = g.n_time(), nf = g.n_freq();
    if (nt == 0 || nf == 0 || g.values.size() != nt * nf)
        throw InvalidInputError("export_grid: inconsistent grid");

    if (fmt == GridFormat::csv) {
        std::ofstream out(path);
        if (!out) throw IoError("export_grid: cannot open " + path);
        for (std::size_t ti = 0; ti < nt; ++ti)
            out << ',' << detail::format_real(g.time_axis[ti]);
        out << '\n';
        for (std::size_t fi = 0; fi < nf; ++fi) {
            out << detail::format_real(g.freq_axis[fi]);
            for (std::size_t ti = 0; ti < nt; ++ti)
                out << ',' << detail::format_real(g.values[fi * nt + ti]);
            out << '\n';
        }
        out.flush();
        if (!out) throw IoError("export_grid: write failed for " + path);
        return;
    }

    const double peak = *std::max_element(g.values.begin(), g.values.end());
    std::vector<std::uint8_t> px(nt * nf);
    for (std::size_t y = 0; y < nf; ++y) {
        const std::size_t fi = nf - 1 - y;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const double v = g.values[fi * nt + ti];
            double db = (peak > 0.0 && v > 0.0) ? 10.0 * std::log10(v / peak) : -60.0;
            db = std::clamp(db, -60.0, 0.0);
            px[y * nt + ti] =
                static_cast<std::uint8_t>(std::lround(255.0 * (db + 60.0) / 60.0));
        }
    }
    write_gray_png(path, nt, nf, px);
}

// Reads back the CSV layout written by export_grid.
inline TFGrid import_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("import_grid_csv: cannot open " + path);

    TFGrid g;
    std::string line;
    std::size_t offset = 0;
    auto parse_fields = [&](const std::string& s, std::size_t line_off) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = s.find(',', start);
            out.push_back(s.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        (void)line_off;
        return out;
    };
    auto to_real = [&](const std::string& s, std::size_t at) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ParseError("import_grid_csv: bad number '" + s + "'", at);
        return v;
    };

    if (!std::getline(in, line))
        throw ParseError("import_grid_csv: empty file", 0);
    {
        const auto fields = parse_fields(line, 0);
        if (fields.size() < 3 || !fields[0].empty())
            throw ParseError("import_grid_csv: malformed header row", 0);
        for (std::size_t i = 1; i < fields.size(); ++i)
            g.time_axis.push_back(to_real(fields[i], offset));
    }
    offset += line.size() + 1;

    const std::size_t nt = g.time_axis.size();
    while (std::getline(in, line)) {
        if (line.empty()) break;
        const auto fields = parse_fields(line, offset);
        if (fields.size() != nt + 1)
            throw ParseError("import_grid_csv: row width mismatch", offset);
        g.freq_axis.push_back(to_real(fields[0], offset));
        for (std::size_t i = 1; i < fields.size(); ++i)
            g.values.push_back(to_real(fields[i], offset));
        offset += line.size() + 1;
    }
    if (g.freq_axis.empty())
        throw ParseError("import_grid_csv: no data rows", offset);
    g.meta = "csv:" + path;
    return g;
}

}  // namespace chirplet

#endif  // CHIRPLET_SPECTRA_HPP
