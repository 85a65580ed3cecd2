#ifndef CHIRPLET_IO_HPP
#define CHIRPLET_IO_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "chirplet/decomposition.hpp"
#include "chirplet/errors.hpp"
#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/spectra.hpp"

namespace chirplet {

enum class SignalFormat { wav, csv };

struct LoadedSignal {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    std::string warning;  // non-fatal notes (e.g. extra channels dropped)
};

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline std::uint32_t read_u32le(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) |
           (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

inline std::uint16_t read_u16le(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] |
                                      (static_cast<std::uint16_t>(b[at + 1]) << 8));
}

}  // namespace detail

// RIFF/WAVE reader for PCM16 and IEEE-float32; extra channels beyond the
// first are dropped with a warning. PCM samples scale by 1/32768.
inline LoadedSignal load_wav(const std::string& path) {
    const auto b = detail::read_file_bytes(path);
    auto need = [&](std::size_t at, std::size_t count) {
        if (at + count > b.size())
            throw ParseError("wav: truncated file", at);
    };
    need(0, 12);
    if (std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
        throw ParseError("wav: missing RIFF/WAVE signature", 0);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    LoadedSignal out;

    std::size_t at = 12;
    while (at + 8 <= b.size()) {
        const std::size_t id_at = at;
        need(at, 8);
        char id[5] = {};
        std::memcpy(id, b.data() + at, 4);
        const std::uint32_t size = detail::read_u32le(b, at + 4);
        at += 8;
        need(at, size);

        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw ParseError("wav: fmt chunk too small", id_at);
            format = detail::read_u16le(b, at);
            channels = detail::read_u16le(b, at + 2);
            rate = detail::read_u32le(b, at + 4);
            bits = detail::read_u16le(b, at + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (!have_fmt) throw ParseError("wav: data chunk before fmt", id_at);
            if (channels == 0) throw ParseError("wav: zero channels", id_at);
            const bool pcm16 = format == 1 && bits == 16;
            const bool f32 = format == 3 && bits == 32;
            if (!pcm16 && !f32)
                throw FormatError("wav: unsupported encoding (need PCM16 or float32)");
            const std::size_t bytes_per = bits / 8u;
            const std::size_t frame = bytes_per * channels;
            const std::size_t frames = size / frame;
            out.samples.resize(frames);
            for (std::size_t i = 0; i < frames; ++i) {
                const std::size_t s = at + i * frame;  // first channel
                if (pcm16) {
                    const auto u = detail::read_u16le(b, s);
                    out.samples[i] = static_cast<std::int16_t>(u) / 32768.0;
                } else {
                    const std::uint32_t u = detail::read_u32le(b, s);
                    float f;
                    std::memcpy(&f, &u, 4);
                    out.samples[i] = f;
                }
            }
            out.sample_rate_hz = rate;
            if (channels > 1)
                out.warning = "wav: " + std::to_string(channels) +
                              " channels; kept the first only";
            return out;
        }
        at += size + (size % 2);  // chunks are word-aligned
    }
    throw ParseError("wav: no data chunk", b.size());
}

// One sample per line; `# rate=<hz>` comment lines set the sample rate,
// other `#` lines and blank lines are skipped.
inline LoadedSignal load_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    LoadedSignal out;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t line_at = offset;
        offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t eq = line.find("rate=");
            if (eq != std::string::npos) {
                char* end = nullptr;
                const double r = std::strtod(line.c_str() + eq + 5, &end);
                if (end != line.c_str() + eq + 5 && r > 0.0) out.sample_rate_hz = r;
            }
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str())
            throw ParseError("csv: not a number: '" + line + "'", line_at);
        while (*end == ' ' || *end == '\t') ++end;
        if (*end != '\0')
            throw ParseError("csv: trailing junk on line: '" + line + "'", line_at);
        if (!std::isfinite(v))
            throw ParseError("csv: non-finite sample", line_at);
        out.samples.push_back(v);
    }
    return out;
}

inline LoadedSignal load_signal(const std::string& path, SignalFormat format) {
    return format == SignalFormat::wav ? load_wav(path) : load_signal_csv(path);
}

// Mono PCM16 writer; samples are rounded from round(x * 32768) and clamped,
// the mirror of the reader's scaling.
inline void write_wav(const std::string& path, const std::vector<double>& samples,
                      double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0))
        throw InvalidInputError("write_wav: sample rate must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_wav: cannot open " + path);

    auto put_u32 = [&](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                           static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
        out.write(b, 4);
    };
    auto put_u16 = [&](std::uint16_t v) {
        const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
        out.write(b, 2);
    };

    const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(sample_rate_hz));
    out.write("RIFF", 4);
    put_u32(36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(rate);
    put_u32(rate * 2);
    put_u16(2);
    put_u16(16);
    out.write("data", 4);
    put_u32(data_size);
    for (double x : samples) {
        const long v = std::lround(
            std::clamp(x * 32768.0, -32768.0, 32767.0));
        put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    out.flush();
    if (!out) throw IoError("write_wav: write failed for " + path);
}

inline void write_signal_csv(const std::string& path,
                             const std::vector<double>& samples,
                             double sample_rate_hz) {
    std::ofstream out(path);
    if (!out) throw IoError("write_signal_csv: cannot open " + path);
    if (sample_rate_hz > 0.0)
        out << "# rate=" << detail::format_real(sample_rate_hz) << '\n';
    for (double v : samples) out << detail::format_real(v) << '\n';
    out.flush();
    if (!out) throw IoError("write_signal_csv: write failed for " + path);
}

// Anti-alias low-pass for a given decimation factor: Kaiser windowed sinc,
// cutoff 0.9*pi/factor, 32*factor - 1 taps (63 at factor 2), unit DC gain.
// The tap count scales with the factor because the transition band
// (0.9..1.0 of the output Nyquist) narrows as 1/factor; the fixed Kaiser
// shape then keeps the stopband at roughly -50 dB for every factor.
inline std::vector<double> decimation_filter(std::size_t factor) {
    if (factor < 2) throw InvalidInputError("decimate: factor must be >= 2");
    const std::size_t taps = 32 * factor - 1;
    const std::size_t mid = taps / 2;
    const double beta = 4.55;
    const double cutoff = 0.9 * std::numbers::pi / static_cast<double>(factor);
    const double i0_beta = std::cyl_bessel_i(0.0, beta);

    std::vector<double> h(taps);
    double sum = 0.0;
    for (std::size_t k = 0; k < taps; ++k) {
        const double d = static_cast<double>(k) - static_cast<double>(mid);
        const double sinc = d == 0.0 ? cutoff / std::numbers::pi
                                     : std::sin(cutoff * d) / (std::numbers::pi * d);
        const double r = d / static_cast<double>(mid);
        const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
        h[k] = sinc * win;
        sum += h[k];
    }
    for (double& v : h) v /= sum;
    return h;
}

// Zero-phase anti-aliased downsampling: filter with edge replication, then
// keep every factor-th sample. Output length is ceil(len / factor).
inline std::vector<double> decimate(const std::vector<double>& x, std::size_t factor) {
    const std::vector<double> h = decimation_filter(factor);
    if (x.empty()) return {};
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t mid = static_cast<std::ptrdiff_t>(h.size() / 2);
    std::vector<double> out((x.size() + factor - 1) / factor);
    for (std::size_t m = 0; m < out.size(); ++m) {
        const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(m * factor);
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(
                center + mid - static_cast<std::ptrdiff_t>(k), 0, n - 1);
            acc += h[k] * x[static_cast<std::size_t>(idx)];
        }
        out[m] = acc;
    }
    return out;
}

// --- decomposition interchange format -------------------------------------
//
// JSON document: a header {format_version, n_samples, sample_rate_hz,
// radix, i0, cc_threshold, atom_count} plus one record per atom holding the
// six estimation reals {amp, phase_rad, tc_samples, fc_rad_per_sample,
// c_rad_per_sample2, dt_samples} and the diagnostic cc.

inline constexpr int kDecompositionFormatVersion = 1;

inline void save_decomposition(const Decomposition& d, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kDecompositionFormatVersion;
    j["n_samples"] = d.n_samples;
    j["sample_rate_hz"] = d.sample_rate_hz;
    j["radix"] = d.radix;
    j["i0"] = d.first_rotated_level;
    j["cc_threshold"] = d.cc_threshold;
    j["atom_count"] = d.atoms.size();

    nlohmann::json atoms = nlohmann::json::array();
    for (const ChirpletAtom& a : d.atoms) {
        // Canonicalize (amp, phase) to a fixed point of polar -> abs/arg so
        // that a save/load/save cycle is byte-stable.
        double amp = std::abs(a.coeff), phase = std::arg(a.coeff);
        for (int i = 0; i < 4; ++i) {
            const std::complex<double> z = std::polar(amp, phase);
            const double a2 = std::abs(z), p2 = std::arg(z);
            if (a2 == amp && p2 == phase) break;
            amp = a2;
            phase = p2;
        }
        atoms.push_back({{"amp", amp},
                         {"phase_rad", phase},
                         {"tc_samples", a.params.tc},
                         {"fc_rad_per_sample", a.params.fc},
                         {"c_rad_per_sample2", a.params.c},
                         {"dt_samples", a.params.dt},
                         {"cc", a.cc}});
    }
    j["atoms"] = std::move(atoms);

    std::ofstream out(path);
    if (!out) throw IoError("save_decomposition: cannot open " + path);
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("save_decomposition: write failed for " + path);
}

inline Decomposition load_decomposition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_decomposition: cannot open " + path);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("load_decomposition: ") + e.what(),
                         e.byte > 0 ? e.byte - 1 : 0);
    }

    auto require = [&](const nlohmann::json& o, const char* key) -> const nlohmann::json& {
        if (!o.contains(key))
            throw FormatError(std::string("load_decomposition: missing field '") + key +
                              "'");
        return o.at(key);
    };
    auto number = [&](const nlohmann::json& o, const char* key) {
        const nlohmann::json& v = require(o, key);
        if (!v.is_number())
            throw FormatError(std::string("load_decomposition: field '") + key +
                              "' is not a number");
        return v.get<double>();
    };

    if (require(j, "format_version").get<std::int64_t>() != kDecompositionFormatVersion)
        throw FormatError("load_decomposition: unsupported format version");

    Decomposition d;
    d.n_samples = require(j, "n_samples").get<std::size_t>();
    d.sample_rate_hz = number(j, "sample_rate_hz");
    d.radix = require(j, "radix").get<int>();
    d.first_rotated_level = require(j, "i0").get<int>();
    d.cc_threshold = number(j, "cc_threshold");
    if (d.n_samples < kMinSignalLength)
        throw FormatError("load_decomposition: n_samples too small");
    if (d.radix < 2 || d.first_rotated_level < 0)
        throw FormatError("load_decomposition: bad lattice header");

    const nlohmann::json& atoms = require(j, "atoms");
    if (!atoms.is_array())
        throw FormatError("load_decomposition: 'atoms' is not an array");
    if (require(j, "atom_count").get<std::size_t>() != atoms.size())
        throw FormatError("load_decomposition: atom_count does not match atom list");

    for (const nlohmann::json& rec : atoms) {
        ChirpletAtom a;
        const double amp = number(rec, "amp");
        const double phase = number(rec, "phase_rad");
        a.params.tc = number(rec, "tc_samples");
        a.params.fc = number(rec, "fc_rad_per_sample");
        a.params.c = number(rec, "c_rad_per_sample2");
        a.params.dt = number(rec, "dt_samples");
        a.cc = number(rec, "cc");
        if (!(amp >= 0.0) || !(a.params.dt > kMinTimeSpread) ||
            !(a.params.tc >= 0.0 && a.params.tc < static_cast<double>(d.n_samples)) ||
            !std::isfinite(a.params.fc) || !std::isfinite(a.params.c) ||
            !std::isfinite(phase))
            throw FormatError("load_decomposition: atom record out of range");
        a.coeff = std::polar(amp, phase);
        d.atoms.push_back(a);
    }
    return d;
}

}  // namespace chirplet

#endif  // CHIRPLET_IO_HPP
