#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "chirplet/io.hpp"

using namespace chirplet;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size()));
}

void push_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v >> 16));
    b.push_back(static_cast<std::uint8_t>(v >> 24));
}

void push_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void push_tag(std::vector<std::uint8_t>& b, const char* tag) {
    b.insert(b.end(), tag, tag + 4);
}

// Minimal RIFF/WAVE container built by hand, the byte-level oracle for the
// reader.
std::vector<std::uint8_t> make_wav(std::uint16_t format, std::uint16_t channels,
                                   std::uint32_t rate, std::uint16_t bits,
                                   const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> b;
    push_tag(b, "RIFF");
    push_u32(b, 36 + static_cast<std::uint32_t>(data.size()));
    push_tag(b, "WAVE");
    push_tag(b, "fmt ");
    push_u32(b, 16);
    push_u16(b, format);
    push_u16(b, channels);
    push_u32(b, rate);
    push_u32(b, rate * channels * bits / 8);
    push_u16(b, static_cast<std::uint16_t>(channels * bits / 8));
    push_u16(b, bits);
    push_tag(b, "data");
    push_u32(b, static_cast<std::uint32_t>(data.size()));
    b.insert(b.end(), data.begin(), data.end());
    return b;
}

}  // namespace

TEST_CASE("PCM16 WAV samples decode at the documented scale") {
    const std::int16_t raw[6] = {16384, -16384, 32767, -32768, 0, 1};
    std::vector<std::uint8_t> data;
    for (std::int16_t v : raw) push_u16(data, static_cast<std::uint16_t>(v));

    const auto path = temp_file("chirplet_io_pcm16.wav");
    write_bytes(path, make_wav(1, 1, 8000, 16, data));
    const LoadedSignal s = load_wav(path.string());
    REQUIRE(s.samples.size() == 6);
    REQUIRE(s.sample_rate_hz == 8000.0);
    REQUIRE(s.warning.empty());
    REQUIRE(s.samples[0] == 0.5);
    REQUIRE(s.samples[1] == -0.5);
    REQUIRE(s.samples[2] == 32767.0 / 32768.0);
    REQUIRE(s.samples[3] == -1.0);
    REQUIRE(s.samples[4] == 0.0);
    REQUIRE(s.samples[5] == 1.0 / 32768.0);
    std::filesystem::remove(path);
}

TEST_CASE("float32 WAV samples decode bit-exactly") {
    const float raw[4] = {0.25f, -1.5f, 0.0f, 1.0e-3f};
    std::vector<std::uint8_t> data;
    for (float v : raw) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        push_u32(data, u);
    }
    const auto path = temp_file("chirplet_io_f32.wav");
    write_bytes(path, make_wav(3, 1, 44100, 32, data));
    const LoadedSignal s = load_wav(path.string());
    REQUIRE(s.samples.size() == 4);
    REQUIRE(s.sample_rate_hz == 44100.0);
    for (int i = 0; i < 4; ++i)
        REQUIRE(s.samples[static_cast<std::size_t>(i)] ==
                static_cast<double>(raw[i]));
    std::filesystem::remove(path);
}

TEST_CASE("multichannel WAV keeps the first channel and warns") {
    std::vector<std::uint8_t> data;
    // interleaved L/R frames: L = 100, 200, 300
    for (std::int16_t v : {100, -1, 200, -2, 300, -3})
        push_u16(data, static_cast<std::uint16_t>(v));
    const auto path = temp_file("chirplet_io_stereo.wav");
    write_bytes(path, make_wav(1, 2, 16000, 16, data));
    const LoadedSignal s = load_wav(path.string());
    REQUIRE(s.samples.size() == 3);
    REQUIRE(s.samples[0] == 100.0 / 32768.0);
    REQUIRE(s.samples[1] == 200.0 / 32768.0);
    REQUIRE(s.samples[2] == 300.0 / 32768.0);
    REQUIRE_FALSE(s.warning.empty());
    std::filesystem::remove(path);
}

TEST_CASE("malformed WAV files are rejected") {
    const auto path = temp_file("chirplet_io_bad.wav");

    std::vector<std::uint8_t> good = make_wav(1, 1, 8000, 16, {0, 0, 0, 0});
    good.resize(good.size() - 2);  // truncate inside the data chunk
    write_bytes(path, good);
    REQUIRE_THROWS_AS(load_wav(path.string()), ParseError);

    std::vector<std::uint8_t> magic = make_wav(1, 1, 8000, 16, {0, 0});
    magic[0] = 'X';
    write_bytes(path, magic);
    REQUIRE_THROWS_AS(load_wav(path.string()), ParseError);

    write_bytes(path, make_wav(1, 1, 8000, 8, {0, 0}));  // PCM8
    REQUIRE_THROWS_AS(load_wav(path.string()), FormatError);

    // data chunk before any fmt chunk
    std::vector<std::uint8_t> swapped;
    push_tag(swapped, "RIFF");
    push_u32(swapped, 4 + 8 + 2);
    push_tag(swapped, "WAVE");
    push_tag(swapped, "data");
    push_u32(swapped, 2);
    push_u16(swapped, 0);
    write_bytes(path, swapped);
    REQUIRE_THROWS_AS(load_wav(path.string()), ParseError);

    REQUIRE_THROWS_AS(load_wav("/nonexistent/chirplet.wav"), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("WAV writer round-trips values on the PCM lattice") {
    std::vector<double> x;
    for (int k : {0, 1, -1, 16384, -32768, 32767, 12345, -777})
        x.push_back(k / 32768.0);
    const auto path = temp_file("chirplet_io_rt.wav");
    write_wav(path.string(), x, 8000.0);
    const LoadedSignal s = load_wav(path.string());
    REQUIRE(s.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(s.samples[i] == x[i]);

    // out-of-range input clamps instead of wrapping
    write_wav(path.string(), {2.0, -2.0}, 8000.0);
    const LoadedSignal c = load_wav(path.string());
    REQUIRE(c.samples[0] == 32767.0 / 32768.0);
    REQUIRE(c.samples[1] == -1.0);

    REQUIRE_THROWS_AS(write_wav(path.string(), x, 0.0), InvalidInputError);
    std::filesystem::remove(path);
}

TEST_CASE("signal CSV reader: values, rate header, comments") {
    const auto path = temp_file("chirplet_io_sig.csv");
    {
        std::ofstream out(path);
        out << "# a comment\n# rate=44100\n1.0\n-1.0\n\n2.5e-3\n";
    }
    const LoadedSignal s = load_signal_csv(path.string());
    REQUIRE(s.samples == std::vector<double>{1.0, -1.0, 2.5e-3});
    REQUIRE(s.sample_rate_hz == 44100.0);

    {
        std::ofstream out(path);
        out << "1.0\npotato\n";
    }
    try {
        load_signal_csv(path.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.byte_offset == 4);  // start of the bad line
    }

    {
        std::ofstream out(path);
        out << "inf\n";
    }
    REQUIRE_THROWS_AS(load_signal_csv(path.string()), ParseError);

    {
        std::ofstream out(path);
        out << "1.0 stray\n";
    }
    REQUIRE_THROWS_AS(load_signal_csv(path.string()), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("signal CSV writer round-trips exactly") {
    const std::vector<double> x = {1.0 / 3.0, -2.718281828459045, 1e-300, 0.0,
                                   123456.789};
    const auto path = temp_file("chirplet_io_rt.csv");
    write_signal_csv(path.string(), x, 800.0);
    const LoadedSignal s = load_signal_csv(path.string());
    REQUIRE(s.sample_rate_hz == 800.0);
    REQUIRE(s.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(s.samples[i] == x[i]);  // 17 significant digits reparse exactly
}

TEST_CASE("decimation filter: DC gain, passband, stopband") {
    auto response = [](const std::vector<double>& h, double w) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < h.size(); ++k)
            acc += h[k] * std::polar(1.0, -w * static_cast<double>(k));
        return std::abs(acc);
    };
    for (std::size_t factor : {std::size_t{2}, std::size_t{3}, std::size_t{4}}) {
        const std::vector<double> h = decimation_filter(factor);
        REQUIRE(h.size() == 32 * factor - 1);
        double dc = 0.0;
        for (double v : h) dc += v;
        REQUIRE(dc == Catch::Approx(1.0).margin(1e-12));

        const double nyq = std::numbers::pi / static_cast<double>(factor);
        REQUIRE(response(h, 0.5 * nyq) > 0.99);  // passband stays flat
        double worst = 0.0;
        for (double w = 1.05 * nyq; w <= std::numbers::pi; w += 0.003)
            worst = std::max(worst, response(h, w));
        REQUIRE(worst < 0.01);  // at least 40 dB of alias rejection
    }
    REQUIRE_THROWS_AS(decimation_filter(1), InvalidInputError);
    REQUIRE_THROWS_AS(decimation_filter(0), InvalidInputError);
}

TEST_CASE("decimate: length, DC, alias suppression") {
    REQUIRE(decimate(std::vector<double>(10, 0.0), 4).size() == 3);
    REQUIRE(decimate(std::vector<double>(8, 0.0), 4).size() == 2);
    REQUIRE(decimate(std::vector<double>(9, 0.0), 2).size() == 5);
    REQUIRE(decimate({}, 2).empty());

    const std::vector<double> dc(100, 1.0);
    for (double v : decimate(dc, 4)) REQUIRE(v == Catch::Approx(1.0).margin(1e-9));

    // a tone well above the output Nyquist all but vanishes
    std::vector<double> x(512);
    for (std::size_t m = 0; m < x.size(); ++m)
        x[m] = std::cos(0.8 * std::numbers::pi * static_cast<double>(m));
    const std::vector<double> y = decimate(x, 2);
    double rms = 0.0;
    std::size_t cnt = 0;
    for (std::size_t m = 16; m + 16 < y.size(); ++m, ++cnt) rms += y[m] * y[m];
    REQUIRE(std::sqrt(rms / static_cast<double>(cnt)) < 0.01);
}

namespace {

Decomposition sample_decomposition() {
    Decomposition d;
    d.n_samples = 100;
    d.sample_rate_hz = 800.0;
    d.radix = 2;
    d.first_rotated_level = 1;
    d.cc_threshold = 0.005;
    ChirpletAtom a;
    a.params = {51.0, std::numbers::pi / 2.0, std::numbers::pi / 100.0, 100.0 / 3.0};
    a.coeff = {-0.7, 1.3};
    a.cc = 0.42;
    ChirpletAtom b;
    b.params = {20.0, 1.0, -0.004, 6.0};
    b.coeff = {0.1, 0.0};
    b.cc = 0.01;
    d.atoms = {a, b};
    return d;
}

}  // namespace

TEST_CASE("decomposition JSON round-trips") {
    const Decomposition d = sample_decomposition();
    const auto path = temp_file("chirplet_io_dec.json");
    save_decomposition(d, path.string());
    const Decomposition back = load_decomposition(path.string());

    REQUIRE(back.n_samples == d.n_samples);
    REQUIRE(back.sample_rate_hz == d.sample_rate_hz);
    REQUIRE(back.radix == d.radix);
    REQUIRE(back.first_rotated_level == d.first_rotated_level);
    REQUIRE(back.cc_threshold == d.cc_threshold);
    REQUIRE(back.atoms.size() == d.atoms.size());
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
        REQUIRE(back.atoms[i].params.tc == d.atoms[i].params.tc);
        REQUIRE(back.atoms[i].params.fc == d.atoms[i].params.fc);
        REQUIRE(back.atoms[i].params.c == d.atoms[i].params.c);
        REQUIRE(back.atoms[i].params.dt == d.atoms[i].params.dt);
        REQUIRE(std::abs(back.atoms[i].coeff - d.atoms[i].coeff) <
                1e-12 * std::abs(d.atoms[i].coeff));
        REQUIRE(back.atoms[i].cc == d.atoms[i].cc);
    }

    // save -> load -> save is byte-stable
    const auto path2 = temp_file("chirplet_io_dec2.json");
    save_decomposition(back, path2.string());
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)),
                         std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)),
                         std::istreambuf_iterator<char>());
    REQUIRE(s1 == s2);

    // empty decompositions are representable
    Decomposition none;
    none.n_samples = 64;
    save_decomposition(none, path.string());
    REQUIRE(load_decomposition(path.string()).atoms.empty());
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("atom records carry exactly six estimation numbers") {
    Decomposition d;
    d.n_samples = 2000;
    const std::size_t count = 60;
    for (std::size_t i = 0; i < count; ++i) {
        ChirpletAtom a;
        a.params = {10.0 + static_cast<double>(i * 30), 1.0 + 0.01 * static_cast<double>(i),
                    1e-4, 8.0};
        a.coeff = {1.0 / (1.0 + static_cast<double>(i)), 0.25};
        a.cc = 0.1;
        d.atoms.push_back(a);
    }
    const auto path = temp_file("chirplet_io_sixty.json");
    save_decomposition(d, path.string());

    std::ifstream in(path);
    const nlohmann::json j = nlohmann::json::parse(in);
    REQUIRE(j.at("atom_count").get<std::size_t>() == count);
    const char* estimation_keys[6] = {"amp", "phase_rad", "tc_samples",
                                      "fc_rad_per_sample", "c_rad_per_sample2",
                                      "dt_samples"};
    std::size_t reals = 0;
    for (const auto& rec : j.at("atoms")) {
        for (const char* k : estimation_keys) {
            REQUIRE(rec.contains(k));
            REQUIRE(rec.at(k).is_number());
            ++reals;
        }
        REQUIRE(rec.size() == 7);  // six estimates plus the cc diagnostic
    }
    REQUIRE(reals == 6 * count);
    std::filesystem::remove(path);
}

TEST_CASE("decomposition reader rejects broken files") {
    const auto path = temp_file("chirplet_io_broken.json");
    const Decomposition d = sample_decomposition();

    auto mutate_and_expect_format_error = [&](auto mutate) {
        save_decomposition(d, path.string());
        std::ifstream in(path);
        nlohmann::json j = nlohmann::json::parse(in);
        in.close();
        mutate(j);
        std::ofstream out(path);
        out << j.dump(2) << '\n';
        out.close();
        REQUIRE_THROWS_AS(load_decomposition(path.string()), FormatError);
    };

    mutate_and_expect_format_error([](nlohmann::json& j) { j["format_version"] = 2; });
    mutate_and_expect_format_error([](nlohmann::json& j) { j["atom_count"] = 5; });
    mutate_and_expect_format_error([](nlohmann::json& j) { j.erase("n_samples"); });
    mutate_and_expect_format_error(
        [](nlohmann::json& j) { j["atoms"][0].erase("dt_samples"); });
    mutate_and_expect_format_error(
        [](nlohmann::json& j) { j["atoms"][0]["amp"] = -1.0; });
    mutate_and_expect_format_error(
        [](nlohmann::json& j) { j["atoms"][0]["tc_samples"] = 100.0; });
    mutate_and_expect_format_error(
        [](nlohmann::json& j) { j["atoms"][0]["dt_samples"] = 0.4; });
    mutate_and_expect_format_error(
        [](nlohmann::json& j) { j["atoms"][0]["fc_rad_per_sample"] = nullptr; });
    mutate_and_expect_format_error([](nlohmann::json& j) { j["radix"] = 1; });
    mutate_and_expect_format_error([](nlohmann::json& j) { j["atoms"] = 17; });

    {
        std::ofstream out(path);
        out << "this is not json {{{";
    }
    REQUIRE_THROWS_AS(load_decomposition(path.string()), ParseError);
    REQUIRE_THROWS_AS(load_decomposition("/nonexistent/chirplet.json"), IoError);
    std::filesystem::remove(path);
}
