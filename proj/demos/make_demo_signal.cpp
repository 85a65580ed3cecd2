// Generates a seven-component demo signal (sinusoid piece, saw-tooth piece,
// two Gabor bursts, an impulse, a long low tone, one chirplet) and writes it
// as signal CSV. Handy input for `chirplet decompose` / `chirplet render`.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "chirplet/gaussian_chirplet.hpp"
#include "chirplet/io.hpp"

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "demo_signal.csv";
    constexpr std::size_t n = 2000;
    constexpr double pi = std::numbers::pi;
    std::vector<double> x(n, 0.0);

    // 1. sinusoid piece
    for (std::size_t t = 100; t < 400; ++t)
        x[t] += 0.8 * std::sin(2.0 * pi * 0.06 * static_cast<double>(t));

    // 2. saw-tooth piece (period 25)
    for (std::size_t t = 500; t < 700; ++t)
        x[t] += 0.8 * (2.0 * (static_cast<double>(t % 25) / 25.0) - 1.0);

    // 3./4. two Gabor bursts
    auto burst = [&](double tc, double sigma, double w, double amp) {
        for (std::size_t t = 0; t < n; ++t) {
            const double d = (static_cast<double>(t) - tc) / sigma;
            x[t] += amp * std::exp(-0.5 * d * d) *
                    std::cos(w * (static_cast<double>(t) - tc));
        }
    };
    burst(850.0, 20.0, 0.8, 1.0);
    burst(1000.0, 15.0, 1.9, 1.0);

    // 5. impulse
    x[1150] += 2.0;

    // 6. long low tone
    for (std::size_t t = 1250; t < 1850; ++t)
        x[t] += 0.4 * std::cos(0.35 * static_cast<double>(t));

    // 7. one chirplet (real part)
    {
        const chirplet::ChirpletParams p{1550.0, 1.2, 0.002, 60.0};
        const chirplet::AnalyticSignal g = chirplet::sample_chirplet(p, n);
        for (std::size_t t = 0; t < n; ++t) x[t] += 8.0 * g.samples[t].real();
    }

    chirplet::write_signal_csv(path, x, 800.0);
    std::printf("wrote %zu samples to %s\n", n, path.c_str());
    return 0;
}
