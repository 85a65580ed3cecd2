#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "chirplet/dictionary.hpp"

using namespace chirplet;

namespace {

// block count straight from the lattice arithmetic: i0 Gabor levels plus
// 4*a^(2k) rotations for k = 0 .. D-i0-1
std::size_t expected_blocks(std::size_t n, int a, int i0) {
    const int d = static_cast<int>(
        std::floor(0.5 * std::log(static_cast<double>(n)) / std::log(a)));
    std::size_t count = static_cast<std::size_t>(i0);
    for (int k = 0; k < d - i0; ++k)
        count += static_cast<std::size_t>(4.0 * std::pow(a, 2 * k));
    return count;
}

}  // namespace

TEST_CASE("level count follows floor(log_a(N)/2)") {
    REQUIRE(Dictionary({64, 2, 1}).levels() == 3);
    REQUIRE(Dictionary({100, 2, 1}).levels() == 3);
    REQUIRE(Dictionary({128, 2, 1}).levels() == 3);
    REQUIRE(Dictionary({256, 2, 1}).levels() == 4);
    REQUIRE(Dictionary({81, 3, 1}).levels() == 2);
}

TEST_CASE("block enumeration count and total lattice size") {
    for (std::size_t n : {64u, 128u, 256u}) {
        const Dictionary d({n, 2, 1});
        const std::size_t want = expected_blocks(n, 2, 1);
        INFO("n = " << n);
        REQUIRE(d.blocks().size() == want);
        REQUIRE(d.total_atom_count() ==
                static_cast<std::uint64_t>(n) * n * want);
    }
    // worked instance: N = 64 -> 4096 * (1 + 4 + 16) = 86016
    REQUIRE(Dictionary({64, 2, 1}).total_atom_count() == 86016);
    REQUIRE(Dictionary({256, 2, 1}).blocks().size() == 85);
}

TEST_CASE("blocks carry the lattice parameters") {
    const std::size_t n = 100;
    const Dictionary d({n, 2, 1});
    const auto& blocks = d.blocks();

    // one unrotated level first
    REQUIRE_FALSE(blocks[0].rotated);
    REQUIRE(blocks[0].chirp_rate == 0.0);
    REQUIRE(blocks[0].time_spread == 1.0);

    for (const auto& b : blocks) {
        if (!b.rotated) continue;
        const double spread = std::pow(2.0, 2 * b.level);
        REQUIRE(b.time_spread == spread);
        REQUIRE(b.chirp_rate ==
                Catch::Approx(2.0 * std::numbers::pi / static_cast<double>(n) *
                              static_cast<double>(b.chirp_index) / spread));
        // rotation angle stays strictly inside (-pi/2, pi/2)
        REQUIRE(std::abs(std::atan(static_cast<double>(b.chirp_index) / spread)) <
                std::numbers::pi / 2.0);
    }
}

TEST_CASE("chirp index is signed and symmetric up to the half-open end") {
    const Dictionary d({100, 2, 1});
    std::multiset<long> per_level[4];
    for (const auto& b : d.blocks())
        if (b.rotated) per_level[b.level].insert(b.chirp_index);

    for (int k = 0; k < 2; ++k) {
        const long half = 2 * static_cast<long>(std::pow(2, 2 * k));
        REQUIRE(per_level[k].size() == static_cast<std::size_t>(4 * std::pow(2, 2 * k)));
        for (long m = -half; m < half; ++m)
            REQUIRE(per_level[k].count(m) == 1);
    }
    // every positive chirp-rate has its negative counterpart
    for (const auto& b : d.blocks())
        if (b.rotated && b.chirp_index > 0) {
            bool found = false;
            for (const auto& o : d.blocks())
                if (o.rotated && o.level == b.level && o.chirp_index == -b.chirp_index)
                    found = true;
            REQUIRE(found);
        }
}

TEST_CASE("the crossing pair's chirp-rates are on the lattice") {
    const std::size_t n = 100;
    const Dictionary d({n, 2, 1});
    // (k = 1, m = +-2): c = (2*pi/100) * (+-2/4) = +-pi/100
    const ChirpletParams up = d.params_at(1, 2, 51, 25);
    REQUIRE(up.tc == 51.0);
    REQUIRE(up.fc == Catch::Approx(std::numbers::pi / 2.0));
    REQUIRE(up.c == Catch::Approx(std::numbers::pi / 100.0));
    REQUIRE(up.dt == 4.0);

    const ChirpletParams down = d.params_at(1, -2, 51, 25);
    REQUIRE(down.c == Catch::Approx(-std::numbers::pi / 100.0));
    REQUIRE(down.dt == 4.0);
}

TEST_CASE("params_at corners and ranges") {
    const Dictionary d({64, 2, 1});
    const ChirpletParams corner = d.params_at(0, 0, 0, 0);
    REQUIRE(corner.tc == 0.0);
    REQUIRE(corner.fc == 0.0);
    REQUIRE(corner.c == 0.0);
    REQUIRE(corner.dt == 1.0);

    REQUIRE(d.params_at(0, 0, 0, 32).fc == Catch::Approx(std::numbers::pi));

    REQUIRE_THROWS_AS(d.params_at(5, 0, 0, 0), InvalidInputError);
    REQUIRE_THROWS_AS(d.params_at(0, 4, 0, 0), InvalidInputError);   // m past the end
    REQUIRE_THROWS_AS(d.params_at(0, -5, 0, 0), InvalidInputError);
    REQUIRE_THROWS_AS(d.params_at(0, 0, 64, 0), InvalidInputError);
    REQUIRE_THROWS_AS(d.params_at(0, 0, 0, 64), InvalidInputError);
}

TEST_CASE("construction rejects impossible configurations") {
    REQUIRE_THROWS_AS(Dictionary({8, 2, 1}), InvalidInputError);   // D = 1 <= i0
    REQUIRE_THROWS_AS(Dictionary({64, 1, 1}), InvalidInputError);  // radix too small
    REQUIRE_THROWS_AS(Dictionary({64, 2, -1}), InvalidInputError);
    REQUIRE_THROWS_AS(Dictionary({3, 2, 1}), InvalidInputError);
    REQUIRE_NOTHROW(Dictionary({16, 2, 1}));  // D = 2: one rotated scale
}

TEST_CASE("two builds enumerate identically") {
    const Dictionary a({128, 2, 1}), b({128, 2, 1});
    REQUIRE(a.blocks().size() == b.blocks().size());
    for (std::size_t i = 0; i < a.blocks().size(); ++i) {
        REQUIRE(a.blocks()[i].level == b.blocks()[i].level);
        REQUIRE(a.blocks()[i].chirp_index == b.blocks()[i].chirp_index);
        REQUIRE(a.blocks()[i].rotated == b.blocks()[i].rotated);
        REQUIRE(a.blocks()[i].time_spread == b.blocks()[i].time_spread);
        REQUIRE(a.blocks()[i].chirp_rate == b.blocks()[i].chirp_rate);
    }
}
