#ifndef CHIRPLET_STATS_HPP
#define CHIRPLET_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "chirplet/errors.hpp"
#include "chirplet/rng.hpp"

namespace chirplet {

inline double mean(const std::vector<double>& x) {
    if (x.empty()) throw InvalidInputError("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double median_sorted(const std::vector<double>& s) {
    if (s.empty()) throw InvalidInputError("median: empty sample");
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

// Linear-interpolation quantile of an ascending-sorted sample (the common
// "type 7" rule: h = (n-1)p).
inline double quantile_sorted(const std::vector<double>& s, double p) {
    if (s.empty()) throw InvalidInputError("quantile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidInputError("quantile_sorted: p outside [0, 1]");
    const double h = static_cast<double>(s.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= s.size()) return s.back();
    return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap interval for the mean. The sample is sorted before
// resampling, so the interval does not depend on the order the values
// arrived in — only on the multiset and the seed.
inline Interval bootstrap_mean_ci(std::vector<double> sample, std::size_t resamples,
                                  std::uint64_t seed, double alpha = 0.05) {
    if (sample.size() < 2)
        throw InvalidInputError("bootstrap_mean_ci: need at least 2 values");
    if (resamples < 1)
        throw InvalidInputError("bootstrap_mean_ci: need at least 1 resample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidInputError("bootstrap_mean_ci: alpha outside (0, 1)");

    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    Xoshiro256pp rng(seed);
    std::vector<double> means(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += sample[rng.next_below(n)];
        means[r] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    return {quantile_sorted(means, alpha / 2.0),
            quantile_sorted(means, 1.0 - alpha / 2.0)};
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// One-sample Wilcoxon signed-rank test of median 0 against the right-sided
// alternative (median > 0). Zeros are dropped, tied magnitudes receive
// mid-ranks with the matching variance correction, and the p-value comes
// from the normal approximation with a continuity correction.
inline double signed_rank_right(const std::vector<double>& x) {
    if (x.size() < 10)
        throw InvalidInputError("signed_rank_right: need at least 10 values");

    std::vector<std::pair<double, bool>> v;  // (|x|, x > 0)
    v.reserve(x.size());
    for (double xi : x)
        if (xi != 0.0) v.emplace_back(std::abs(xi), xi > 0.0);
    if (v.empty())
        throw DomainError("signed_rank_right: every value is zero");
    std::sort(v.begin(), v.end());

    const std::size_t n = v.size();
    double w_plus = 0.0, tie_corr = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && v[j].first == v[i].first) ++j;
        const double mid_rank = static_cast<double>(i + j + 1) / 2.0;  // ranks i+1..j
        const double t = static_cast<double>(j - i);
        if (j - i > 1) tie_corr += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (v[k].second) w_plus += mid_rank;
        i = j;
    }

    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_corr / 48.0;
    if (!(var > 0.0))
        throw DomainError("signed_rank_right: zero variance");
    const double z = (w_plus - mu - 0.5) / std::sqrt(var);
    return 1.0 - normal_cdf(z);
}

}  // namespace chirplet

#endif  // CHIRPLET_STATS_HPP
