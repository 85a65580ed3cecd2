#ifndef CHIRPLET_FFT_HPP
#define CHIRPLET_FFT_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "chirplet/errors.hpp"

// Self-contained complex FFT for arbitrary lengths: iterative radix-2 for
// powers of two, Bluestein's chirp-z reduction otherwise. Plans precompute
// twiddle/chirp tables so repeated transforms of one length are cheap.

namespace chirplet {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 DIT transform; `twiddle` holds exp(-i*2*pi*k/n) for
// k in [0, n/2) and is shared between forward and inverse (conjugated).
inline void fft_pow2_inplace(std::vector<std::complex<double>>& a,
                             const std::vector<std::complex<double>>& twiddle,
                             bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = twiddle[k * step];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace detail

// Transform plan for one fixed length.
class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw InvalidInputError("Fft: length must be positive");
        pow2_ = detail::is_pow2(n);
        if (pow2_) {
            build_twiddle(n);
        } else {
            m_ = detail::next_pow2(2 * n - 1);
            build_twiddle(m_);
            // chirp_[k] = exp(-i*pi*k^2/n); k^2 is reduced mod 2n so the
            // angle stays small and exact for any length.
            chirp_.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t k2 =
                    (static_cast<std::uint64_t>(k) * k) % (2 * n);
                const double angle =
                    -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
                chirp_[k] = std::polar(1.0, angle);
            }
            // Spectrum of the wrapped conjugate chirp, computed once.
            std::vector<std::complex<double>> b(m_, {0.0, 0.0});
            for (std::size_t k = 0; k < n; ++k) {
                b[k] = std::conj(chirp_[k]);
                if (k != 0) b[m_ - k] = std::conj(chirp_[k]);
            }
            detail::fft_pow2_inplace(b, twiddle_, false);
            chirp_spectrum_ = std::move(b);
            work_.resize(m_);
        }
    }

    std::size_t size() const { return n_; }

    // X[k] = sum_n x[n] exp(-i*2*pi*k*n/N)
    std::vector<std::complex<double>> forward(
        const std::vector<std::complex<double>>& x) const {
        check(x);
        std::vector<std::complex<double>> a(x);
        transform(a, false);
        return a;
    }

    // x[n] = (1/N) sum_k X[k] exp(+i*2*pi*k*n/N)
    std::vector<std::complex<double>> inverse(
        const std::vector<std::complex<double>>& x) const {
        check(x);
        std::vector<std::complex<double>> a(x);
        transform(a, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : a) v *= scale;
        return a;
    }

    // Forward transform without allocation; `out` is resized to N.
    void forward_into(const std::vector<std::complex<double>>& x,
                      std::vector<std::complex<double>>& out) const {
        check(x);
        out = x;
        transform(out, false);
    }

  private:
    void check(const std::vector<std::complex<double>>& x) const {
        if (x.size() != n_)
            throw InvalidInputError("Fft: input length does not match plan");
    }

    void build_twiddle(std::size_t n) {
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n);
            twiddle_[k] = std::polar(1.0, angle);
        }
    }

    void transform(std::vector<std::complex<double>>& a, bool inverse) const {
        if (pow2_) {
            detail::fft_pow2_inplace(a, twiddle_, inverse);
            return;
        }
        // Bluestein: X[k] = chirp[k] * (a.chirp (*) conj-chirp)[k].
        // The inverse reuses the forward machinery via conjugation.
        if (inverse) {
            for (auto& v : a) v = std::conj(v);
            transform(a, false);
            for (auto& v : a) v = std::conj(v);
            return;
        }
        std::vector<std::complex<double>>& w = work_;
        std::fill(w.begin(), w.end(), std::complex<double>{0.0, 0.0});
        for (std::size_t k = 0; k < n_; ++k) w[k] = a[k] * chirp_[k];
        detail::fft_pow2_inplace(w, twiddle_, false);
        for (std::size_t k = 0; k < m_; ++k) w[k] *= chirp_spectrum_[k];
        detail::fft_pow2_inplace(w, twiddle_, true);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) a[k] = w[k] * chirp_[k] * scale;
    }

    std::size_t n_;
    bool pow2_ = false;
    std::size_t m_ = 0;  // Bluestein convolution length
    std::vector<std::complex<double>> twiddle_;
    std::vector<std::complex<double>> chirp_;
    std::vector<std::complex<double>> chirp_spectrum_;
    mutable std::vector<std::complex<double>> work_;
};

// One-shot helpers for callers that do not reuse a plan.
inline std::vector<std::complex<double>> dft(
    const std::vector<std::complex<double>>& x) {
    return Fft(x.size()).forward(x);
}

inline std::vector<std::complex<double>> idft(
    const std::vector<std::complex<double>>& x) {
    return Fft(x.size()).inverse(x);
}

}  // namespace chirplet

#endif  // CHIRPLET_FFT_HPP
