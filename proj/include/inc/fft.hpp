#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "inc/errors.hpp"
#include "inc/tensor.hpp"

namespace inc {
namespace detail {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Iterative radix-2 Cooley-Tukey, in place; n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// DFT of arbitrary length via Bluestein's chirp-z reduction to a pow2 FFT.
inline void fft_bluestein(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    // chirp[j] = exp(sign * i * pi * j^2 / n), with j^2 reduced mod 2n exactly.
    std::vector<cplx> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t q = (static_cast<std::uint64_t>(j) * j) % (2 * n);
        const double ang = sign * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        chirp[j] = cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<cplx> fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
    for (std::size_t j = 0; j < n; ++j) fa[j] = a[j] * chirp[j];
    fb[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) fb[j] = fb[m - j] = std::conj(chirp[j]);

    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t j = 0; j < m; ++j) fa[j] *= fb[j];
    fft_pow2(fa, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * chirp[k];
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

inline void fft(std::vector<cplx>& a, bool inverse) {
    if (is_pow2(a.size()))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
}

} // namespace detail

// Orthonormal DCT-II of a real vector (Makhoul's even/odd permutation plus a
// length-n complex FFT, so the cost is O(n log n) for any n, power of two or
// not). Satisfies ||dct(x)|| == ||x||.
inline std::vector<double> dct2_orthonormal(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0) throw ShapeError("dct2_orthonormal: empty input");
    std::vector<detail::cplx> v(n);
    for (std::size_t j = 0; j < (n + 1) / 2; ++j) v[j] = detail::cplx(x[2 * j], 0.0);
    for (std::size_t j = 0; j < n / 2; ++j) v[n - 1 - j] = detail::cplx(x[2 * j + 1], 0.0);
    detail::fft(v, false);

    std::vector<double> c(n);
    const double s0 = 0.5 * std::sqrt(1.0 / static_cast<double>(n));
    const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = -std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        const double y = 2.0 * (v[k].real() * std::cos(ang) - v[k].imag() * std::sin(ang));
        c[k] = y * (k == 0 ? s0 : sk);
    }
    return c;
}

// Orthonormal DCT-III: the transpose (= inverse) of dct2_orthonormal.
inline std::vector<double> dct3_orthonormal(const std::vector<double>& c) {
    const std::size_t n = c.size();
    if (n == 0) throw ShapeError("dct3_orthonormal: empty input");
    // Undo the orthonormal scaling back to the unnormalized DCT-II coefficients.
    std::vector<double> y(n);
    y[0] = c[0] * 2.0 * std::sqrt(static_cast<double>(n));
    for (std::size_t k = 1; k < n; ++k) y[k] = c[k] * std::sqrt(2.0 * static_cast<double>(n));

    std::vector<detail::cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double yk = y[k];
        const double ynk = (k == 0) ? 0.0 : y[n - k];
        const double ang = std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        const detail::cplx rot(std::cos(ang), std::sin(ang));
        v[k] = 0.5 * rot * detail::cplx(yk, -ynk);
    }
    detail::fft(v, true);

    std::vector<double> x(n);
    for (std::size_t j = 0; j < (n + 1) / 2; ++j) x[2 * j] = v[j].real();
    for (std::size_t j = 0; j < n / 2; ++j) x[2 * j + 1] = v[n - 1 - j].real();
    return x;
}

// Typed wrappers; internals always run in double so the float path meets the
// 1e-6 norm-preservation contract.
template <typename T>
Tensor<T> dct_orthonormal(const Tensor<T>& x) {
    if (x.ndim() != 1) throw ShapeError("dct_orthonormal: expects 1-D tensor");
    require_finite(x, "dct_orthonormal");
    std::vector<double> in(x.numel());
    for (std::size_t i = 0; i < x.numel(); ++i) in[i] = static_cast<double>(x[i]);
    const std::vector<double> out = dct2_orthonormal(in);
    std::vector<T> res(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) res[i] = static_cast<T>(out[i]);
    const std::size_t len = res.size();
    return Tensor<T>({len}, std::move(res));
}

template <typename T>
Tensor<T> idct_orthonormal(const Tensor<T>& c) {
    if (c.ndim() != 1) throw ShapeError("idct_orthonormal: expects 1-D tensor");
    require_finite(c, "idct_orthonormal");
    std::vector<double> in(c.numel());
    for (std::size_t i = 0; i < c.numel(); ++i) in[i] = static_cast<double>(c[i]);
    const std::vector<double> out = dct3_orthonormal(in);
    std::vector<T> res(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) res[i] = static_cast<T>(out[i]);
    const std::size_t len = res.size();
    return Tensor<T>({len}, std::move(res));
}

} // namespace inc
