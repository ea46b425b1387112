#pragma once

#include <cmath>
#include <cstddef>

namespace inc {
namespace detail {

// Fused sin/cos over a contiguous float range. Three-step Cody-Waite range
// reduction plus short minimax polynomials on [-pi/4, pi/4]; branch-free per
// element so the compiler can vectorize the loop. Absolute error is a few
// float ulps for |x| <= 1e4; larger inputs (divergence territory) fall back to
// libm for the whole range to keep the result well-defined.
//
// The double overload defers to libm: the 64-bit path is the oracle precision
// and is never hot.

inline void sincos_range(const double* x, double* s, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
}

inline void sincos_range(const float* x, float* s, float* c, std::size_t n) {
    constexpr float kLimit = 1.0e4f;
    bool in_range = true;
    for (std::size_t i = 0; i < n; ++i)
        in_range = in_range && (x[i] > -kLimit && x[i] < kLimit);  // false for NaN too
    if (!in_range) {
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::sin(x[i]);
            c[i] = std::cos(x[i]);
        }
        return;
    }

    constexpr double kTwoOverPi = 0.636619772367581343075535;
    constexpr double kPiOverTwo = 1.570796326794896619231322;

    for (std::size_t i = 0; i < n; ++i) {
        const double xd = static_cast<double>(x[i]);
        const double qd = std::nearbyint(xd * kTwoOverPi);
        const int q = static_cast<int>(qd);
        const float r = static_cast<float>(xd - qd * kPiOverTwo);
        const float r2 = r * r;
        const float ps =
            r + r * r2 * (-1.6666654611e-1f +
                          r2 * (8.3321608736e-3f + r2 * (-1.9515295891e-4f)));
        const float pc =
            1.0f - 0.5f * r2 +
            r2 * r2 * (4.166664568298827e-2f +
                       r2 * (-1.388731625493765e-3f + r2 * 2.443315711809948e-5f));
        const bool swap = q & 1;
        const float sv = swap ? pc : ps;
        const float cv = swap ? ps : pc;
        const float ssign = (q & 2) ? -1.0f : 1.0f;
        const float csign = ((q + 1) & 2) ? -1.0f : 1.0f;
        s[i] = ssign * sv;
        c[i] = csign * cv;
    }
}

} // namespace detail
} // namespace inc
