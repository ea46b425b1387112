#pragma once

#include <cmath>
#include <cstdint>

#include "inc/errors.hpp"
#include "inc/tensor.hpp"

namespace inc {

struct RAdamHyper {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Rectified Adam. When the variance-rectification term rho_t <= 4 the update
// falls back to plain (bias-corrected) momentum; otherwise the rectified
// adaptive step applies. Deterministic: identical inputs give bit-identical
// outputs at fixed precision.
template <typename T>
struct RAdamState {
    std::uint64_t step = 0;
    Tensor<T> m;
    Tensor<T> v;
    RAdamHyper hyper;

    explicit RAdamState(const std::vector<std::size_t>& param_shape, RAdamHyper h = {})
        : m(param_shape), v(param_shape), hyper(h) {}
};

template <typename T>
void radam_step(Tensor<T>& params, const Tensor<T>& grads, RAdamState<T>& state) {
    require_same_shape(params, grads, "radam_step(params, grads)");
    require_same_shape(params, state.m, "radam_step(params, m)");
    require_finite(grads, "radam_step: gradient");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double b1 = state.hyper.beta1;
    const double b2 = state.hyper.beta2;
    const double b1t = std::pow(b1, t);
    const double b2t = std::pow(b2, t);
    const double rho_inf = 2.0 / (1.0 - b2) - 1.0;
    const double rho_t = rho_inf - 2.0 * t * b2t / (1.0 - b2t);

    const bool rectified = rho_t > 4.0;
    double r_t = 1.0;
    if (rectified) {
        r_t = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                        ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    }

    T* p = params.data();
    T* m = state.m.data();
    T* v = state.v.data();
    const T* g = grads.data();
    const std::size_t n = params.numel();
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = static_cast<double>(g[i]);
        const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
        const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double m_hat = mi / (1.0 - b1t);
        double update;
        if (rectified) {
            const double v_hat = std::sqrt(vi / (1.0 - b2t));
            update = state.hyper.lr * r_t * m_hat / (v_hat + state.hyper.eps);
        } else {
            update = state.hyper.lr * m_hat;
        }
        p[i] = static_cast<T>(static_cast<double>(p[i]) - update);
    }
    require_finite(params, "radam_step: updated parameters");
}

} // namespace inc
