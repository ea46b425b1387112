#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "inc/errors.hpp"
#include "inc/graph.hpp"
#include "inc/tensor.hpp"

namespace inc {

// Frame-wise relative loss: mean over channels of ||U_c - Urec_c|| / ||U_c||.
template <typename T>
double loss_frame(const Tensor<T>& u, const Tensor<T>& urec) {
    require_same_shape(u, urec, "loss_frame");
    const std::size_t r = u.rows(), c = u.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            const double d = static_cast<double>(u.at(i, j)) - static_cast<double>(urec.at(i, j));
            const double v = static_cast<double>(u.at(i, j));
            num += d * d;
            den += v * v;
        }
        if (den == 0.0) throw NumericError("loss_frame: zero-norm channel " + std::to_string(j));
        acc += std::sqrt(num) / std::sqrt(den);
    }
    return acc / static_cast<double>(c);
}

// Graph version: same loss with the reconstruction as a differentiable node.
// The reference snapshot enters as a constant; per-channel reference norms are
// constants too, so the gradient only flows through `pred`.
template <typename T>
typename Graph<T>::Id emit_loss_frame(Graph<T>& g, typename Graph<T>::Id pred,
                                      const Tensor<T>& u) {
    require_same_shape(g.value(pred), u, "emit_loss_frame");
    const std::size_t c = u.cols();
    const std::vector<double> den = col_norms(u);
    Tensor<T> den_t({c});
    for (std::size_t j = 0; j < c; ++j) {
        if (den[j] == 0.0) throw NumericError("emit_loss_frame: zero-norm channel " + std::to_string(j));
        den_t[j] = static_cast<T>(den[j]);
    }
    const auto uc = g.constant(u);
    const auto diff = g.sub(uc, pred);
    const auto norms = g.sqrt_(g.sum_cols(g.square(diff)));
    return g.mean(g.div(norms, g.constant(std::move(den_t))));
}

// Relative Frobenius error over a whole trajectory, channel-averaged:
// (1/C) sum_c ||U[:,:,c] - Urec[:,:,c]||_F / ||U[:,:,c]||_F.
template <typename T>
double rfe(const std::vector<Tensor<T>>& u, const std::vector<Tensor<T>>& urec) {
    if (u.size() != urec.size() || u.empty()) throw ShapeError("rfe: snapshot count mismatch");
    const std::size_t c = u[0].cols();
    std::vector<double> num(c, 0.0), den(c, 0.0);
    for (std::size_t t = 0; t < u.size(); ++t) {
        require_same_shape(u[t], urec[t], "rfe");
        if (u[t].cols() != c) throw ShapeError("rfe: channel count drift");
        const std::size_t r = u[t].rows();
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double d =
                    static_cast<double>(u[t].at(i, j)) - static_cast<double>(urec[t].at(i, j));
                const double v = static_cast<double>(u[t].at(i, j));
                num[j] += d * d;
                den[j] += v * v;
            }
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        if (den[j] == 0.0) throw NumericError("rfe: zero-norm channel " + std::to_string(j));
        acc += std::sqrt(num[j]) / std::sqrt(den[j]);
    }
    return acc / static_cast<double>(c);
}

// Frame-wise PSNR, exactly as printed in the source material: the numerator is
// max_i of the *reconstruction* (not its absolute value, not the reference)
// and the denominator is the unnormalized l2 error. Zero error yields +inf.
// A channel whose reconstruction maximum is <= 0 has no defined value.
template <typename T>
double psnr(const Tensor<T>& u, const Tensor<T>& urec) {
    require_same_shape(u, urec, "psnr");
    const std::size_t r = u.rows(), c = u.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        double peak = -std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            peak = std::max(peak, static_cast<double>(urec.at(i, j)));
            const double d = static_cast<double>(u.at(i, j)) - static_cast<double>(urec.at(i, j));
            err += d * d;
        }
        if (peak <= 0.0)
            throw NumericError("psnr: non-positive reconstruction maximum in channel " +
                               std::to_string(j));
        if (err == 0.0) return std::numeric_limits<double>::infinity();
        acc += 20.0 * std::log10(peak / std::sqrt(err));
    }
    return acc / static_cast<double>(c);
}

// Mean frame loss over a prefix of snapshots (the memory-unconstrained ideal).
template <typename T>
double loss_ideal(const std::vector<Tensor<T>>& u, const std::vector<Tensor<T>>& urec) {
    if (u.size() != urec.size() || u.empty()) throw ShapeError("loss_ideal: size mismatch");
    double acc = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) acc += loss_frame(u[t], urec[t]);
    return acc / static_cast<double>(u.size());
}

} // namespace inc
