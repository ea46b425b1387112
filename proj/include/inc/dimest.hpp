#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "inc/errors.hpp"
#include "inc/model.hpp"
#include "inc/rng.hpp"
#include "inc/tensor.hpp"

namespace inc {

struct DimEstimate {
    double m = 0.0;               // estimated manifold dimension
    double epsilon = 0.0;         // JL distortion in (0,1)
    double k_est = 0.0;           // M / epsilon^2
    double sample_factor_pct = 0.0;
};

namespace detail {

// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotation; returns
// them sorted descending. Fine for the small Gram matrices used here.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p], aqq = a[q * n + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p], aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p * n + i], aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

// Smallest m whose leading eigenvalues explain at least `threshold` of the
// total variance.
inline std::size_t explained_variance_dim(const std::vector<double>& ev, double threshold) {
    double total = 0.0;
    for (double v : ev) total += std::max(v, 0.0);
    if (total <= 0.0) throw NumericError("lpca: degenerate point cloud (zero variance)");
    double cum = 0.0;
    for (std::size_t m = 0; m < ev.size(); ++m) {
        cum += std::max(ev[m], 0.0);
        if (cum / total >= threshold) return m + 1;
    }
    return ev.size();
}

} // namespace detail

// Local-PCA dimension of a point cloud (rows = samples): eigenvalues of the
// sample covariance via the Gram matrix, then an explained-variance cut.
inline double lpca_dimension_of_cloud(const std::vector<std::vector<double>>& cloud,
                                      double threshold = 0.95) {
    const std::size_t s = cloud.size();
    if (s < 2) throw ConfigError("lpca: need at least 2 samples");
    const std::size_t dim = cloud[0].size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& row : cloud)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
    for (auto& v : mean) v /= static_cast<double>(s);

    // Gram trick: nonzero covariance eigenvalues equal those of Yc Yc^T/(s-1).
    std::vector<double> gram(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i; j < s; ++j) {
            double acc = 0.0;
            for (std::size_t q = 0; q < dim; ++q)
                acc += (cloud[i][q] - mean[q]) * (cloud[j][q] - mean[q]);
            acc /= static_cast<double>(s - 1);
            gram[i * s + j] = acc;
            gram[j * s + i] = acc;
        }
    const auto ev = detail::symmetric_eigenvalues(std::move(gram), s);
    return static_cast<double>(detail::explained_variance_dim(ev, threshold));
}

// Manifold dimension around a trained model: Gaussian perturbations of the
// hyper-parameters, full forward outputs as the point cloud, local PCA on it.
template <typename T>
double lpca_dimension(const CompressorModel<T>& model, const Tensor<T>& x, std::size_t t,
                      std::size_t n_samples, double perturb_scale, std::uint64_t seed,
                      double threshold = 0.95) {
    if (n_samples < 2) throw ConfigError("lpca_dimension: n_samples must be >= 2");
    Rng rng(mix_seed(seed, 0xD1EULL));
    std::vector<std::vector<double>> cloud;
    cloud.reserve(n_samples);
    CompressorModel<T> probe = model;
    for (std::size_t sidx = 0; sidx < n_samples; ++sidx) {
        for (std::size_t i = 0; i < probe.hyper_params.numel(); ++i)
            probe.hyper_params[i] =
                model.hyper_params[i] + static_cast<T>(perturb_scale * rng.normal());
        const Tensor<T> out = full_forward(probe, x, t);
        std::vector<double> row(out.numel());
        for (std::size_t i = 0; i < out.numel(); ++i) row[i] = static_cast<double>(out[i]);
        cloud.push_back(std::move(row));
    }
    return lpca_dimension_of_cloud(cloud, threshold);
}

// Distortion implied by a (sketch loss)/(full loss) ratio of relative losses:
// squaring moves to the squared-l2 regime, where (1+eps)/(1-eps) = r^2.
inline double epsilon_from_losses(double full_loss, double sketch_loss) {
    if (full_loss <= 0) throw ConfigError("epsilon_from_losses: full loss must be > 0");
    if (sketch_loss < full_loss)
        throw ConfigError("epsilon_from_losses: sketch loss below full loss (epsilon < 0)");
    const double r2 = (sketch_loss / full_loss) * (sketch_loss / full_loss);
    return (r2 - 1.0) / (r2 + 1.0);
}

// Theory-driven sketch size with log factors dropped: k = M / eps^2, reported
// as a percentage of the mesh size.
inline double estimated_sample_factor(double m, double epsilon, std::size_t n) {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw ConfigError("estimated_sample_factor: epsilon must be in (0,1)");
    if (m <= 0.0) throw ConfigError("estimated_sample_factor: M must be positive");
    if (n < 1) throw ConfigError("estimated_sample_factor: n must be >= 1");
    return 100.0 * (m / (epsilon * epsilon)) / static_cast<double>(n);
}

inline DimEstimate make_dim_estimate(double m, double full_loss, double sketch_loss,
                                     std::size_t n) {
    DimEstimate e;
    e.m = m;
    e.epsilon = epsilon_from_losses(full_loss, sketch_loss);
    e.k_est = m / (e.epsilon * e.epsilon);
    e.sample_factor_pct = estimated_sample_factor(m, e.epsilon, n);
    return e;
}

} // namespace inc
