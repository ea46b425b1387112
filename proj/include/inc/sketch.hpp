#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "inc/errors.hpp"
#include "inc/fft.hpp"
#include "inc/rng.hpp"
#include "inc/tensor.hpp"

namespace inc {

enum class SketchKind : std::uint16_t { Subsample = 0, Fjlt = 1, Gaussian = 2 };

inline std::string to_string(SketchKind k) {
    switch (k) {
        case SketchKind::Subsample: return "subsample";
        case SketchKind::Fjlt: return "fjlt";
        case SketchKind::Gaussian: return "gaussian";
    }
    return "?";
}

// Seed-reconstructible linear map from n-row fields to k-row fields, applied
// column-broadcast across channels. All derived state (index set, sign vector,
// dense matrix) is regenerated deterministically from (kind, n, k, seed); only
// the seed needs to be persisted alongside a stored sketch.
//
// RNG consumption order is part of the format contract:
//   Subsample: k indices without replacement.
//   Fjlt:      n Rademacher signs, then k indices without replacement.
//   Gaussian:  k*n normal draws, row-major, scaled by 1/sqrt(k).
template <typename T>
class SketchOperator {
public:
    SketchOperator(SketchKind kind, std::size_t n, std::size_t k, std::uint64_t seed)
        : kind_(kind), n_(n), k_(k), seed_(seed) {
        if (k == 0) throw ConfigError("SketchOperator: k must be >= 1");
        if (k > n) throw ConfigError("SketchOperator: k > n");
        Rng rng(seed);
        switch (kind_) {
            case SketchKind::Subsample:
                omega_ = sample_without_replacement(n_, k_, rng);
                break;
            case SketchKind::Fjlt:
                signs_.resize(n_);
                for (std::size_t i = 0; i < n_; ++i) signs_[i] = static_cast<double>(rng.rademacher());
                omega_ = sample_without_replacement(n_, k_, rng);
                break;
            case SketchKind::Gaussian: {
                const double s = 1.0 / std::sqrt(static_cast<double>(k_));
                gauss_.resize(k_ * n_);
                for (auto& g : gauss_) g = s * rng.normal();
                break;
            }
        }
    }

    SketchKind kind() const { return kind_; }
    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint64_t>& indices() const { return omega_; }
    const std::vector<double>& signs() const { return signs_; }

    // U (n x c) -> SU (k x c).
    Tensor<T> apply(const Tensor<T>& u) const {
        check_rows(u, n_, "SketchOperator::apply");
        const std::size_t c = u.cols();
        Tensor<T> out({k_, c});
        switch (kind_) {
            case SketchKind::Subsample:
                for (std::size_t r = 0; r < k_; ++r)
                    for (std::size_t j = 0; j < c; ++j) out.at(r, j) = u.at(omega_[r], j);
                break;
            case SketchKind::Fjlt: {
                const double scale = std::sqrt(static_cast<double>(n_) / static_cast<double>(k_));
                std::vector<double> w(n_);
                for (std::size_t j = 0; j < c; ++j) {
                    for (std::size_t i = 0; i < n_; ++i)
                        w[i] = signs_[i] * static_cast<double>(u.at(i, j));
                    const std::vector<double> y = dct2_orthonormal(w);
                    for (std::size_t r = 0; r < k_; ++r)
                        out.at(r, j) = static_cast<T>(scale * y[omega_[r]]);
                }
                break;
            }
            case SketchKind::Gaussian:
                for (std::size_t r = 0; r < k_; ++r)
                    for (std::size_t j = 0; j < c; ++j) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < n_; ++i)
                            acc += gauss_[r * n_ + i] * static_cast<double>(u.at(i, j));
                        out.at(r, j) = static_cast<T>(acc);
                    }
                break;
        }
        require_finite(out, "SketchOperator::apply");
        return out;
    }

    // S^T G: (k x c) -> (n x c). Exact adjoint of apply; used by the gradient
    // engine to backpropagate through sketched reconstructions.
    Tensor<T> apply_adjoint(const Tensor<T>& g) const {
        check_rows(g, k_, "SketchOperator::apply_adjoint");
        const std::size_t c = g.cols();
        Tensor<T> out({n_, c});
        switch (kind_) {
            case SketchKind::Subsample:
                for (std::size_t r = 0; r < k_; ++r)
                    for (std::size_t j = 0; j < c; ++j) out.at(omega_[r], j) = g.at(r, j);
                break;
            case SketchKind::Fjlt: {
                const double scale = std::sqrt(static_cast<double>(n_) / static_cast<double>(k_));
                std::vector<double> z(n_);
                for (std::size_t j = 0; j < c; ++j) {
                    std::fill(z.begin(), z.end(), 0.0);
                    for (std::size_t r = 0; r < k_; ++r)
                        z[omega_[r]] = scale * static_cast<double>(g.at(r, j));
                    const std::vector<double> w = dct3_orthonormal(z);
                    for (std::size_t i = 0; i < n_; ++i)
                        out.at(i, j) = static_cast<T>(signs_[i] * w[i]);
                }
                break;
            }
            case SketchKind::Gaussian:
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::size_t j = 0; j < c; ++j) {
                        double acc = 0.0;
                        for (std::size_t r = 0; r < k_; ++r)
                            acc += gauss_[r * n_ + i] * static_cast<double>(g.at(r, j));
                        out.at(i, j) = static_cast<T>(acc);
                    }
                break;
        }
        require_finite(out, "SketchOperator::apply_adjoint");
        return out;
    }

private:
    static void check_rows(const Tensor<T>& t, std::size_t expect, const char* where) {
        if (t.ndim() != 2 || t.rows() != expect)
            throw ShapeError(std::string(where) + ": expected " + std::to_string(expect) +
                             " rows, got " + t.shape_str());
    }

    SketchKind kind_;
    std::size_t n_, k_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> omega_;
    std::vector<double> signs_;
    std::vector<double> gauss_;
};

template <typename T>
SketchOperator<T> construct_sketch(SketchKind kind, std::size_t n, std::size_t k, std::uint64_t seed) {
    return SketchOperator<T>(kind, n, k, seed);
}

} // namespace inc
