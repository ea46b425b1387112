#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "inc/errors.hpp"

namespace inc {

// Dense row-major real array. Value semantics throughout; shapes are plain
// size lists and product(shape) == data.size() always holds.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), T(0)) {}

    Tensor(std::vector<std::size_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != data_.size())
            throw ShapeError("Tensor: shape/data length mismatch");
    }

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<std::size_t> shape, T value) {
        Tensor t(std::move(shape));
        for (auto& v : t.data_) v = value;
        return t;
    }

    static Tensor scalar(T value) { return Tensor({1}, {value}); }

    static Tensor row(std::initializer_list<T> values) {
        return Tensor({1, values.size()}, std::vector<T>(values));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t numel() const { return data_.size(); }

    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const {
        if (shape_.size() == 1) return 1;
        return shape_.size() >= 2 ? shape_[1] : 0;
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    Tensor reshaped(std::vector<std::size_t> shape) const {
        if (checked_numel(shape) != data_.size())
            throw ShapeError("Tensor::reshaped: element count mismatch");
        return Tensor(std::move(shape), data_);
    }

    bool all_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    std::string shape_str() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
        os << "]";
        return os.str();
    }

private:
    static std::size_t checked_numel(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* where) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

template <typename T>
void require_finite(const Tensor<T>& t, const char* where) {
    if (!t.all_finite()) throw NumericError(std::string(where) + ": non-finite value");
}

// l2 norm of the whole tensor.
template <typename T>
double norm2(const Tensor<T>& t) {
    double s = 0;
    for (std::size_t i = 0; i < t.numel(); ++i) {
        const double v = static_cast<double>(t[i]);
        s += v * v;
    }
    return std::sqrt(s);
}

// Per-column l2 norms of an r x c matrix (c norms).
template <typename T>
std::vector<double> col_norms(const Tensor<T>& t) {
    const std::size_t r = t.rows(), c = t.cols();
    std::vector<double> s(c, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double v = static_cast<double>(t.at(i, j));
            s[j] += v * v;
        }
    for (auto& v : s) v = std::sqrt(v);
    return s;
}

template <typename T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "tensor+");
    Tensor<T> out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i];
    return out;
}

template <typename T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "tensor-");
    Tensor<T> out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= b[i];
    return out;
}

template <typename T>
Tensor<T> operator*(T s, const Tensor<T>& a) {
    Tensor<T> out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= s;
    return out;
}

template <typename T, typename U>
Tensor<U> tensor_cast(const Tensor<T>& t) {
    std::vector<U> d(t.numel());
    for (std::size_t i = 0; i < t.numel(); ++i) d[i] = static_cast<U>(t[i]);
    return Tensor<U>(t.shape(), std::move(d));
}

} // namespace inc
