#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "inc/errors.hpp"
#include "inc/fastmath.hpp"
#include "inc/sketch.hpp"
#include "inc/tensor.hpp"

namespace inc {

// Reverse-mode gradient engine over a closed primitive set. Nodes are appended
// in topological order (an op can only reference existing nodes) and evaluated
// eagerly; backward() walks the tape once in reverse. Every node output and
// every accumulated gradient is finiteness-checked: a NaN/Inf anywhere aborts
// the step with a diagnostic instead of propagating.
enum class Op : std::uint8_t {
    Input,       // differentiable leaf
    Constant,    // non-differentiable leaf
    Affine,      // Y = X W^T + b      (X: r x i, W: o x i, b: o)
    Sine,        // elementwise sin
    Add,         // elementwise a + b
    Sub,         // elementwise a - b
    Scale,       // c * x, scalar attribute c
    Square,      // elementwise x^2
    Sqrt,        // elementwise sqrt
    Div,         // elementwise a / b (same shape, or b scalar)
    Concat,      // flattened concatenation -> 1-D
    Slice,       // contiguous flat range [offset, offset+len) reshaped
    SumAll,      // reduce to scalar
    MeanAll,     // reduce to scalar
    SumCols,     // (r x c) -> per-column sums (c,)   [reduction for losses]
    SketchApply, // constant linear sketch operator; adjoint on backward
};

inline const char* op_name(Op op) {
    switch (op) {
        case Op::Input: return "input";
        case Op::Constant: return "const";
        case Op::Affine: return "affine";
        case Op::Sine: return "sine";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Scale: return "scale";
        case Op::Square: return "square";
        case Op::Sqrt: return "sqrt";
        case Op::Div: return "div";
        case Op::Concat: return "concat";
        case Op::Slice: return "slice";
        case Op::SumAll: return "sum";
        case Op::MeanAll: return "mean";
        case Op::SumCols: return "sumcols";
        case Op::SketchApply: return "sketch";
    }
    return "?";
}

template <typename T>
class Graph {
public:
    using Id = std::uint32_t;

    Id input(const std::string& name, Tensor<T> value) {
        require_finite(value, "Graph::input");
        const Id id = push(Op::Input, {}, std::move(value), true);
        named_[name] = id;
        return id;
    }

    Id constant(Tensor<T> value) {
        require_finite(value, "Graph::constant");
        return push(Op::Constant, {}, std::move(value), false);
    }

    Id affine(Id x, Id w, Id b) {
        const Tensor<T>& X = val(x);
        const Tensor<T>& W = val(w);
        const Tensor<T>& B = val(b);
        if (X.ndim() != 2 || W.ndim() != 2 || B.ndim() != 1 || X.cols() != W.cols() ||
            B.numel() != W.rows())
            throw ShapeError("affine: incompatible shapes " + X.shape_str() + ", " + W.shape_str() +
                             ", " + B.shape_str());
        const std::size_t r = X.rows(), in = X.cols(), out = W.rows();
        Tensor<T> y({r, out});
        const T* xp = X.data();
        const T* wp = W.data();
        const T* bp = B.data();
        T* yp = y.data();
        for (std::size_t rr = 0; rr < r; ++rr) {
            const T* xrow = xp + rr * in;
            T* yrow = yp + rr * out;
            for (std::size_t o = 0; o < out; ++o) {
                const T* wrow = wp + o * in;
                T acc = T(0);
                for (std::size_t i = 0; i < in; ++i) acc += xrow[i] * wrow[i];
                yrow[o] = acc + bp[o];
            }
        }
        return push(Op::Affine, {x, w, b}, std::move(y));
    }

    Id sine(Id x) {
        const Tensor<T>& X = val(x);
        Tensor<T> y(X.shape());
        Tensor<T> c(X.shape());
        detail::sincos_range(X.data(), y.data(), c.data(), X.numel());
        const Id id = push(Op::Sine, {x}, std::move(y));
        nodes_[id].aux = std::move(c);  // cos cache for the backward pass
        return id;
    }

    Id add(Id a, Id b) {
        require_same_shape(val(a), val(b), "add");
        Tensor<T> y = val(a);
        const Tensor<T>& B = val(b);
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] += B[i];
        return push(Op::Add, {a, b}, std::move(y));
    }

    Id sub(Id a, Id b) {
        require_same_shape(val(a), val(b), "sub");
        Tensor<T> y = val(a);
        const Tensor<T>& B = val(b);
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] -= B[i];
        return push(Op::Sub, {a, b}, std::move(y));
    }

    Id scale(Id x, double c) {
        Tensor<T> y = val(x);
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] = static_cast<T>(c * y[i]);
        const Id id = push(Op::Scale, {x}, std::move(y));
        nodes_[id].attr = c;
        return id;
    }

    Id square(Id x) {
        Tensor<T> y = val(x);
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= y[i];
        return push(Op::Square, {x}, std::move(y));
    }

    Id sqrt_(Id x) {
        Tensor<T> y = val(x);
        for (std::size_t i = 0; i < y.numel(); ++i) {
            if (y[i] < T(0)) throw NumericError("sqrt: negative input");
            y[i] = std::sqrt(y[i]);
        }
        return push(Op::Sqrt, {x}, std::move(y));
    }

    Id div(Id a, Id b) {
        const Tensor<T>& A = val(a);
        const Tensor<T>& B = val(b);
        if (B.numel() != 1 && !A.same_shape(B)) throw ShapeError("div: shape mismatch");
        Tensor<T> y = A;
        if (B.numel() == 1) {
            for (std::size_t i = 0; i < y.numel(); ++i) y[i] /= B[0];
        } else {
            for (std::size_t i = 0; i < y.numel(); ++i) y[i] /= B[i];
        }
        return push(Op::Div, {a, b}, std::move(y));
    }

    Id concat(const std::vector<Id>& parts) {
        if (parts.empty()) throw ShapeError("concat: no inputs");
        std::size_t total = 0;
        for (Id p : parts) total += val(p).numel();
        Tensor<T> y({total});
        std::size_t off = 0;
        for (Id p : parts) {
            const Tensor<T>& v = val(p);
            for (std::size_t i = 0; i < v.numel(); ++i) y[off + i] = v[i];
            off += v.numel();
        }
        return push(Op::Concat, parts, std::move(y));
    }

    // Contiguous flat range of x, reshaped. offset/shape in elements.
    Id slice(Id x, std::size_t offset, std::vector<std::size_t> shape) {
        const Tensor<T>& X = val(x);
        std::size_t len = 1;
        for (std::size_t d : shape) len *= d;
        if (shape.empty() || offset + len > X.numel())
            throw ShapeError("slice: range out of bounds");
        Tensor<T> y(std::move(shape));
        for (std::size_t i = 0; i < len; ++i) y[i] = X[offset + i];
        const Id id = push(Op::Slice, {x}, std::move(y));
        nodes_[id].offset = offset;
        return id;
    }

    Id reshape(Id x, std::vector<std::size_t> shape) { return slice(x, 0, std::move(shape)); }

    Id sum(Id x) {
        T acc = T(0);
        const Tensor<T>& X = val(x);
        for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i];
        return push(Op::SumAll, {x}, Tensor<T>::scalar(acc));
    }

    Id mean(Id x) {
        const Tensor<T>& X = val(x);
        T acc = T(0);
        for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i];
        return push(Op::MeanAll, {x}, Tensor<T>::scalar(acc / static_cast<T>(X.numel())));
    }

    Id sum_cols(Id x) {
        const Tensor<T>& X = val(x);
        if (X.ndim() != 2) throw ShapeError("sum_cols: expects 2-D");
        const std::size_t r = X.rows(), c = X.cols();
        Tensor<T> y({c});
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) y[j] += X.at(i, j);
        return push(Op::SumCols, {x}, std::move(y));
    }

    // Constant linear operator node; caller keeps `op` alive for the graph's
    // lifetime (the trainer owns the step's operators).
    Id sketch_apply(Id x, const SketchOperator<T>* op) {
        Tensor<T> y = op->apply(val(x));
        const Id id = push(Op::SketchApply, {x}, std::move(y));
        nodes_[id].sketch = op;
        return id;
    }

    const Tensor<T>& value(Id id) const { return nodes_.at(id).value; }
    std::size_t size() const { return nodes_.size(); }

    // Rebind a named leaf; shape must be unchanged. Call forward() afterwards.
    void set_input(const std::string& name, Tensor<T> v) {
        const Id id = named_id(name);
        require_same_shape(nodes_[id].value, v, "set_input");
        require_finite(v, "set_input");
        nodes_[id].value = std::move(v);
        stale_ = true;
    }

    // Re-evaluate every node in topological (= insertion) order and return the
    // value of `out`. A no-op unless an input was rebound.
    const Tensor<T>& forward(Id out) {
        if (stale_) {
            for (Id i = 0; i < nodes_.size(); ++i) recompute(i);
            stale_ = false;
        }
        return nodes_.at(out).value;
    }

    // Reverse pass from `out` with the given seed adjoint. Each node is visited
    // exactly once, in reverse insertion order. Gradients accumulate into every
    // differentiable leaf reachable from `out`.
    void backward(Id out, const Tensor<T>& seed) {
        require_same_shape(nodes_.at(out).value, seed, "backward seed");
        grads_.assign(nodes_.size(), Tensor<T>());
        grads_[out] = seed;
        for (std::size_t ii = nodes_.size(); ii-- > 0;) {
            const Id id = static_cast<Id>(ii);
            if (id > out || grads_[id].numel() == 0) continue;
            Node& node = nodes_[id];
            if (!node.value.all_finite() || !grads_[id].all_finite())
                throw NumericError(std::string("backward: non-finite gradient at ") +
                                   op_name(node.op) + " node #" + std::to_string(id));
            if (!node.needs_grad || node.op == Op::Input || node.op == Op::Constant) continue;
            propagate(id);
        }
        has_grads_ = true;
    }

    // Convenience: scalar output, seed gradient 1.
    void backward(Id out) { backward(out, Tensor<T>::scalar(T(1))); }

    const Tensor<T>& grad(Id id) const {
        if (!has_grads_) throw NumericError("grad: backward has not run");
        const Tensor<T>& g = grads_.at(id);
        if (g.numel() == 0) zero_grad_cache_ = Tensor<T>(nodes_.at(id).value.shape());
        return g.numel() ? g : zero_grad_cache_;
    }

    const Tensor<T>& grad(const std::string& name) const { return grad(named_id(name)); }

    Id named_id(const std::string& name) const {
        auto it = named_.find(name);
        if (it == named_.end()) throw ConfigError("Graph: unknown input '" + name + "'");
        return it->second;
    }

private:
    struct Node {
        Op op;
        std::vector<Id> in;
        Tensor<T> value;
        Tensor<T> aux;  // Sine: cached cos of the input
        bool needs_grad = false;
        double attr = 0.0;       // Scale factor
        std::size_t offset = 0;  // Slice offset
        const SketchOperator<T>* sketch = nullptr;
    };

    Tensor<T>& val(Id id) { return nodes_.at(id).value; }

    Id push(Op op, std::vector<Id> in, Tensor<T> value, bool needs_grad_leaf = false) {
        Node node;
        node.op = op;
        node.in = std::move(in);
        node.value = std::move(value);
        node.needs_grad = needs_grad_leaf;
        for (Id i : node.in) node.needs_grad = node.needs_grad || nodes_[i].needs_grad;
        if (!node.value.all_finite())
            throw NumericError(std::string("forward: non-finite value in ") + op_name(op) +
                               " node #" + std::to_string(nodes_.size()));
        nodes_.push_back(std::move(node));
        has_grads_ = false;
        return static_cast<Id>(nodes_.size() - 1);
    }

    void accum(Id target, const Tensor<T>& g) {
        if (!nodes_[target].needs_grad) return;
        if (grads_[target].numel() == 0) {
            grads_[target] = g;
        } else {
            Tensor<T>& acc = grads_[target];
            for (std::size_t i = 0; i < acc.numel(); ++i) acc[i] += g[i];
        }
    }

    void propagate(Id id) {
        Node& node = nodes_[id];
        const Tensor<T>& gy = grads_[id];
        switch (node.op) {
            case Op::Input:
            case Op::Constant:
                break;
            case Op::Affine: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                const Tensor<T>& W = nodes_[node.in[1]].value;
                const std::size_t r = X.rows(), in = X.cols(), out = W.rows();
                if (nodes_[node.in[0]].needs_grad) {
                    Tensor<T> gx({r, in});
                    for (std::size_t rr = 0; rr < r; ++rr)
                        for (std::size_t o = 0; o < out; ++o) {
                            const T g = gy.at(rr, o);
                            const T* wrow = W.data() + o * in;
                            T* gxrow = gx.data() + rr * in;
                            for (std::size_t i = 0; i < in; ++i) gxrow[i] += g * wrow[i];
                        }
                    accum(node.in[0], gx);
                }
                if (nodes_[node.in[1]].needs_grad) {
                    Tensor<T> gw({out, in});
                    for (std::size_t rr = 0; rr < r; ++rr) {
                        const T* xrow = X.data() + rr * in;
                        for (std::size_t o = 0; o < out; ++o) {
                            const T g = gy.at(rr, o);
                            T* gwrow = gw.data() + o * in;
                            for (std::size_t i = 0; i < in; ++i) gwrow[i] += g * xrow[i];
                        }
                    }
                    accum(node.in[1], gw);
                }
                if (nodes_[node.in[2]].needs_grad) {
                    Tensor<T> gb({out});
                    for (std::size_t rr = 0; rr < r; ++rr)
                        for (std::size_t o = 0; o < out; ++o) gb[o] += gy.at(rr, o);
                    accum(node.in[2], gb);
                }
                break;
            }
            case Op::Sine: {
                const Tensor<T>& cosx = node.aux;
                Tensor<T> gx(cosx.shape());
                for (std::size_t i = 0; i < cosx.numel(); ++i) gx[i] = gy[i] * cosx[i];
                accum(node.in[0], gx);
                break;
            }
            case Op::Add:
                accum(node.in[0], gy);
                accum(node.in[1], gy);
                break;
            case Op::Sub: {
                accum(node.in[0], gy);
                if (nodes_[node.in[1]].needs_grad) {
                    Tensor<T> gb(gy.shape());
                    for (std::size_t i = 0; i < gy.numel(); ++i) gb[i] = -gy[i];
                    accum(node.in[1], gb);
                }
                break;
            }
            case Op::Scale: {
                Tensor<T> gx(gy.shape());
                for (std::size_t i = 0; i < gy.numel(); ++i)
                    gx[i] = static_cast<T>(node.attr * gy[i]);
                accum(node.in[0], gx);
                break;
            }
            case Op::Square: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                Tensor<T> gx(X.shape());
                for (std::size_t i = 0; i < X.numel(); ++i) gx[i] = T(2) * X[i] * gy[i];
                accum(node.in[0], gx);
                break;
            }
            case Op::Sqrt: {
                const Tensor<T>& Y = node.value;
                Tensor<T> gx(Y.shape());
                for (std::size_t i = 0; i < Y.numel(); ++i) gx[i] = gy[i] / (T(2) * Y[i]);
                accum(node.in[0], gx);
                break;
            }
            case Op::Div: {
                const Tensor<T>& A = nodes_[node.in[0]].value;
                const Tensor<T>& B = nodes_[node.in[1]].value;
                if (B.numel() == 1) {
                    if (nodes_[node.in[0]].needs_grad) {
                        Tensor<T> ga(A.shape());
                        for (std::size_t i = 0; i < A.numel(); ++i) ga[i] = gy[i] / B[0];
                        accum(node.in[0], ga);
                    }
                    if (nodes_[node.in[1]].needs_grad) {
                        T acc = T(0);
                        for (std::size_t i = 0; i < A.numel(); ++i)
                            acc -= gy[i] * A[i] / (B[0] * B[0]);
                        accum(node.in[1], Tensor<T>::scalar(acc));
                    }
                } else {
                    if (nodes_[node.in[0]].needs_grad) {
                        Tensor<T> ga(A.shape());
                        for (std::size_t i = 0; i < A.numel(); ++i) ga[i] = gy[i] / B[i];
                        accum(node.in[0], ga);
                    }
                    if (nodes_[node.in[1]].needs_grad) {
                        Tensor<T> gb(B.shape());
                        for (std::size_t i = 0; i < B.numel(); ++i)
                            gb[i] = -gy[i] * A[i] / (B[i] * B[i]);
                        accum(node.in[1], gb);
                    }
                }
                break;
            }
            case Op::Concat: {
                std::size_t off = 0;
                for (Id p : node.in) {
                    const Tensor<T>& v = nodes_[p].value;
                    if (nodes_[p].needs_grad) {
                        Tensor<T> gp(v.shape());
                        for (std::size_t i = 0; i < v.numel(); ++i) gp[i] = gy[off + i];
                        accum(p, gp);
                    }
                    off += v.numel();
                }
                break;
            }
            case Op::Slice: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                Tensor<T> gx(X.shape());
                for (std::size_t i = 0; i < gy.numel(); ++i) gx[node.offset + i] = gy[i];
                accum(node.in[0], gx);
                break;
            }
            case Op::SumAll: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                accum(node.in[0], Tensor<T>::full(X.shape(), gy[0]));
                break;
            }
            case Op::MeanAll: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                accum(node.in[0],
                      Tensor<T>::full(X.shape(), gy[0] / static_cast<T>(X.numel())));
                break;
            }
            case Op::SumCols: {
                const Tensor<T>& X = nodes_[node.in[0]].value;
                Tensor<T> gx(X.shape());
                const std::size_t r = X.rows(), c = X.cols();
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) gx.at(i, j) = gy[j];
                accum(node.in[0], gx);
                break;
            }
            case Op::SketchApply:
                accum(node.in[0], node.sketch->apply_adjoint(gy));
                break;
        }
    }

    void recompute(Id id) {
        Node& node = nodes_[id];
        const auto& in = node.in;
        switch (node.op) {
            case Op::Input:
            case Op::Constant:
                return;
            case Op::Affine: {
                const Tensor<T>& X = nodes_[in[0]].value;
                const Tensor<T>& W = nodes_[in[1]].value;
                const Tensor<T>& B = nodes_[in[2]].value;
                const std::size_t r = X.rows(), icnt = X.cols(), out = W.rows();
                for (std::size_t rr = 0; rr < r; ++rr)
                    for (std::size_t o = 0; o < out; ++o) {
                        const T* xrow = X.data() + rr * icnt;
                        const T* wrow = W.data() + o * icnt;
                        T acc = T(0);
                        for (std::size_t i = 0; i < icnt; ++i) acc += xrow[i] * wrow[i];
                        node.value.at(rr, o) = acc + B[o];
                    }
                break;
            }
            case Op::Sine: {
                const Tensor<T>& X = nodes_[in[0]].value;
                detail::sincos_range(X.data(), node.value.data(), node.aux.data(), X.numel());
                break;
            }
            case Op::Add: {
                const Tensor<T>& A = nodes_[in[0]].value;
                const Tensor<T>& B = nodes_[in[1]].value;
                for (std::size_t i = 0; i < A.numel(); ++i) node.value[i] = A[i] + B[i];
                break;
            }
            case Op::Sub: {
                const Tensor<T>& A = nodes_[in[0]].value;
                const Tensor<T>& B = nodes_[in[1]].value;
                for (std::size_t i = 0; i < A.numel(); ++i) node.value[i] = A[i] - B[i];
                break;
            }
            case Op::Scale: {
                const Tensor<T>& X = nodes_[in[0]].value;
                for (std::size_t i = 0; i < X.numel(); ++i)
                    node.value[i] = static_cast<T>(node.attr * X[i]);
                break;
            }
            case Op::Square: {
                const Tensor<T>& X = nodes_[in[0]].value;
                for (std::size_t i = 0; i < X.numel(); ++i) node.value[i] = X[i] * X[i];
                break;
            }
            case Op::Sqrt: {
                const Tensor<T>& X = nodes_[in[0]].value;
                for (std::size_t i = 0; i < X.numel(); ++i) {
                    if (X[i] < T(0)) throw NumericError("sqrt: negative input");
                    node.value[i] = std::sqrt(X[i]);
                }
                break;
            }
            case Op::Div: {
                const Tensor<T>& A = nodes_[in[0]].value;
                const Tensor<T>& B = nodes_[in[1]].value;
                if (B.numel() == 1)
                    for (std::size_t i = 0; i < A.numel(); ++i) node.value[i] = A[i] / B[0];
                else
                    for (std::size_t i = 0; i < A.numel(); ++i) node.value[i] = A[i] / B[i];
                break;
            }
            case Op::Concat: {
                std::size_t off = 0;
                for (Id p : in) {
                    const Tensor<T>& v = nodes_[p].value;
                    for (std::size_t i = 0; i < v.numel(); ++i) node.value[off + i] = v[i];
                    off += v.numel();
                }
                break;
            }
            case Op::Slice: {
                const Tensor<T>& X = nodes_[in[0]].value;
                for (std::size_t i = 0; i < node.value.numel(); ++i)
                    node.value[i] = X[node.offset + i];
                break;
            }
            case Op::SumAll: {
                const Tensor<T>& X = nodes_[in[0]].value;
                T acc = T(0);
                for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i];
                node.value[0] = acc;
                break;
            }
            case Op::MeanAll: {
                const Tensor<T>& X = nodes_[in[0]].value;
                T acc = T(0);
                for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i];
                node.value[0] = acc / static_cast<T>(X.numel());
                break;
            }
            case Op::SumCols: {
                const Tensor<T>& X = nodes_[in[0]].value;
                const std::size_t r = X.rows(), c = X.cols();
                for (std::size_t j = 0; j < c; ++j) node.value[j] = T(0);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) node.value[j] += X.at(i, j);
                break;
            }
            case Op::SketchApply:
                node.value = node.sketch->apply(nodes_[in[0]].value);
                break;
        }
        if (!node.value.all_finite())
            throw NumericError(std::string("forward: non-finite value in ") + op_name(node.op) +
                               " node #" + std::to_string(id));
    }

    std::vector<Node> nodes_;
    std::unordered_map<std::string, Id> named_;
    std::vector<Tensor<T>> grads_;
    mutable Tensor<T> zero_grad_cache_;
    bool has_grads_ = false;
    bool stale_ = false;
};

// Central-difference gradient of a scalar function, 64-bit. The independent
// oracle for the reverse-mode engine; kept free of any Graph machinery.
inline Tensor<double> finite_diff_gradient(const std::function<double(const Tensor<double>&)>& f,
                                           const Tensor<double>& params, double h) {
    if (h <= 0) throw ConfigError("finite_diff_gradient: h must be positive");
    Tensor<double> g(params.shape());
    Tensor<double> p = params;
    for (std::size_t i = 0; i < p.numel(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double fp = f(p);
        p[i] = orig - h;
        const double fm = f(p);
        p[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("finite_diff_gradient: non-finite function value");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Single-coordinate version for probing large parameter vectors.
inline double finite_diff_partial(const std::function<double(const Tensor<double>&)>& f,
                                  const Tensor<double>& params, std::size_t i, double h) {
    if (h <= 0) throw ConfigError("finite_diff_partial: h must be positive");
    Tensor<double> p = params;
    const double orig = p[i];
    p[i] = orig + h;
    const double fp = f(p);
    p[i] = orig - h;
    const double fm = f(p);
    if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericError("finite_diff_partial: non-finite function value");
    return (fp - fm) / (2.0 * h);
}

} // namespace inc
