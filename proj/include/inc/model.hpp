#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "inc/binio.hpp"
#include "inc/errors.hpp"
#include "inc/graph.hpp"
#include "inc/rng.hpp"
#include "inc/tensor.hpp"

namespace inc {

// Residual sine network: first layer y = sin(omega0 * (W x + b)), then
// `blocks` residual blocks x + sin(W2 sin(W1 x + b1) + b2), then a final
// affine with no activation.
struct SirenLayout {
    std::size_t in_dim = 1;
    std::size_t out_dim = 1;
    std::size_t width = 16;
    std::size_t blocks = 1;
    double omega0 = 30.0;

    void validate() const {
        if (in_dim < 1 || out_dim < 1 || width < 1 || blocks < 1)
            throw ConfigError("SirenLayout: dims, width and blocks must all be >= 1");
    }

    std::size_t param_count() const {
        return width * in_dim + width                      // first layer
               + blocks * 2 * (width * width + width)      // residual blocks
               + out_dim * width + out_dim;                // final affine
    }
};

// Shapes and offsets of one layer's (W, b) inside a flat parameter vector.
struct LayerSlice {
    std::size_t w_off, w_rows, w_cols;
    std::size_t b_off, b_len;
};

inline std::vector<LayerSlice> layer_slices(const SirenLayout& l) {
    std::vector<LayerSlice> out;
    std::size_t off = 0;
    auto push = [&](std::size_t rows, std::size_t cols) {
        LayerSlice s{off, rows, cols, off + rows * cols, rows};
        off += rows * cols + rows;
        out.push_back(s);
    };
    push(l.width, l.in_dim);
    for (std::size_t b = 0; b < l.blocks; ++b) {
        push(l.width, l.width);
        push(l.width, l.width);
    }
    push(l.out_dim, l.width);
    return out;
}

// SIREN initialization: first layer U(-1/in, 1/in); every later weight
// U(-sqrt(6/fan_in)/omega0, +sqrt(6/fan_in)/omega0); biases zero.
template <typename T>
Tensor<T> init_siren(const SirenLayout& layout, std::uint64_t seed) {
    layout.validate();
    Tensor<T> params({layout.param_count()});
    Rng rng(seed);
    const auto slices = layer_slices(layout);
    for (std::size_t li = 0; li < slices.size(); ++li) {
        const LayerSlice& s = slices[li];
        const double bound = (li == 0)
                                 ? 1.0 / static_cast<double>(s.w_cols)
                                 : std::sqrt(6.0 / static_cast<double>(s.w_cols)) / layout.omega0;
        for (std::size_t i = 0; i < s.w_rows * s.w_cols; ++i)
            params[s.w_off + i] = static_cast<T>(rng.uniform(-bound, bound));
        // biases stay zero
    }
    return params;
}

// Emit the forward pass of a SIREN whose flat parameters live at `params`
// (an existing graph node, leaf or computed) starting at `base_offset`.
// `x` is an (r x in_dim) node. Returns the (r x out_dim) output node.
template <typename T>
typename Graph<T>::Id emit_siren(Graph<T>& g, const SirenLayout& layout,
                                 typename Graph<T>::Id params, std::size_t base_offset,
                                 typename Graph<T>::Id x) {
    using Id = typename Graph<T>::Id;
    const auto slices = layer_slices(layout);
    auto layer = [&](const LayerSlice& s, Id in) {
        const Id w = g.slice(params, base_offset + s.w_off, {s.w_rows, s.w_cols});
        const Id b = g.slice(params, base_offset + s.b_off, {s.b_len});
        return g.affine(in, w, b);
    };
    Id h = g.sine(g.scale(layer(slices[0], x), layout.omega0));
    for (std::size_t bi = 0; bi < layout.blocks; ++bi) {
        const Id inner = g.sine(layer(slices[1 + 2 * bi], h));
        const Id outer = g.sine(layer(slices[2 + 2 * bi], inner));
        h = g.add(h, outer);
    }
    return layer(slices.back(), h);
}

// Plain (tape-free) evaluation with the same accumulation order as the graph
// path, for reconstruction and metrics.
template <typename T>
Tensor<T> eval_siren(const SirenLayout& layout, const T* params, const Tensor<T>& x) {
    if (x.ndim() != 2 || x.cols() != layout.in_dim)
        throw ShapeError("eval_siren: input shape " + x.shape_str());
    const auto slices = layer_slices(layout);
    const std::size_t r = x.rows();
    auto layer = [&](const LayerSlice& s, const Tensor<T>& in, Tensor<T>& out) {
        const T* w = params + s.w_off;
        const T* b = params + s.b_off;
        for (std::size_t rr = 0; rr < r; ++rr) {
            const T* xrow = in.data() + rr * s.w_cols;
            T* yrow = out.data() + rr * s.w_rows;
            for (std::size_t o = 0; o < s.w_rows; ++o) {
                const T* wrow = w + o * s.w_cols;
                T acc = T(0);
                for (std::size_t i = 0; i < s.w_cols; ++i) acc += xrow[i] * wrow[i];
                yrow[o] = acc + b[o];
            }
        }
    };
    Tensor<T> h({r, layout.width});
    layer(slices[0], x, h);
    // same rounding as the graph path: scale in double, cast, then sine
    for (auto& v : h.vec()) v = std::sin(static_cast<T>(layout.omega0 * static_cast<double>(v)));
    Tensor<T> tmp({r, layout.width});
    for (std::size_t bi = 0; bi < layout.blocks; ++bi) {
        layer(slices[1 + 2 * bi], h, tmp);
        for (auto& v : tmp.vec()) v = std::sin(v);
        Tensor<T> tmp2({r, layout.width});
        layer(slices[2 + 2 * bi], tmp, tmp2);
        for (std::size_t i = 0; i < h.numel(); ++i) h[i] += std::sin(tmp2[i]);
    }
    Tensor<T> out({r, layout.out_dim});
    layer(slices.back(), h, out);
    require_finite(out, "eval_siren");
    return out;
}

// Fig-style compressor: a time-conditioned hypernetwork emits the flat
// parameter vector theta(t) of the target INR; the target maps (x, t) to the
// reconstructed field. Only hyper_params are trainable (and stored).
template <typename T>
struct CompressorModel {
    SirenLayout hyper;   // in_dim 1, out_dim == target.param_count()
    SirenLayout target;  // in_dim d+1, out_dim c
    Tensor<T> hyper_params;
    std::size_t t_max = 1;  // snapshot horizon used for the time mapping

    static CompressorModel make(SirenLayout hyper_layout, SirenLayout target_layout,
                                std::size_t t_max) {
        target_layout.validate();
        hyper_layout.in_dim = 1;
        hyper_layout.out_dim = target_layout.param_count();
        hyper_layout.validate();
        CompressorModel m;
        m.hyper = hyper_layout;
        m.target = target_layout;
        m.hyper_params = Tensor<T>({hyper_layout.param_count()});
        m.t_max = t_max;
        return m;
    }

    std::size_t param_count() const { return hyper.param_count(); }

    // Map snapshot index t in [1, t_max] to [-1, 1].
    double tau(std::size_t t) const {
        if (t_max <= 1) return 0.0;
        return 2.0 * (static_cast<double>(t) - 1.0) / (static_cast<double>(t_max) - 1.0) - 1.0;
    }
};

// Hypernetwork output-layer surgery: the final bias is set to the exact SIREN
// initialization of the target network and the final weights are scaled down,
// so theta(t) starts at a fresh target INR for every t.
template <typename T>
void hyper_init(CompressorModel<T>& model, double scale, std::uint64_t seed) {
    model.hyper_params = init_siren<T>(model.hyper, mix_seed(seed, 1));
    const Tensor<T> target_init = init_siren<T>(model.target, mix_seed(seed, 2));
    const auto slices = layer_slices(model.hyper);
    const LayerSlice& last = slices.back();
    T* p = model.hyper_params.data();
    for (std::size_t i = 0; i < last.w_rows * last.w_cols; ++i)
        p[last.w_off + i] = static_cast<T>(scale * p[last.w_off + i]);
    for (std::size_t i = 0; i < last.b_len; ++i) p[last.b_off + i] = target_init[i];
}

// theta(t): plain evaluation of the hypernetwork at one time coordinate.
template <typename T>
Tensor<T> hyper_forward(const CompressorModel<T>& model, std::size_t t) {
    Tensor<T> in({1, 1});
    in[0] = static_cast<T>(model.tau(t));
    Tensor<T> theta = eval_siren(model.hyper, model.hyper_params.data(), in);
    return theta.reshaped({model.target.param_count()});
}

// Append the time coordinate as a last column: (n x d) -> (n x d+1).
template <typename T>
Tensor<T> with_time_column(const Tensor<T>& x, double tau) {
    const std::size_t n = x.rows(), d = x.cols();
    Tensor<T> out({n, d + 1});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) out.at(i, j) = x.at(i, j);
        out.at(i, d) = static_cast<T>(tau);
    }
    return out;
}

// Target INR evaluated under an explicit theta.
template <typename T>
Tensor<T> target_forward(const CompressorModel<T>& model, const Tensor<T>& theta,
                         const Tensor<T>& x, std::size_t t) {
    if (theta.numel() != model.target.param_count())
        throw ShapeError("target_forward: theta length " + std::to_string(theta.numel()) +
                         " != " + std::to_string(model.target.param_count()));
    const Tensor<T> xt = with_time_column(x, model.tau(t));
    return eval_siren(model.target, theta.data(), xt);
}

// Full compressor evaluation: theta(t), then the target on (x, t).
template <typename T>
Tensor<T> full_forward(const CompressorModel<T>& model, const Tensor<T>& x, std::size_t t) {
    const Tensor<T> theta = hyper_forward(model, t);
    return target_forward(model, theta, x, t);
}

// Graph version of full_forward for training. `hyper_params` must already be
// a node in `g` (the shared trainable leaf); returns the (n x c) output node.
template <typename T>
typename Graph<T>::Id emit_full_forward(Graph<T>& g, const CompressorModel<T>& model,
                                        typename Graph<T>::Id hyper_params,
                                        const Tensor<T>& x, std::size_t t) {
    using Id = typename Graph<T>::Id;
    Tensor<T> tin({1, 1});
    tin[0] = static_cast<T>(model.tau(t));
    const Id tnode = g.constant(std::move(tin));
    const Id theta2d = emit_siren(g, model.hyper, hyper_params, 0, tnode);
    const Id theta = g.reshape(theta2d, {model.target.param_count()});
    const Id xt = g.constant(with_time_column(x, model.tau(t)));
    return emit_siren(g, model.target, theta, 0, xt);
}

// Eq.-1 style compression rate: stored values / parameters.
inline double compression_rate(std::size_t t_count, std::size_t n, std::size_t c,
                               std::size_t param_count) {
    if (param_count == 0) throw ConfigError("compression_rate: param_count must be positive");
    return static_cast<double>(t_count) * static_cast<double>(n) * static_cast<double>(c) /
           static_cast<double>(param_count);
}

// ---------------------------------------------------------------------------
// Model artifact ("INCM"): layouts, omega0 values, precision tag, time
// horizon, and the flat hypernetwork parameter vector. This file is the
// compressed form of a dataset.

namespace detail {

inline void write_layout(BinWriter& w, const SirenLayout& l) {
    w.u64(l.in_dim);
    w.u64(l.out_dim);
    w.u64(l.width);
    w.u64(l.blocks);
    w.f64(l.omega0);
}

inline SirenLayout read_layout(BinReader& r) {
    SirenLayout l;
    l.in_dim = r.u64();
    l.out_dim = r.u64();
    l.width = r.u64();
    l.blocks = r.u64();
    l.omega0 = r.f64();
    return l;
}

} // namespace detail

inline constexpr char kModelMagic[4] = {'I', 'N', 'C', 'M'};
inline constexpr std::uint16_t kModelVersion = 1;

template <typename T>
void write_model(const std::string& path, const CompressorModel<T>& model) {
    BinWriter w(path);
    w.magic(kModelMagic);
    w.u16(kModelVersion);
    w.u16(sizeof(T) * 8);
    detail::write_layout(w, model.hyper);
    detail::write_layout(w, model.target);
    w.u64(model.t_max);
    w.u64(model.hyper_params.numel());
    for (std::size_t i = 0; i < model.hyper_params.numel(); ++i) {
        if constexpr (sizeof(T) == 4)
            w.f32(static_cast<float>(model.hyper_params[i]));
        else
            w.f64(static_cast<double>(model.hyper_params[i]));
    }
    w.close();
}

template <typename T>
CompressorModel<T> read_model(const std::string& path) {
    BinReader r(path);
    r.expect_magic(kModelMagic, "model");
    const std::uint16_t version = r.u16();
    if (version != kModelVersion)
        throw IoError("unsupported model version " + std::to_string(version));
    const std::uint16_t bits = r.u16();
    if (bits != sizeof(T) * 8)
        throw IoError("model precision is " + std::to_string(bits) + "-bit, expected " +
                      std::to_string(sizeof(T) * 8));
    CompressorModel<T> m;
    m.hyper = detail::read_layout(r);
    m.target = detail::read_layout(r);
    m.t_max = r.u64();
    const std::uint64_t count = r.u64();
    if (count != m.hyper.param_count())
        throw IoError("model parameter count mismatch");
    m.hyper_params = Tensor<T>({count});
    for (std::uint64_t i = 0; i < count; ++i) {
        if constexpr (sizeof(T) == 4)
            m.hyper_params[i] = static_cast<T>(r.f32());
        else
            m.hyper_params[i] = static_cast<T>(r.f64());
    }
    return m;
}

} // namespace inc
