#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>

#include "inc/graph.hpp"
#include "inc/rng.hpp"
#include "inc/tensor.hpp"

using namespace inc;
using G = Graph<double>;

namespace {

Tensor<double> random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
    Tensor<double> t(std::move(shape));
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = scale * rng.normal();
    return t;
}

// Checks d(output)/d(params) of `build` against central finite differences.
// `build` assembles a fresh graph ending in a scalar node from a flat leaf.
void check_gradient(const std::function<G::Id(G&, G::Id)>& build, const Tensor<double>& params,
                    double tol = 1e-7) {
    G g;
    const auto leaf = g.input("p", params);
    const auto out = build(g, leaf);
    REQUIRE(g.value(out).numel() == 1);
    g.backward(out);
    const Tensor<double> analytic = g.grad("p");

    const auto f = [&](const Tensor<double>& p) {
        G h;
        const auto l = h.input("p", p);
        return h.value(build(h, l))[0];
    };
    const Tensor<double> numeric = finite_diff_gradient(f, params, 1e-6);
    for (std::size_t i = 0; i < params.numel(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-4});
        REQUIRE(std::abs(analytic[i] - numeric[i]) / scale < tol);
    }
}

} // namespace

TEST_CASE("identity affine passes input through") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({1.0, 2.0}));
    const auto w = g.constant(Tensor<double>({2, 2}, {1, 0, 0, 1}));
    const auto b = g.constant(Tensor<double>({2}));
    const auto y = g.affine(x, w, b);
    REQUIRE(g.value(y)[0] == 1.0);
    REQUIRE(g.value(y)[1] == 2.0);
}

TEST_CASE("sine node values") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({0.0, std::numbers::pi / 2}));
    const auto y = g.sine(x);
    REQUIRE(g.value(y)[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(g.value(y)[1] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("affine then sine composition") {
    // W=[[2]], b=[1], x=[0] -> sin(1)
    G g;
    const auto x = g.input("x", Tensor<double>::row({0.0}));
    const auto w = g.constant(Tensor<double>({1, 1}, {2.0}));
    const auto b = g.constant(Tensor<double>({1}, {1.0}));
    const auto y = g.sine(g.affine(x, w, b));
    REQUIRE(g.value(y)[0] == Catch::Approx(std::sin(1.0)).margin(1e-15));
}

TEST_CASE("backward on sine at zero gives cos(0)") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({0.0}));
    const auto y = g.sum(g.sine(x));
    g.backward(y);
    REQUIRE(g.grad("x")[0] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("bilinear gradients of Wx") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({2.0}));
    const auto w = g.input("W", Tensor<double>({1, 1}, {3.0}));
    const auto b = g.constant(Tensor<double>({1}));
    const auto y = g.sum(g.affine(x, w, b));
    g.backward(y);
    REQUIRE(g.grad("W")[0] == 2.0);
    REQUIRE(g.grad("x")[0] == 3.0);
}

TEST_CASE("grad before backward is an error") {
    G g;
    g.input("x", Tensor<double>::row({1.0}));
    REQUIRE_THROWS_AS(g.grad("x"), NumericError);
}

TEST_CASE("per-op gradients match finite differences") {
    Rng rng(17);

    SECTION("affine wrt weights and bias") {
        // params = flat [W(3x2), b(3)]; input fixed.
        Tensor<double> p = random_tensor({9}, rng);
        Tensor<double> x = random_tensor({4, 2}, rng);
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto w = g.slice(leaf, 0, {3, 2});
                const auto b = g.slice(leaf, 6, {3});
                return g.sum(g.sine(g.affine(g.constant(x), w, b)));
            },
            p, 1e-6);
    }

    SECTION("affine wrt input rows") {
        Tensor<double> p = random_tensor({6}, rng);
        Tensor<double> w({2, 3}, {0.3, -1.2, 0.7, 0.9, 0.1, -0.4});
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto x = g.reshape(leaf, {2, 3});
                return g.mean(g.affine(x, g.constant(w), g.constant(Tensor<double>({2}))));
            },
            p);
    }

    SECTION("elementwise chain: square, sqrt, scale, sub") {
        Tensor<double> p = random_tensor({5}, rng);
        for (std::size_t i = 0; i < p.numel(); ++i) p[i] = 0.5 + std::abs(p[i]);  // keep sqrt safe
        Tensor<double> q = random_tensor({5}, rng, 0.1);
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto s = g.sqrt_(g.square(g.sub(leaf, g.constant(q))));
                return g.sum(g.scale(s, 1.7));
            },
            p, 1e-5);
    }

    SECTION("div elementwise and by scalar") {
        Tensor<double> p = random_tensor({6}, rng);
        Tensor<double> d = random_tensor({3}, rng);
        for (std::size_t i = 0; i < d.numel(); ++i) d[i] = 1.0 + std::abs(d[i]);
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto a = g.slice(leaf, 0, {3});
                const auto b = g.slice(leaf, 3, {3});
                const auto sq = g.add(g.square(b), g.constant(Tensor<double>::full({3}, 1.0)));
                const auto e = g.div(a, sq);
                const auto s = g.div(g.sum(e), g.constant(Tensor<double>::scalar(2.0)));
                return s;
            },
            p, 1e-6);
    }

    SECTION("concat and slice round trip") {
        Tensor<double> p = random_tensor({7}, rng);
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto a = g.slice(leaf, 0, {3});
                const auto b = g.slice(leaf, 3, {4});
                const auto cat = g.concat({b, a});
                return g.mean(g.square(cat));
            },
            p);
    }

    SECTION("sum_cols reduction") {
        Tensor<double> p = random_tensor({8}, rng);
        check_gradient(
            [&](G& g, G::Id leaf) {
                const auto m = g.reshape(leaf, {4, 2});
                const auto cols = g.sum_cols(g.square(m));
                return g.mean(g.sqrt_(g.add(cols, g.constant(Tensor<double>::full({2}, 0.5)))));
            },
            p, 1e-6);
    }
}

TEST_CASE("required pre-build oracle: two-block sine residual network") {
    // First layer sin(omega*(Wx+b)); two residual blocks h + sin(W2 sin(W1 h + b1) + b2);
    // final affine; scalar mean output. All parameters probed against central
    // finite differences at h=1e-6 in 64-bit, relative error < 1e-5.
    Rng rng(23);
    const std::size_t width = 5, in_dim = 2, out_dim = 1;
    const std::size_t pcount = width * in_dim + width + 2 * 2 * (width * width + width) +
                               out_dim * width + out_dim;
    Tensor<double> p = random_tensor({pcount}, rng, 0.4);
    Tensor<double> x = random_tensor({3, in_dim}, rng);

    const auto build = [&](G& g, G::Id leaf) {
        std::size_t off = 0;
        auto layer = [&](G::Id input, std::size_t rows, std::size_t cols) {
            const auto w = g.slice(leaf, off, {rows, cols});
            off += rows * cols;
            const auto b = g.slice(leaf, off, {rows});
            off += rows;
            return g.affine(input, w, b);
        };
        auto h = g.sine(g.scale(layer(g.constant(x), width, in_dim), 30.0));
        for (int blk = 0; blk < 2; ++blk) {
            const auto inner = g.sine(layer(h, width, width));
            const auto outer = g.sine(layer(inner, width, width));
            h = g.add(h, outer);
        }
        return g.mean(layer(h, out_dim, width));
    };

    G g;
    const auto leaf = g.input("p", p);
    const auto out = build(g, leaf);
    g.backward(out);
    const Tensor<double> analytic = g.grad("p");

    const auto f = [&](const Tensor<double>& q) {
        G h;
        const auto l = h.input("p", q);
        return h.value(build(h, l))[0];
    };
    Rng pick(99);
    for (int probe = 0; probe < 5; ++probe) {
        const std::size_t i = pick.bounded(pcount);
        const double numeric = finite_diff_partial(f, p, i, 1e-6);
        const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
        REQUIRE(std::abs(analytic[i] - numeric) / scale < 1e-5);
    }
}

TEST_CASE("backward is linear in the objective") {
    Rng rng(31);
    Tensor<double> p = random_tensor({6}, rng);
    const double alpha = 1.3, beta = -0.7;

    auto grad_of = [&](const std::function<G::Id(G&, G::Id)>& build) {
        G g;
        const auto leaf = g.input("p", p);
        g.backward(build(g, leaf));
        return g.grad("p");
    };

    auto f_part = [](G& g, G::Id leaf) { return g.sum(g.square(leaf)); };
    auto g_part = [](G& g, G::Id leaf) { return g.mean(g.sine(leaf)); };
    const auto gf = grad_of(f_part);
    const auto gg = grad_of(g_part);
    const auto combined = grad_of([&](G& g, G::Id leaf) {
        return g.add(g.scale(f_part(g, leaf), alpha), g.scale(g_part(g, leaf), beta));
    });
    for (std::size_t i = 0; i < p.numel(); ++i)
        REQUIRE(combined[i] == Catch::Approx(alpha * gf[i] + beta * gg[i]).epsilon(1e-12));
}

TEST_CASE("rebinding inputs recomputes the graph") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({1.0, 2.0}));
    const auto y = g.sum(g.square(x));
    REQUIRE(g.forward(y)[0] == 5.0);
    g.set_input("x", Tensor<double>::row({3.0, 4.0}));
    REQUIRE(g.forward(y)[0] == 25.0);
    REQUIRE_THROWS_AS(g.set_input("x", Tensor<double>::row({1.0, 2.0, 3.0})), ShapeError);
}

TEST_CASE("non-finite forward values abort") {
    G g;
    const auto x = g.input("x", Tensor<double>::row({-1.0}));
    REQUIRE_THROWS_AS(g.sqrt_(x), NumericError);
    const auto a = g.constant(Tensor<double>::row({1.0}));
    const auto zero = g.constant(Tensor<double>::row({0.0}));
    REQUIRE_THROWS_AS(g.div(a, zero), NumericError);
}

TEST_CASE("finite difference oracle basics") {
    const auto square = [](const Tensor<double>& p) { return p[0] * p[0]; };
    const auto g1 = finite_diff_gradient(square, Tensor<double>({1}, {3.0}), 1e-6);
    REQUIRE(g1[0] == Catch::Approx(6.0).margin(1e-6));

    const auto sine = [](const Tensor<double>& p) { return std::sin(p[0]); };
    const auto g2 = finite_diff_gradient(sine, Tensor<double>({1}, {1.0}), 1e-6);
    REQUIRE(g2[0] == Catch::Approx(std::cos(1.0)).margin(1e-6));

    const auto constant = [](const Tensor<double>&) { return 4.0; };
    const auto g3 = finite_diff_gradient(constant, Tensor<double>({3}, {1.0, 2.0, 3.0}), 1e-6);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(g3[i] == 0.0);

    REQUIRE_THROWS_AS(finite_diff_gradient(square, Tensor<double>({1}, {1.0}), 0.0), ConfigError);
}
