#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "inc/metrics.hpp"
#include "inc/rng.hpp"

using namespace inc;

TEST_CASE("frame loss basics") {
    Tensor<double> u({2, 1}, {1.0, 0.0});
    REQUIRE(loss_frame(u, u) == 0.0);

    Tensor<double> zero({2, 1});
    REQUIRE(loss_frame(u, zero) == Catch::Approx(1.0));  // ||U||/||U||

    Tensor<double> urec({2, 1}, {1.0, 1.0});
    REQUIRE(loss_frame(u, urec) == Catch::Approx(1.0));  // ||(0,-1)||/||(1,0)||

    REQUIRE_THROWS_AS(loss_frame(zero, u), NumericError);  // zero-norm channel
    REQUIRE_THROWS_AS(loss_frame(u, Tensor<double>({3, 1})), ShapeError);
}

TEST_CASE("frame loss averages over channels") {
    // channel 0 exact, channel 1 fully wrong -> (0 + 1)/2
    Tensor<double> u({2, 2}, {1.0, 2.0, 1.0, 2.0});
    Tensor<double> urec({2, 2}, {1.0, 0.0, 1.0, 0.0});
    REQUIRE(loss_frame(u, urec) == Catch::Approx(0.5));
}

TEST_CASE("graph frame loss equals the plain value and is differentiable") {
    Rng rng(3);
    Tensor<double> u({8, 2});
    Tensor<double> p({16});
    for (std::size_t i = 0; i < u.numel(); ++i) u[i] = 1.0 + rng.normal();
    for (std::size_t i = 0; i < p.numel(); ++i) p[i] = rng.normal();

    Graph<double> g;
    const auto leaf = g.input("p", p);
    const auto pred = g.reshape(leaf, {8, 2});
    const auto loss = emit_loss_frame(g, pred, u);
    REQUIRE(g.value(loss)[0] == Catch::Approx(loss_frame(u, p.reshaped({8, 2}))).epsilon(1e-12));

    g.backward(loss);
    const auto analytic = g.grad("p");
    const auto f = [&](const Tensor<double>& q) {
        return loss_frame(u, q.reshaped({8, 2}));
    };
    const auto numeric = finite_diff_gradient(f, p, 1e-6);
    for (std::size_t i = 0; i < p.numel(); ++i)
        REQUIRE(analytic[i] == Catch::Approx(numeric[i]).margin(1e-7));
}

TEST_CASE("rfe basics") {
    std::vector<Tensor<double>> u{Tensor<double>({2, 1}, {3.0, 4.0})};
    std::vector<Tensor<double>> same = u;
    REQUIRE(rfe(u, same) == 0.0);

    std::vector<Tensor<double>> twice{Tensor<double>({2, 1}, {6.0, 8.0})};
    REQUIRE(rfe(u, twice) == Catch::Approx(1.0));

    std::vector<Tensor<double>> rec{Tensor<double>({2, 1}, {3.0, 0.0})};
    REQUIRE(rfe(u, rec) == Catch::Approx(0.8));
}

TEST_CASE("rfe accumulates over time before taking the ratio") {
    // two snapshots, single channel: sqrt(sum of squared diffs)/sqrt(sum of squares)
    std::vector<Tensor<double>> u{Tensor<double>({1, 1}, {3.0}), Tensor<double>({1, 1}, {4.0})};
    std::vector<Tensor<double>> rec{Tensor<double>({1, 1}, {3.0}), Tensor<double>({1, 1}, {0.0})};
    REQUIRE(rfe(u, rec) == Catch::Approx(4.0 / 5.0));
}

TEST_CASE("psnr follows the printed formula") {
    // 1 channel, recon max 10, error norm 1 -> 20 dB
    Tensor<double> urec({2, 1}, {10.0, 1.0});
    Tensor<double> u({2, 1}, {10.0, 0.0});
    REQUIRE(psnr(u, urec) == Catch::Approx(20.0));

    // recon max 1, error norm 10 -> -20 dB
    Tensor<double> urec2({2, 1}, {1.0, 1.0});
    Tensor<double> u2({2, 1}, {1.0, 11.0});
    REQUIRE(psnr(u2, urec2) == Catch::Approx(-20.0));

    // exact reconstruction -> +inf sentinel
    REQUIRE(std::isinf(psnr(urec, urec)));
    REQUIRE(psnr(urec, urec) > 0);

    // non-positive reconstruction maximum -> undefined channel
    Tensor<double> neg({2, 1}, {-1.0, -2.0});
    REQUIRE_THROWS_AS(psnr(u, neg), NumericError);
}

TEST_CASE("ideal loss is the mean of frame losses") {
    Tensor<double> u1({2, 1}, {1.0, 1.0});
    Tensor<double> u2({2, 1}, {2.0, 2.0});
    // rec = (1 - a) * u has frame loss exactly a
    auto scaled = [](const Tensor<double>& u, double a) {
        Tensor<double> out = u;
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= (1.0 - a);
        return out;
    };
    std::vector<Tensor<double>> u{u1, u2};
    std::vector<Tensor<double>> rec{scaled(u1, 0.2), scaled(u2, 0.4)};
    REQUIRE(loss_ideal(u, rec) == Catch::Approx(0.3));

    std::vector<Tensor<double>> one{u1};
    std::vector<Tensor<double>> onerec{scaled(u1, 0.2)};
    REQUIRE(loss_ideal(one, onerec) == Catch::Approx(loss_frame(u1, onerec[0])));
    REQUIRE(loss_ideal(u, u) == 0.0);
}
