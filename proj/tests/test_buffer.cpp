#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>

#include "inc/buffer.hpp"
#include "inc/rng.hpp"

using namespace inc;

namespace {

Tensor<float> snapshot_of(std::size_t n, std::size_t c, float fill) {
    auto t = Tensor<float>::full({n, c}, fill);
    return t;
}

} // namespace

TEST_CASE("full queue evicts oldest at capacity one") {
    ReplayBuffer<float> buf(1, 0, 4, 1, 1);
    REQUIRE_FALSE(buf.push_full({1, snapshot_of(4, 1, 1.0f)}).has_value());
    const auto evicted = buf.push_full({2, snapshot_of(4, 1, 2.0f)});
    REQUIRE(evicted.has_value());
    REQUIRE(evicted->t == 1);
    REQUIRE(buf.full_size() == 1);
    REQUIRE(buf.full_queue().front().t == 2);
}

TEST_CASE("under capacity there is no eviction and order is FIFO") {
    ReplayBuffer<float> buf(3, 0, 4, 1, 1);
    REQUIRE_FALSE(buf.push_full({1, snapshot_of(4, 1, 1.0f)}).has_value());
    REQUIRE_FALSE(buf.push_full({2, snapshot_of(4, 1, 2.0f)}).has_value());
    REQUIRE(buf.full_queue()[0].t == 1);
    REQUIRE(buf.full_queue()[1].t == 2);
}

TEST_CASE("zero full capacity is rejected at construction") {
    REQUIRE_THROWS_AS(ReplayBuffer<float>(0, 4, 8, 2, 1), ConfigError);
}

TEST_CASE("sketch queue holds 1..T-1 when the final snapshot is never pushed") {
    const std::size_t t_total = 6;
    ReplayBuffer<float> buf(1, t_total - 1, 8, 2, 1);
    for (std::size_t t = 1; t < t_total; ++t)
        buf.push_sketch({t, mix_seed(5, t), 2, snapshot_of(2, 1, float(t))});
    REQUIRE(buf.sketch_size() == t_total - 1);
    for (std::size_t i = 0; i < t_total - 1; ++i) REQUIRE(buf.sketch_queue()[i].t == i + 1);
}

TEST_CASE("sketch eviction order is strictly increasing in t") {
    ReplayBuffer<float> buf(1, 3, 8, 2, 1);
    std::vector<std::size_t> evictions;
    for (std::size_t t = 1; t <= 8; ++t) {
        auto ev = buf.push_sketch({t, t, 2, snapshot_of(2, 1, float(t))});
        if (ev) evictions.push_back(ev->t);
    }
    REQUIRE(evictions == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("mismatched record shapes are rejected") {
    ReplayBuffer<float> buf(1, 2, 8, 3, 2);
    REQUIRE_THROWS_AS(buf.push_sketch({1, 0, 4, snapshot_of(4, 2, 0.5f)}), ShapeError);
    REQUIRE_THROWS_AS(buf.push_sketch({1, 0, 3, snapshot_of(3, 1, 0.5f)}), ShapeError);
    REQUIRE_THROWS_AS(buf.push_full({1, snapshot_of(7, 2, 0.5f)}), ShapeError);
    ReplayBuffer<float> nosketch(1, 0, 8, 1, 1);
    REQUIRE_THROWS_AS(nosketch.push_sketch({1, 0, 1, snapshot_of(1, 1, 0.f)}), ConfigError);
}

TEST_CASE("batch sampling covers the queue and is uniform") {
    ReplayBuffer<float> buf(1, 100, 8, 1, 1);
    for (std::size_t t = 1; t <= 100; ++t)
        buf.push_sketch({t, t, 1, snapshot_of(1, 1, float(t))});
    Rng rng(17);

    // b >= len returns everything exactly once
    const auto all = buf.sample_sketch_batch(200, rng);
    REQUIRE(all.size() == 100);
    std::map<std::size_t, int> seen;
    for (const auto* r : all) seen[r->t]++;
    for (const auto& [t, cnt] : seen) REQUIRE(cnt == 1);

    // b=1: each record frequency 1/100 within 0.005 over 1e4 draws
    std::map<std::size_t, int> freq;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto one = buf.sample_sketch_batch(1, rng);
        REQUIRE(one.size() == 1);
        freq[one[0]->t]++;
    }
    for (std::size_t t = 1; t <= 100; ++t) {
        const double f = static_cast<double>(freq[t]) / draws;
        REQUIRE(f == Catch::Approx(0.01).margin(0.005));
    }

    ReplayBuffer<float> empty(1, 4, 8, 1, 1);
    REQUIRE(empty.sample_sketch_batch(3, rng).empty());
}

TEST_CASE("full batch with capacity one always returns the newest snapshot") {
    ReplayBuffer<float> buf(1, 0, 4, 1, 1);
    Rng rng(3);
    for (std::size_t t = 1; t <= 5; ++t) {
        buf.push_full({t, snapshot_of(4, 1, float(t))});
        const auto batch = buf.sample_full_batch(3, rng);
        REQUIRE(batch.size() == 1);
        REQUIRE(batch[0]->t == t);
    }
}

TEST_CASE("sampling is deterministic under a seeded rng") {
    ReplayBuffer<float> buf(1, 20, 4, 1, 1);
    for (std::size_t t = 1; t <= 20; ++t) buf.push_sketch({t, t, 1, snapshot_of(1, 1, 0.f)});
    Rng a(55), b(55);
    for (int i = 0; i < 10; ++i) {
        const auto ba = buf.sample_sketch_batch(5, a);
        const auto bb = buf.sample_sketch_batch(5, b);
        REQUIRE(ba.size() == bb.size());
        for (std::size_t j = 0; j < ba.size(); ++j) REQUIRE(ba[j]->t == bb[j]->t);
    }
}

TEST_CASE("memory bound holds after arbitrary operation sequences") {
    const std::size_t n = 32, k = 4, c = 2, tf = 2, ts = 7;
    ReplayBuffer<float> buf(tf, ts, n, k, c);
    Rng rng(7);
    for (std::size_t t = 1; t <= 40; ++t) {
        buf.push_full({t, snapshot_of(n, c, float(t))});
        buf.push_sketch({t, t, k, snapshot_of(k, c, float(t))});
        REQUIRE(buf.stored_value_count() <= buf.value_budget());
        REQUIRE(buf.value_budget() == (tf * n + ts * k) * c);
    }
    const auto report = buf.size_report();
    REQUIRE(report.full_bytes == tf * n * c * sizeof(float));
    REQUIRE(report.sketch_bytes == ts * k * c * sizeof(float));
    REQUIRE(report.seed_bytes == ts * sizeof(std::uint64_t));
}

TEST_CASE("sketch fidelity: stored SU is reproduced from the seed") {
    const std::size_t n = 64, k = 8;
    Rng rng(9);
    Tensor<float> u({n, 1});
    for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<float>(rng.normal());
    ReplayBuffer<float> buf(1, 4, n, k, 1);
    for (std::size_t t = 1; t <= 4; ++t) {
        const std::uint64_t seed = mix_seed(123, t);
        const auto op = construct_sketch<float>(SketchKind::Fjlt, n, k, seed);
        buf.push_sketch({t, seed, k, op.apply(u)});
    }
    for (const auto& rec : buf.sketch_queue()) {
        const auto op = construct_sketch<float>(SketchKind::Fjlt, n, k, rec.seed);
        const auto again = op.apply(u);
        for (std::size_t i = 0; i < again.numel(); ++i) REQUIRE(again[i] == rec.su[i]);
    }
}

TEST_CASE("buffer persistence round trip") {
    const std::size_t n = 16, k = 4, c = 2;
    ReplayBuffer<float> buf(2, 3, n, k, c);
    Rng rng(31);
    for (std::size_t t = 1; t <= 4; ++t) {
        Tensor<float> u({n, c});
        for (std::size_t i = 0; i < u.numel(); ++i) u[i] = static_cast<float>(rng.normal());
        buf.push_full({t, u});
        const auto op = construct_sketch<float>(SketchKind::Fjlt, n, k, mix_seed(1, t));
        buf.push_sketch({t, mix_seed(1, t), k, op.apply(u)});
    }
    const std::string path = "test_buffer.incb";
    write_buffer(path, buf, SketchKind::Fjlt);
    SketchKind kind;
    const auto back = read_buffer<float>(path, &kind);
    REQUIRE(kind == SketchKind::Fjlt);
    REQUIRE(back.full_size() == buf.full_size());
    REQUIRE(back.sketch_size() == buf.sketch_size());
    for (std::size_t i = 0; i < buf.full_size(); ++i) {
        REQUIRE(back.full_queue()[i].t == buf.full_queue()[i].t);
        for (std::size_t j = 0; j < n * c; ++j)
            REQUIRE(back.full_queue()[i].u[j] == buf.full_queue()[i].u[j]);
    }
    for (std::size_t i = 0; i < buf.sketch_size(); ++i) {
        REQUIRE(back.sketch_queue()[i].seed == buf.sketch_queue()[i].seed);
        for (std::size_t j = 0; j < k * c; ++j)
            REQUIRE(back.sketch_queue()[i].su[j] == buf.sketch_queue()[i].su[j]);
    }
    std::filesystem::remove(path);
}
