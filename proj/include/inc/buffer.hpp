#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "inc/binio.hpp"
#include "inc/errors.hpp"
#include "inc/rng.hpp"
#include "inc/sketch.hpp"
#include "inc/tensor.hpp"

namespace inc {

template <typename T>
struct FullRecord {
    std::size_t t = 0;
    Tensor<T> u;  // n x c
};

template <typename T>
struct SketchRecord {
    std::size_t t = 0;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    Tensor<T> su;  // k x c, the stored product S_t U_t
};

// Limited-memory dual buffer: a FIFO queue of full snapshots (capacity T_f)
// and a FIFO queue of (seed, sketched snapshot) records (capacity T_s).
// Oldest-first eviction; total stored values stay within
// (T_f * n + T_s * k) * c.
template <typename T>
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t full_capacity, std::size_t sketch_capacity, std::size_t n,
                 std::size_t k, std::size_t c)
        : full_cap_(full_capacity), sketch_cap_(sketch_capacity), n_(n), k_(k), c_(c) {
        if (full_capacity == 0)
            throw ConfigError("ReplayBuffer: full queue capacity must be >= 1");
        if (sketch_capacity > 0 && (k == 0 || k > n))
            throw ConfigError("ReplayBuffer: sketch rows k must satisfy 1 <= k <= n");
    }

    std::size_t full_capacity() const { return full_cap_; }
    std::size_t sketch_capacity() const { return sketch_cap_; }
    std::size_t full_size() const { return full_.size(); }
    std::size_t sketch_size() const { return sketch_.size(); }
    const std::deque<FullRecord<T>>& full_queue() const { return full_; }
    const std::deque<SketchRecord<T>>& sketch_queue() const { return sketch_; }

    std::optional<FullRecord<T>> push_full(FullRecord<T> rec) {
        if (rec.u.ndim() != 2 || rec.u.rows() != n_ || rec.u.cols() != c_)
            throw ShapeError("push_full: snapshot shape " + rec.u.shape_str() + ", expected " +
                             std::to_string(n_) + "x" + std::to_string(c_));
        std::optional<FullRecord<T>> evicted;
        if (full_.size() == full_cap_) {
            evicted = std::move(full_.front());
            full_.pop_front();
        }
        full_.push_back(std::move(rec));
        return evicted;
    }

    std::optional<SketchRecord<T>> push_sketch(SketchRecord<T> rec) {
        if (sketch_cap_ == 0)
            throw ConfigError("push_sketch: buffer configured with no sketch queue");
        if (rec.k != k_ || rec.su.ndim() != 2 || rec.su.rows() != k_ || rec.su.cols() != c_)
            throw ShapeError("push_sketch: record shape " + rec.su.shape_str() + " (k=" +
                             std::to_string(rec.k) + "), expected " + std::to_string(k_) + "x" +
                             std::to_string(c_));
        std::optional<SketchRecord<T>> evicted;
        if (sketch_.size() == sketch_cap_) {
            evicted = std::move(sketch_.front());
            sketch_.pop_front();
        }
        sketch_.push_back(std::move(rec));
        return evicted;
    }

    // Uniform sample without replacement of min(b, size) records; a fresh draw
    // on every call. Empty queue yields an empty batch.
    std::vector<const SketchRecord<T>*> sample_sketch_batch(std::size_t b, Rng& rng) const {
        return sample(sketch_, b, rng);
    }

    std::vector<const FullRecord<T>*> sample_full_batch(std::size_t b, Rng& rng) const {
        return sample(full_, b, rng);
    }

    // Stored field values (full + sketched), excluding seeds.
    std::size_t stored_value_count() const {
        std::size_t total = 0;
        for (const auto& r : full_) total += r.u.numel();
        for (const auto& r : sketch_) total += r.su.numel();
        return total;
    }

    std::size_t value_budget() const { return (full_cap_ * n_ + sketch_cap_ * k_) * c_; }

    struct SizeReport {
        std::size_t full_bytes;
        std::size_t sketch_bytes;
        std::size_t seed_bytes;
    };

    SizeReport size_report() const {
        std::size_t fv = 0, sv = 0;
        for (const auto& r : full_) fv += r.u.numel();
        for (const auto& r : sketch_) sv += r.su.numel();
        return {fv * sizeof(T), sv * sizeof(T), sketch_.size() * sizeof(std::uint64_t)};
    }

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    std::size_t c() const { return c_; }

private:
    template <typename Rec>
    static std::vector<const Rec*> sample(const std::deque<Rec>& q, std::size_t b, Rng& rng) {
        if (b < 1) throw ConfigError("sample batch size must be >= 1");
        std::vector<const Rec*> out;
        if (q.empty()) return out;
        const std::size_t take = std::min(b, q.size());
        if (take == q.size()) {
            for (const auto& r : q) out.push_back(&r);
            return out;
        }
        const auto idx = sample_without_replacement(q.size(), take, rng);
        for (const auto i : idx) out.push_back(&q[i]);
        return out;
    }

    std::size_t full_cap_, sketch_cap_, n_, k_, c_;
    std::deque<FullRecord<T>> full_;
    std::deque<SketchRecord<T>> sketch_;
};

// ---------------------------------------------------------------------------
// Crash-recovery persistence ("INCB"): header with geometry and capacities,
// then the queue contents with explicit snapshot indices and seeds.

inline constexpr char kBufferMagic[4] = {'I', 'N', 'C', 'B'};
inline constexpr std::uint16_t kBufferVersion = 1;

template <typename T>
void write_buffer(const std::string& path, const ReplayBuffer<T>& buf, SketchKind kind) {
    BinWriter w(path);
    w.magic(kBufferMagic);
    w.u16(kBufferVersion);
    w.u16(static_cast<std::uint16_t>(kind));
    w.u64(buf.n());
    w.u64(buf.k());
    w.u64(buf.c());
    w.u64(buf.full_capacity());
    w.u64(buf.sketch_capacity());
    w.u64(buf.full_size());
    for (const auto& r : buf.full_queue()) {
        w.u64(r.t);
        for (std::size_t i = 0; i < r.u.numel(); ++i) w.f32(static_cast<float>(r.u[i]));
    }
    w.u64(buf.sketch_size());
    for (const auto& r : buf.sketch_queue()) {
        w.u64(r.t);
        w.u64(r.seed);
        for (std::size_t i = 0; i < r.su.numel(); ++i) w.f32(static_cast<float>(r.su[i]));
    }
    w.close();
}

template <typename T>
ReplayBuffer<T> read_buffer(const std::string& path, SketchKind* kind_out = nullptr) {
    BinReader r(path);
    r.expect_magic(kBufferMagic, "buffer");
    const std::uint16_t version = r.u16();
    if (version != kBufferVersion)
        throw IoError("unsupported buffer version " + std::to_string(version));
    const auto kind = static_cast<SketchKind>(r.u16());
    if (kind_out) *kind_out = kind;
    const std::size_t n = r.u64();
    const std::size_t k = r.u64();
    const std::size_t c = r.u64();
    const std::size_t tf = r.u64();
    const std::size_t ts = r.u64();
    ReplayBuffer<T> buf(tf, ts, n, k, c);
    const std::uint64_t nf = r.u64();
    for (std::uint64_t i = 0; i < nf; ++i) {
        FullRecord<T> rec;
        rec.t = r.u64();
        rec.u = Tensor<T>({n, c});
        for (std::size_t j = 0; j < n * c; ++j) rec.u[j] = static_cast<T>(r.f32());
        buf.push_full(std::move(rec));
    }
    const std::uint64_t ns = r.u64();
    for (std::uint64_t i = 0; i < ns; ++i) {
        SketchRecord<T> rec;
        rec.t = r.u64();
        rec.seed = r.u64();
        rec.k = k;
        rec.su = Tensor<T>({k, c});
        for (std::size_t j = 0; j < k * c; ++j) rec.su[j] = static_cast<T>(r.f32());
        buf.push_sketch(std::move(rec));
    }
    return buf;
}

} // namespace inc
