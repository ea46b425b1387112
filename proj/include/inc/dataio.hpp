#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inc/binio.hpp"
#include "inc/errors.hpp"
#include "inc/rng.hpp"
#include "inc/tensor.hpp"

namespace inc {

// Fixed mesh plus per-node channel values over time; the object being
// compressed. Snapshots are 1-based in t to match the trajectory indexing
// used everywhere else (records, streams, the time mapping).
template <typename T>
struct MeshDataset {
    std::string name;
    Tensor<T> x;  // n x d node coordinates
    std::vector<Tensor<T>> snapshots;  // each n x c
    std::uint64_t seed = 0;

    std::size_t n() const { return x.rows(); }
    std::size_t d() const { return x.cols(); }
    std::size_t t_count() const { return snapshots.size(); }
    std::size_t c() const { return snapshots.empty() ? 0 : snapshots[0].cols(); }

    const Tensor<T>& snapshot(std::size_t t) const {
        if (t < 1 || t > snapshots.size())
            throw ShapeError("snapshot index " + std::to_string(t) + " out of range");
        return snapshots[t - 1];
    }

    void validate() const {
        for (const auto& u : snapshots)
            if (u.rows() != n()) throw ShapeError("dataset: snapshot row count drift");
    }
};

// Single-pass iterator over (t, U_t) in increasing t. The first call after the
// natural end returns nullopt; any call beyond that is a contract violation.
template <typename T>
class SnapshotStream {
public:
    explicit SnapshotStream(const MeshDataset<T>* data) : data_(data) {}

    std::size_t total() const { return data_->t_count(); }

    std::optional<std::pair<std::size_t, const Tensor<T>*>> next() {
        if (finished_) throw StreamExhausted("SnapshotStream: stream already consumed");
        if (pos_ >= data_->t_count()) {
            finished_ = true;
            return std::nullopt;
        }
        ++pos_;
        return std::make_pair(pos_, &data_->snapshot(pos_));
    }

private:
    const MeshDataset<T>* data_;
    std::size_t pos_ = 0;
    bool finished_ = false;
};

template <typename T>
SnapshotStream<T> stream_from(const MeshDataset<T>& data) {
    return SnapshotStream<T>(&data);
}

// Translating-and-spreading Gaussian pulse on a uniform 2-D grid over [0,1]^2;
// stand-in for a wave-front simulation. Field values are O(1) and every
// snapshot has nonzero norm.
template <typename T>
MeshDataset<T> gen_pulse2d(std::size_t grid_side, std::size_t t_count, std::uint64_t seed) {
    if (grid_side < 8) throw ConfigError("gen_pulse2d: grid_side must be >= 8");
    if (t_count < 2) throw ConfigError("gen_pulse2d: T must be >= 2");
    const std::size_t n = grid_side * grid_side;
    MeshDataset<T> ds;
    ds.name = "pulse2d";
    ds.seed = seed;
    ds.x = Tensor<T>({n, 2});
    for (std::size_t i = 0; i < grid_side; ++i)
        for (std::size_t j = 0; j < grid_side; ++j) {
            ds.x.at(i * grid_side + j, 0) =
                static_cast<T>(static_cast<double>(j) / static_cast<double>(grid_side - 1));
            ds.x.at(i * grid_side + j, 1) =
                static_cast<T>(static_cast<double>(i) / static_cast<double>(grid_side - 1));
        }

    Rng rng(mix_seed(seed, 0x9D2C5680));
    // Path endpoints jittered a little per seed but kept well inside the domain
    // so the pulse mass is never clipped at the boundary.
    const double ax = 0.28 + 0.04 * rng.uniform();
    const double ay = 0.28 + 0.04 * rng.uniform();
    const double bx = 0.68 + 0.04 * rng.uniform();
    const double by = 0.68 + 0.04 * rng.uniform();
    const double sigma0 = 0.045, sigma1 = 0.095;

    ds.snapshots.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        const double a = (t_count == 1) ? 0.0
                                        : static_cast<double>(t) / static_cast<double>(t_count - 1);
        const double px = ax + (bx - ax) * a;
        const double py = ay + (by - ay) * a;
        const double sigma = sigma0 + (sigma1 - sigma0) * a;
        Tensor<T> u({n, 1});
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = static_cast<double>(ds.x.at(i, 0)) - px;
            const double dy = static_cast<double>(ds.x.at(i, 1)) - py;
            u[i] = static_cast<T>(std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)));
        }
        ds.snapshots.push_back(std::move(u));
    }
    return ds;
}

// Points jittered along a random 3-D branching polyline; the field is a
// diffusion-like profile decaying with arc distance from the root, with the
// penetration depth growing over time. Stand-in for transport on an
// unstructured, non-Cartesian geometry.
template <typename T>
MeshDataset<T> gen_branch3d(std::size_t n_points, std::size_t t_count, std::uint64_t seed) {
    if (n_points < 100) throw ConfigError("gen_branch3d: n_points must be >= 100");
    if (t_count < 2) throw ConfigError("gen_branch3d: T must be >= 2");
    MeshDataset<T> ds;
    ds.name = "branch3d";
    ds.seed = seed;

    struct Segment {
        double ox, oy, oz;  // origin
        double dx, dy, dz;  // unit direction
        double len;
        double root_dist;   // arc distance of origin from the tree root
    };
    Rng rng(mix_seed(seed, 0x5F3759DF));
    std::vector<Segment> segs;
    struct Tip {
        double x, y, z, dist;
        double dx, dy, dz;
        std::size_t depth;
    };
    std::vector<Tip> tips{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0}};
    while (!tips.empty() && segs.size() < 24) {
        Tip tip = tips.back();
        tips.pop_back();
        const double len = 0.25 + 0.15 * rng.uniform();
        // drift the direction, then renormalize
        double dx = tip.dx + 0.7 * (rng.uniform() - 0.5);
        double dy = tip.dy + 0.7 * (rng.uniform() - 0.5);
        double dz = tip.dz + 0.7 * (rng.uniform() - 0.5);
        const double nrm = std::sqrt(dx * dx + dy * dy + dz * dz);
        dx /= nrm;
        dy /= nrm;
        dz /= nrm;
        segs.push_back({tip.x, tip.y, tip.z, dx, dy, dz, len, tip.dist});
        const double ex = tip.x + dx * len, ey = tip.y + dy * len, ez = tip.z + dz * len;
        if (tip.depth < 3) {
            const std::size_t children = 1 + (rng.uniform() < 0.65 ? 1 : 0);
            for (std::size_t cidx = 0; cidx < children; ++cidx)
                tips.push_back({ex, ey, ez, tip.dist + len, dx, dy, dz, tip.depth + 1});
        }
    }

    ds.x = Tensor<T>({n_points, 3});
    std::vector<double> root_dist(n_points);
    double max_dist = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const Segment& s = segs[rng.bounded(segs.size())];
        const double a = rng.uniform();
        const double jitter = 0.012;
        ds.x.at(i, 0) = static_cast<T>(s.ox + s.dx * s.len * a + jitter * (rng.uniform() - 0.5));
        ds.x.at(i, 1) = static_cast<T>(s.oy + s.dy * s.len * a + jitter * (rng.uniform() - 0.5));
        ds.x.at(i, 2) = static_cast<T>(s.oz + s.dz * s.len * a + jitter * (rng.uniform() - 0.5));
        root_dist[i] = s.root_dist + s.len * a;
        max_dist = std::max(max_dist, root_dist[i]);
    }

    ds.snapshots.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        const double a = static_cast<double>(t) / static_cast<double>(t_count - 1);
        const double depth = 0.12 * max_dist + 0.85 * max_dist * a;  // penetration length
        Tensor<T> u({n_points, 1});
        for (std::size_t i = 0; i < n_points; ++i)
            u[i] = static_cast<T>(std::exp(-root_dist[i] / depth));
        ds.snapshots.push_back(std::move(u));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// "INCD" dataset file: magic, version u16, d u16, c u16, n u64, T u64, then X
// row-major and the T snapshots row-major, all little-endian 32-bit floats.

inline constexpr char kDatasetMagic[4] = {'I', 'N', 'C', 'D'};
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 4 + 2 + 2 + 2 + 8 + 8;

template <typename T>
void write_dataset(const std::string& path, const MeshDataset<T>& ds) {
    ds.validate();
    BinWriter w(path);
    w.magic(kDatasetMagic);
    w.u16(kDatasetVersion);
    w.u16(static_cast<std::uint16_t>(ds.d()));
    w.u16(static_cast<std::uint16_t>(ds.c()));
    w.u64(ds.n());
    w.u64(ds.t_count());
    for (std::size_t i = 0; i < ds.x.numel(); ++i) w.f32(static_cast<float>(ds.x[i]));
    for (const auto& u : ds.snapshots)
        for (std::size_t i = 0; i < u.numel(); ++i) w.f32(static_cast<float>(u[i]));
    w.close();
}

template <typename T>
MeshDataset<T> read_dataset(const std::string& path) {
    BinReader r(path);
    r.expect_magic(kDatasetMagic, "dataset");
    const std::uint16_t version = r.u16();
    if (version != kDatasetVersion)
        throw IoError("unsupported dataset version " + std::to_string(version));
    const std::size_t d = r.u16();
    const std::size_t c = r.u16();
    const std::size_t n = r.u64();
    const std::size_t t_count = r.u64();
    MeshDataset<T> ds;
    ds.name = path;
    ds.x = Tensor<T>({n, d});
    for (std::size_t i = 0; i < n * d; ++i) ds.x[i] = static_cast<T>(r.f32());
    ds.snapshots.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        Tensor<T> u({n, c});
        for (std::size_t i = 0; i < n * c; ++i) u[i] = static_cast<T>(r.f32());
        ds.snapshots.push_back(std::move(u));
    }
    return ds;
}

// Size of a dataset file in bytes, for the generator's stats line.
inline std::size_t dataset_file_bytes(std::size_t n, std::size_t d, std::size_t c,
                                      std::size_t t_count) {
    return kDatasetHeaderBytes + 4 * (n * d + t_count * n * c);
}

} // namespace inc
