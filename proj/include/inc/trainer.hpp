#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "inc/buffer.hpp"
#include "inc/dataio.hpp"
#include "inc/errors.hpp"
#include "inc/graph.hpp"
#include "inc/metrics.hpp"
#include "inc/model.hpp"
#include "inc/radam.hpp"
#include "inc/rng.hpp"
#include "inc/sketch.hpp"
#include "inc/tensor.hpp"

namespace inc {

enum class TrainMode {
    OfflineBaseline,
    OfflineSubsample,
    OfflineFjlt,
    InSituBaseline,
    InSituSubsample,
    InSituFjlt,
};

inline bool is_offline(TrainMode m) {
    return m == TrainMode::OfflineBaseline || m == TrainMode::OfflineSubsample ||
           m == TrainMode::OfflineFjlt;
}

inline bool uses_sketch(TrainMode m) {
    return m == TrainMode::OfflineSubsample || m == TrainMode::OfflineFjlt ||
           m == TrainMode::InSituSubsample || m == TrainMode::InSituFjlt;
}

inline SketchKind sketch_kind_of(TrainMode m) {
    switch (m) {
        case TrainMode::OfflineSubsample:
        case TrainMode::InSituSubsample:
            return SketchKind::Subsample;
        case TrainMode::OfflineFjlt:
        case TrainMode::InSituFjlt:
            return SketchKind::Fjlt;
        default:
            throw ConfigError("mode has no sketch kind");
    }
}

inline std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::OfflineBaseline: return "offline-baseline";
        case TrainMode::OfflineSubsample: return "offline-subsample";
        case TrainMode::OfflineFjlt: return "offline-fjlt";
        case TrainMode::InSituBaseline: return "insitu-baseline";
        case TrainMode::InSituSubsample: return "insitu-subsample";
        case TrainMode::InSituFjlt: return "insitu-fjlt";
    }
    return "?";
}

inline TrainMode parse_mode(const std::string& s) {
    for (TrainMode m : {TrainMode::OfflineBaseline, TrainMode::OfflineSubsample,
                        TrainMode::OfflineFjlt, TrainMode::InSituBaseline,
                        TrainMode::InSituSubsample, TrainMode::InSituFjlt})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown mode '" + s + "'");
}

// k = round(sample_factor/100 * n), at least 1.
inline std::size_t k_from_sample_factor(double pct, std::size_t n) {
    const auto k = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(n)));
    return std::max<std::size_t>(1, std::min(k, n));
}

struct TrainConfig {
    TrainMode mode = TrainMode::InSituFjlt;
    double lr = 1e-4;
    double lambda = 1.0;            // sketch-loss weight
    std::size_t b_f = 1;            // full batch (in situ) / time minibatch (offline)
    std::size_t b_s = 32;
    std::size_t cycles_per_snapshot = 300;
    double sample_factor = 5.0;     // 100*k/n
    std::size_t t_f = 1;            // full queue capacity
    long long t_s = -1;             // sketch queue capacity; -1 resolves to T-1
    std::uint64_t master_seed = 0;
    SirenLayout hyper{1, 0, 32, 2, 30.0};
    SirenLayout target{0, 0, 24, 2, 30.0};
    double hyper_init_scale = 0.01;

    void validate() const {
        if (lambda <= 0) throw ConfigError("lambda must be > 0");
        if (lr <= 0) throw ConfigError("lr must be > 0");
        if (b_f < 1 || b_s < 1) throw ConfigError("batch sizes must be >= 1");
        if (sample_factor <= 0 || sample_factor > 100)
            throw ConfigError("sample_factor must be in (0, 100]");
        if (t_f < 1) throw ConfigError("T_f must be >= 1");
    }
};

struct TrainReport {
    struct Cycle {
        long long snapshot_t;  // -1 for offline steps
        std::size_t cycle;
        double l_full;
        double l_sketch;
    };
    std::vector<Cycle> trace;
    bool diverged = false;
    std::string divergence_note;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
};

struct EvalMetrics {
    double rfe = std::numeric_limits<double>::quiet_NaN();
    double mean_psnr = std::numeric_limits<double>::quiet_NaN();
    std::size_t psnr_defined = 0;
    std::vector<double> per_snapshot_psnr;
    std::vector<double> per_snapshot_test_loss;
    std::size_t param_count = 0;
    double compression = 0.0;
};

// A sketched record paired with its seed-reconstructed operator.
template <typename T>
struct SketchItem {
    const SketchRecord<T>* record;
    const SketchOperator<T>* op;
};

namespace detail {

// One optimizer step's loss graph. Full items contribute the frame loss on the
// raw snapshots; sketch items compare the stored S_t U_t (a constant) against
// S_t applied to the current reconstruction. Gradients flow through both
// reconstruction paths into the shared hyper-parameter leaf.
template <typename T>
struct StepLoss {
    Graph<T> graph;
    typename Graph<T>::Id total;
    double l_full = 0.0;
    double l_sketch = 0.0;
};

template <typename T>
void build_step_loss(StepLoss<T>& s, const CompressorModel<T>& model, const Tensor<T>& x,
                     const std::vector<std::pair<std::size_t, const Tensor<T>*>>& full_items,
                     const std::vector<inc::SketchItem<T>>& sketch_items, double lambda) {
    using Id = typename Graph<T>::Id;
    Graph<T>& g = s.graph;
    const Id hp = g.input("hyper_params", model.hyper_params);

    std::vector<Id> terms;
    Id full_term = 0;
    const bool has_full = !full_items.empty();
    if (has_full) {
        for (const auto& [t, u] : full_items) {
            const Id pred = emit_full_forward(g, model, hp, x, t);
            terms.push_back(emit_loss_frame(g, pred, *u));
        }
        Id acc = terms[0];
        for (std::size_t i = 1; i < terms.size(); ++i) acc = g.add(acc, terms[i]);
        full_term = g.scale(acc, 1.0 / static_cast<double>(terms.size()));
    }

    Id sketch_term = 0;
    const bool has_sketch = !sketch_items.empty();
    if (has_sketch) {
        std::vector<Id> sterms;
        for (const auto& item : sketch_items) {
            const Id pred = emit_full_forward(g, model, hp, x, item.record->t);
            const Id spred = g.sketch_apply(pred, item.op);
            sterms.push_back(emit_loss_frame(g, spred, item.record->su));
        }
        Id acc = sterms[0];
        for (std::size_t i = 1; i < sterms.size(); ++i) acc = g.add(acc, sterms[i]);
        sketch_term = g.scale(acc, 1.0 / static_cast<double>(sterms.size()));
    }

    if (has_full && has_sketch)
        s.total = g.add(full_term, g.scale(sketch_term, lambda));
    else if (has_full)
        s.total = full_term;
    else if (has_sketch)
        s.total = sketch_term;  // offline sketched modes: the sketch loss is the loss
    else
        throw ConfigError("build_step_loss: empty batch");

    s.l_full = has_full ? static_cast<double>(g.value(full_term)[0]) : 0.0;
    s.l_sketch = has_sketch ? static_cast<double>(g.value(sketch_term)[0]) : 0.0;
}

template <typename T>
void optimizer_step(CompressorModel<T>& model, RAdamState<T>& state, StepLoss<T>& s) {
    s.graph.backward(s.total);
    const Tensor<T>& grad = s.graph.grad("hyper_params");
    radam_step(model.hyper_params, grad, state);
}

template <typename T>
CompressorModel<T> init_model(const TrainConfig& cfg, std::size_t d, std::size_t c,
                              std::size_t t_count) {
    SirenLayout target = cfg.target;
    target.in_dim = d + 1;
    target.out_dim = c;
    CompressorModel<T> model = CompressorModel<T>::make(cfg.hyper, target, t_count);
    hyper_init(model, cfg.hyper_init_scale, mix_seed(cfg.master_seed, 0x5EEDULL));
    return model;
}

} // namespace detail

// Eq.-4 style loss evaluation on explicit batches (no optimizer step); exposed
// for tests and diagnostics.
struct InsituLossValue {
    double full;
    double sketch;
    double total;
};

template <typename T>
InsituLossValue loss_insitu(const CompressorModel<T>& model, const Tensor<T>& x,
                            const std::vector<std::pair<std::size_t, const Tensor<T>*>>& full_items,
                            const std::vector<SketchItem<T>>& sketch_items,
                            double lambda) {
    detail::StepLoss<T> s;
    detail::build_step_loss(s, model, x, full_items, sketch_items, lambda);
    return {s.l_full, s.l_sketch, static_cast<double>(s.graph.value(s.total)[0])};
}

template <typename T>
using BufferObserver = std::function<void(const ReplayBuffer<T>&)>;

// Single-pass in-situ training: per arriving snapshot, push the full record,
// run `cycles_per_snapshot` optimizer steps on freshly drawn minibatches, then
// sketch the snapshot (seed = mix(master, t)) into the sketch queue. Sketching
// after the cycles keeps the sketch term a regularizer over strictly previous
// snapshots (at t=1 the queue is empty and the loss degrades to the full term)
// and keeps stored values within the buffer budget at all times. The final
// snapshot is never sketched: the run ends after it is encoded.
// Stream must expose total() and next() with SnapshotStream semantics; the
// template keeps instrumented streams (tests, live simulation adapters) usable.
template <typename T, typename Stream = SnapshotStream<T>>
std::pair<CompressorModel<T>, TrainReport> train_insitu(const TrainConfig& cfg,
                                                        const Tensor<T>& x, Stream& stream,
                                                        const BufferObserver<T>& observer = {},
                                                        ReplayBuffer<T>* final_buffer = nullptr) {
    cfg.validate();
    if (is_offline(cfg.mode)) throw ConfigError("train_insitu: offline mode");
    const auto t0 = std::chrono::steady_clock::now();

    const std::size_t t_count = stream.total();
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    std::size_t sketch_cap = (cfg.t_s < 0) ? (t_count > 0 ? t_count - 1 : 0)
                                           : static_cast<std::size_t>(cfg.t_s);
    if (cfg.mode == TrainMode::InSituBaseline) sketch_cap = 0;
    const std::size_t k = k_from_sample_factor(cfg.sample_factor, n);

    TrainReport report;
    CompressorModel<T> model;
    RAdamState<T> state({0}, RAdamHyper{cfg.lr});
    ReplayBuffer<T> buffer(cfg.t_f, sketch_cap, n, k, 1);
    std::unordered_map<std::size_t, SketchOperator<T>> ops;
    Rng batch_rng(mix_seed(cfg.master_seed, 0xBA7C4ULL));
    bool first = true;

    while (true) {
        auto item = stream.next();
        if (!item) break;
        const auto [t, u] = *item;
        if (first) {
            const std::size_t c = u->cols();
            model = detail::init_model<T>(cfg, d, c, t_count);
            state = RAdamState<T>({model.param_count()}, RAdamHyper{cfg.lr});
            buffer = ReplayBuffer<T>(cfg.t_f, sketch_cap, n, k, c);
            first = false;
        }
        if (u->rows() != n) throw ShapeError("train_insitu: snapshot row drift at t=" + std::to_string(t));

        buffer.push_full(FullRecord<T>{t, *u});
        if (observer) observer(buffer);

        for (std::size_t cycle = 0; cycle < cfg.cycles_per_snapshot; ++cycle) {
            const auto full_batch = buffer.sample_full_batch(cfg.b_f, batch_rng);
            std::vector<std::pair<std::size_t, const Tensor<T>*>> full_items;
            for (const auto* r : full_batch) full_items.emplace_back(r->t, &r->u);
            std::vector<SketchItem<T>> sketch_items;
            if (buffer.sketch_size() > 0) {
                for (const auto* r : buffer.sample_sketch_batch(cfg.b_s, batch_rng))
                    sketch_items.push_back({r, &ops.at(r->t)});
            }
            try {
                detail::StepLoss<T> s;
                detail::build_step_loss(s, model, x, full_items, sketch_items, cfg.lambda);
                detail::optimizer_step(model, state, s);
                report.trace.push_back(
                    {static_cast<long long>(t), cycle, s.l_full, s.l_sketch});
                ++report.steps;
            } catch (const NumericError& e) {
                report.diverged = true;
                report.divergence_note = e.what();
                break;
            }
            if (observer) observer(buffer);
        }
        if (report.diverged) break;

        if (sketch_cap > 0 && uses_sketch(cfg.mode) && t < t_count) {
            const std::uint64_t seed = mix_seed(cfg.master_seed, t);
            auto it = ops.try_emplace(t, sketch_kind_of(cfg.mode), n, k, seed).first;
            if (auto evicted = buffer.push_sketch(SketchRecord<T>{t, seed, k, it->second.apply(*u)}))
                ops.erase(evicted->t);
            if (observer) observer(buffer);
        }
    }
    if (first) throw ConfigError("train_insitu: empty stream");
    if (final_buffer) *final_buffer = std::move(buffer);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

// Offline training. The baseline samples time minibatches of full snapshots
// and minimizes the mean frame loss; the sketched variants first sketch every
// snapshot once (fixed per-t seeds) and then train only against the sketched
// targets. Total steps = cycles_per_snapshot * T, matching the in-situ budget.
template <typename T>
std::pair<CompressorModel<T>, TrainReport> train_offline(const TrainConfig& cfg,
                                                         const MeshDataset<T>& data) {
    cfg.validate();
    if (!is_offline(cfg.mode)) throw ConfigError("train_offline: in-situ mode");
    const auto t0 = std::chrono::steady_clock::now();

    const std::size_t t_count = data.t_count();
    const std::size_t n = data.n();
    if (t_count == 0) throw ConfigError("train_offline: empty dataset");
    const std::size_t k = k_from_sample_factor(cfg.sample_factor, n);

    CompressorModel<T> model = detail::init_model<T>(cfg, data.d(), data.c(), t_count);
    RAdamState<T> state({model.param_count()}, RAdamHyper{cfg.lr});
    Rng batch_rng(mix_seed(cfg.master_seed, 0xBA7C4ULL));

    // Sketched modes: one sketch per snapshot, drawn once, reused from then on.
    std::vector<SketchRecord<T>> records;
    std::vector<SketchOperator<T>> ops;
    if (uses_sketch(cfg.mode)) {
        records.reserve(t_count);
        ops.reserve(t_count);
        for (std::size_t t = 1; t <= t_count; ++t) {
            const std::uint64_t seed = mix_seed(cfg.master_seed, t);
            ops.emplace_back(sketch_kind_of(cfg.mode), n, k, seed);
            records.push_back({t, seed, k, ops.back().apply(data.snapshot(t))});
        }
    }

    TrainReport report;
    const std::size_t total_steps = cfg.cycles_per_snapshot * t_count;
    for (std::size_t step_i = 0; step_i < total_steps; ++step_i) {
        std::vector<std::pair<std::size_t, const Tensor<T>*>> full_items;
        std::vector<SketchItem<T>> sketch_items;
        if (uses_sketch(cfg.mode)) {
            const std::size_t take = std::min(cfg.b_s, t_count);
            for (const auto i : sample_without_replacement(t_count, take, batch_rng))
                sketch_items.push_back({&records[i], &ops[i]});
        } else {
            const std::size_t take = std::min(cfg.b_f, t_count);
            for (const auto i : sample_without_replacement(t_count, take, batch_rng))
                full_items.emplace_back(i + 1, &data.snapshot(i + 1));
        }
        try {
            detail::StepLoss<T> s;
            detail::build_step_loss(s, model, data.x, full_items, sketch_items, cfg.lambda);
            detail::optimizer_step(model, state, s);
            report.trace.push_back({-1, step_i, s.l_full, s.l_sketch});
            ++report.steps;
        } catch (const NumericError& e) {
            report.diverged = true;
            report.divergence_note = e.what();
            break;
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

// Full-dataset metrics of a trained model: RFE, per-snapshot PSNR (channels
// whose reconstruction maximum is non-positive are excluded from the mean and
// reported as NaN), per-snapshot test frame loss, and the compression rate.
template <typename T>
EvalMetrics evaluate(const CompressorModel<T>& model, const MeshDataset<T>& data) {
    EvalMetrics m;
    m.param_count = model.param_count();
    m.compression = compression_rate(data.t_count(), data.n(), data.c(), m.param_count);
    std::vector<Tensor<T>> recon;
    recon.reserve(data.t_count());
    for (std::size_t t = 1; t <= data.t_count(); ++t)
        recon.push_back(full_forward(model, data.x, t));
    m.rfe = rfe(data.snapshots, recon);
    double acc = 0.0;
    for (std::size_t t = 1; t <= data.t_count(); ++t) {
        m.per_snapshot_test_loss.push_back(loss_frame(data.snapshot(t), recon[t - 1]));
        double p;
        try {
            p = psnr(data.snapshot(t), recon[t - 1]);
        } catch (const NumericError&) {
            m.per_snapshot_psnr.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        m.per_snapshot_psnr.push_back(p);
        acc += p;
        ++m.psnr_defined;
    }
    m.mean_psnr = m.psnr_defined ? acc / static_cast<double>(m.psnr_defined)
                                 : std::numeric_limits<double>::quiet_NaN();
    return m;
}

} // namespace inc
