#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "inc/errors.hpp"
#include "inc/trainer.hpp"

namespace inc {

// JSON-safe float: nlohmann serializes NaN/Inf as null, which loses the
// distinction the CLI needs for exact-reconstruction PSNR. "inf" is emitted as
// a string, NaN as null.
inline nlohmann::json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::json config_json(const TrainConfig& cfg) {
    return {
        {"mode", to_string(cfg.mode)},
        {"lr", cfg.lr},
        {"lambda", cfg.lambda},
        {"b_f", cfg.b_f},
        {"b_s", cfg.b_s},
        {"cycles_per_snapshot", cfg.cycles_per_snapshot},
        {"sample_factor", cfg.sample_factor},
        {"T_f", cfg.t_f},
        {"T_s", cfg.t_s},
        {"master_seed", cfg.master_seed},
        {"hyper", {{"width", cfg.hyper.width}, {"blocks", cfg.hyper.blocks}, {"omega0", cfg.hyper.omega0}}},
        {"target", {{"width", cfg.target.width}, {"blocks", cfg.target.blocks}, {"omega0", cfg.target.omega0}}},
        {"hyper_init_scale", cfg.hyper_init_scale},
    };
}

inline nlohmann::json metrics_json(const EvalMetrics& m, const TrainReport& report) {
    nlohmann::json psnr_list = nlohmann::json::array();
    for (double v : m.per_snapshot_psnr) psnr_list.push_back(json_number(v));
    nlohmann::json test_loss = nlohmann::json::array();
    for (double v : m.per_snapshot_test_loss) test_loss.push_back(json_number(v));
    return {
        {"rfe", json_number(m.rfe)},
        {"mean_psnr_db", json_number(m.mean_psnr)},
        {"psnr_defined_snapshots", m.psnr_defined},
        {"compression_rate", json_number(m.compression)},
        {"param_count", m.param_count},
        {"per_snapshot_psnr_db", psnr_list},
        {"per_snapshot_test_loss", test_loss},
        {"steps", report.steps},
        {"diverged", report.diverged},
    };
}

// Full run summary. Timing lives outside "metrics" so that deterministic
// replay comparisons can look at the metrics object alone.
inline nlohmann::json summary_json(const TrainConfig& cfg, const EvalMetrics& m,
                                   const TrainReport& report) {
    return {
        {"config", config_json(cfg)},
        {"metrics", metrics_json(m, report)},
        {"timing", {{"wall_seconds", report.wall_seconds}}},
    };
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw IoError("write failed: " + path);
}

// One row per optimizer cycle: snapshot_t, cycle, L_full, L_sketch, lr.
inline void write_report_csv(const std::string& path, const TrainConfig& cfg,
                             const TrainReport& report) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "snapshot_t,cycle,L_full,L_sketch,lr\n";
    for (const auto& row : report.trace)
        os << row.snapshot_t << "," << row.cycle << "," << row.l_full << "," << row.l_sketch
           << "," << cfg.lr << "\n";
    if (!os) throw IoError("write failed: " + path);
}

} // namespace inc
