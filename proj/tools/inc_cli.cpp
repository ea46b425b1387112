// Batch CLI for in-situ neural compression: dataset generation, the six
// training modes, reconstruction, metric evaluation, manifold-dimension
// estimates, and sample-factor sweeps.
//
// Exit codes: 0 success, 1 divergence, 2 usage error, 3 data mismatch / IO.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inc/inc.hpp"
#include "inc/report.hpp"

using nlohmann::json;

namespace {

struct GenArgs {
    std::string kind = "pulse2d";
    std::size_t side = 32;
    std::size_t points = 512;
    std::size_t t_count = 64;
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainArgs {
    std::string data;
    std::string mode = "insitu-fjlt";
    std::string out_dir = ".";
    std::string precision = "f32";
    bool save_buffer = false;
    double lr = 1e-4;
    double lambda = 1.0;
    std::size_t b_f = 1;
    std::size_t b_s = 32;
    std::size_t cycles = 300;
    double sample_factor = 5.0;
    std::size_t t_f = 1;
    long long t_s = -1;
    std::uint64_t seed = 0;
    std::size_t hyper_width = 32, hyper_blocks = 2;
    std::size_t target_width = 24, target_blocks = 2;
    double omega0 = 30.0;
    double init_scale = 0.01;
};

inc::TrainConfig to_config(const TrainArgs& a) {
    inc::TrainConfig cfg;
    cfg.mode = inc::parse_mode(a.mode);
    cfg.lr = a.lr;
    cfg.lambda = a.lambda;
    cfg.b_f = a.b_f;
    cfg.b_s = a.b_s;
    cfg.cycles_per_snapshot = a.cycles;
    cfg.sample_factor = a.sample_factor;
    cfg.t_f = a.t_f;
    cfg.t_s = a.t_s;
    cfg.master_seed = a.seed;
    cfg.hyper = {1, 0, a.hyper_width, a.hyper_blocks, a.omega0};
    cfg.target = {0, 0, a.target_width, a.target_blocks, a.omega0};
    cfg.hyper_init_scale = a.init_scale;
    cfg.validate();
    return cfg;
}

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--data", a.data, "input INCD dataset")->required();
    cmd->add_option("--mode", a.mode,
                    "offline-baseline|offline-subsample|offline-fjlt|"
                    "insitu-baseline|insitu-subsample|insitu-fjlt");
    cmd->add_option("-o,--out", a.out_dir, "output directory");
    cmd->add_option("--precision", a.precision, "f32|f64");
    cmd->add_option("--lr", a.lr, "learning rate");
    cmd->add_option("--lambda", a.lambda, "sketch-loss weight");
    cmd->add_option("--bf", a.b_f, "full batch size (time minibatch in offline modes)");
    cmd->add_option("--bs", a.b_s, "sketch batch size");
    cmd->add_option("--cycles", a.cycles, "optimizer steps per snapshot");
    cmd->add_option("--sample-factor", a.sample_factor, "sketch size, percent of n");
    cmd->add_option("--Tf", a.t_f, "full queue capacity");
    cmd->add_option("--Ts", a.t_s, "sketch queue capacity (-1: T-1)");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--hyper-width", a.hyper_width, "hypernetwork width");
    cmd->add_option("--hyper-blocks", a.hyper_blocks, "hypernetwork residual blocks");
    cmd->add_option("--target-width", a.target_width, "target INR width");
    cmd->add_option("--target-blocks", a.target_blocks, "target INR residual blocks");
    cmd->add_option("--omega0", a.omega0, "first-layer frequency scale");
    cmd->add_option("--init-scale", a.init_scale, "hypernetwork final-layer weight scale");
    cmd->add_flag("--save-buffer", a.save_buffer,
                  "persist the final replay-buffer state (INCB) next to the model");
}

int cmd_gen(const GenArgs& a) {
    inc::MeshDataset<float> ds;
    if (a.kind == "pulse2d")
        ds = inc::gen_pulse2d<float>(a.side, a.t_count, a.seed);
    else if (a.kind == "branch3d")
        ds = inc::gen_branch3d<float>(a.points, a.t_count, a.seed);
    else
        throw inc::ConfigError("gen: unknown kind '" + a.kind + "'");
    inc::write_dataset(a.out, ds);
    const std::size_t bytes = inc::dataset_file_bytes(ds.n(), ds.d(), ds.c(), ds.t_count());
    std::printf("wrote %s: kind=%s n=%zu d=%zu c=%zu T=%zu bytes=%zu\n", a.out.c_str(),
                a.kind.c_str(), ds.n(), ds.d(), ds.c(), ds.t_count(), bytes);
    return 0;
}

template <typename T>
int run_compress(const TrainArgs& args) {
    const inc::TrainConfig cfg = to_config(args);
    const auto ds = inc::read_dataset<T>(args.data);
    std::filesystem::create_directories(args.out_dir);

    inc::CompressorModel<T> model;
    inc::TrainReport report;
    std::optional<inc::ReplayBuffer<T>> final_buffer;
    if (inc::is_offline(cfg.mode)) {
        auto r = inc::train_offline(cfg, ds);
        model = std::move(r.first);
        report = std::move(r.second);
    } else {
        auto stream = inc::stream_from(ds);
        inc::ReplayBuffer<T> buf(1, 0, ds.n(), 1, ds.c());
        auto r = inc::train_insitu(cfg, ds.x, stream, {}, &buf);
        model = std::move(r.first);
        report = std::move(r.second);
        final_buffer = std::move(buf);
    }

    const auto metrics = inc::evaluate(model, ds);
    const auto dir = std::filesystem::path(args.out_dir);
    inc::write_model((dir / "model.incm").string(), model);
    inc::write_report_csv((dir / "report.csv").string(), cfg, report);
    json summary = inc::summary_json(cfg, metrics, report);
    summary["config"]["data"] = args.data;
    summary["config"]["precision"] = args.precision;
    summary["config"]["k"] = inc::k_from_sample_factor(cfg.sample_factor, ds.n());
    summary["dataset"] = {{"n", ds.n()}, {"d", ds.d()}, {"c", ds.c()}, {"T", ds.t_count()}};
    if (final_buffer) {
        const auto sizes = final_buffer->size_report();
        summary["buffer"] = {{"full_bytes", sizes.full_bytes},
                             {"sketch_bytes", sizes.sketch_bytes},
                             {"seed_bytes", sizes.seed_bytes},
                             {"value_budget", final_buffer->value_budget()},
                             {"stored_values", final_buffer->stored_value_count()}};
        if (args.save_buffer && inc::uses_sketch(cfg.mode))
            inc::write_buffer((dir / "buffer.incb").string(), *final_buffer,
                              inc::sketch_kind_of(cfg.mode));
    }
    inc::write_json((dir / "summary.json").string(), summary);

    std::printf("%s: rfe=%.6f psnr=%.2f compression=%.1fx steps=%zu%s\n",
                inc::to_string(cfg.mode).c_str(), metrics.rfe, metrics.mean_psnr,
                metrics.compression, report.steps, report.diverged ? " DIVERGED" : "");
    return report.diverged ? 1 : 0;
}

struct ReconArgs {
    std::string model;
    std::string data;
    std::string out;
    std::size_t t_start = 1;
    std::size_t t_end = 0;  // 0: through the model horizon
    std::string precision = "f32";
};

template <typename T>
int run_reconstruct(const ReconArgs& a) {
    const auto model = inc::read_model<T>(a.model);
    const auto ds = inc::read_dataset<T>(a.data);
    if (model.target.in_dim != ds.d() + 1)
        throw inc::ShapeError("reconstruct: model expects d=" +
                              std::to_string(model.target.in_dim - 1) + ", mesh has d=" +
                              std::to_string(ds.d()));
    const std::size_t t_end = a.t_end == 0 ? model.t_max : a.t_end;
    if (a.t_start < 1 || t_end > model.t_max || a.t_start > t_end)
        throw inc::ConfigError("reconstruct: bad snapshot range");

    inc::MeshDataset<T> out;
    out.name = "reconstruction";
    out.x = ds.x;
    for (std::size_t t = a.t_start; t <= t_end; ++t)
        out.snapshots.push_back(inc::full_forward(model, ds.x, t));
    inc::write_dataset(a.out, out);
    std::printf("wrote %s: T=%zu snapshots (t=%zu..%zu)\n", a.out.c_str(), out.t_count(),
                a.t_start, t_end);
    return 0;
}

struct EvalArgs {
    std::string truth;
    std::string recon;
    std::string out;
};

int cmd_eval(const EvalArgs& a) {
    const auto truth = inc::read_dataset<float>(a.truth);
    const auto recon = inc::read_dataset<float>(a.recon);
    if (truth.t_count() != recon.t_count() || truth.n() != recon.n() || truth.c() != recon.c())
        throw inc::ShapeError("eval: dataset shapes differ");

    const double r = inc::rfe(truth.snapshots, recon.snapshots);
    json psnr_list = json::array();
    double acc = 0.0;
    std::size_t defined = 0;
    bool any_inf = false;
    for (std::size_t t = 1; t <= truth.t_count(); ++t) {
        double p;
        try {
            p = inc::psnr(truth.snapshot(t), recon.snapshot(t));
        } catch (const inc::NumericError&) {
            psnr_list.push_back(nullptr);
            continue;
        }
        psnr_list.push_back(inc::json_number(p));
        if (std::isinf(p)) any_inf = true;
        else {
            acc += p;
            ++defined;
        }
    }
    const double mean_psnr = any_inf ? std::numeric_limits<double>::infinity()
                             : defined ? acc / defined
                                       : std::numeric_limits<double>::quiet_NaN();
    json out = {{"rfe", inc::json_number(r)},
                {"mean_psnr_db", inc::json_number(mean_psnr)},
                {"per_snapshot_psnr_db", psnr_list}};
    if (!a.out.empty()) inc::write_json(a.out, out);
    if (std::isinf(mean_psnr))
        std::printf("rfe=%.6g mean_psnr=inf dB\n", r);
    else
        std::printf("rfe=%.6g mean_psnr=%.4f dB\n", r, mean_psnr);
    return 0;
}

struct DimestArgs {
    std::string model;
    std::string data;
    std::size_t t = 1;
    std::size_t samples = 200;
    double perturb = 1e-5;
    double threshold = 0.95;
    std::uint64_t seed = 0;
    double full_loss = 0.0;
    double sketch_loss = 0.0;
    double m_direct = 0.0;
    std::size_t n_direct = 0;
    std::string out;
};

int cmd_dimest(const DimestArgs& a) {
    if (a.full_loss <= 0.0 || a.sketch_loss <= 0.0)
        throw inc::ConfigError("dimest: --full-loss and --sketch-loss are required");
    double m = a.m_direct;
    std::size_t n = a.n_direct;
    if (!a.model.empty()) {
        if (a.data.empty()) throw inc::ConfigError("dimest: --model requires --data");
        const auto model = inc::read_model<float>(a.model);
        const auto ds = inc::read_dataset<float>(a.data);
        m = inc::lpca_dimension(model, ds.x, a.t, a.samples, a.perturb, a.seed, a.threshold);
        if (n == 0) n = ds.n();
    }
    if (m <= 0.0) throw inc::ConfigError("dimest: supply --M or --model/--data");
    if (n == 0) throw inc::ConfigError("dimest: supply --n or --data");
    const auto est = inc::make_dim_estimate(m, a.full_loss, a.sketch_loss, n);
    json out = {{"M", est.m},
                {"epsilon", est.epsilon},
                {"k_est", est.k_est},
                {"sample_factor_pct", est.sample_factor_pct}};
    if (!a.out.empty()) inc::write_json(a.out, out);
    std::printf("%s\n", out.dump().c_str());
    return 0;
}

struct SweepArgs {
    TrainArgs train;
    std::vector<double> factors;
    std::size_t trials = 3;
};

template <typename T>
int run_sweep(const SweepArgs& a) {
    if (a.factors.empty()) throw inc::ConfigError("sweep: --factors must be non-empty");
    if (a.trials < 1) throw inc::ConfigError("sweep: --trials must be >= 1");
    const auto ds = inc::read_dataset<T>(a.train.data);
    const std::string csv_path =
        (std::filesystem::path(a.train.out_dir).string() == "."
             ? std::string("sweep.csv")
             : (std::filesystem::path(a.train.out_dir) / "sweep.csv").string());
    if (csv_path != "sweep.csv") std::filesystem::create_directories(a.train.out_dir);

    std::ofstream csv(csv_path);
    if (!csv) throw inc::IoError("cannot open for writing: " + csv_path);
    csv << "sample_factor,seed,rfe,psnr\n";

    for (double factor : a.factors) {
        std::vector<double> rfes;
        for (std::size_t trial = 0; trial < a.trials; ++trial) {
            TrainArgs ta = a.train;
            ta.sample_factor = factor;
            ta.seed = inc::mix_seed(a.train.seed, trial);
            const inc::TrainConfig cfg = to_config(ta);
            inc::CompressorModel<T> model;
            inc::TrainReport report;
            if (inc::is_offline(cfg.mode)) {
                auto r = inc::train_offline(cfg, ds);
                model = std::move(r.first);
                report = std::move(r.second);
            } else {
                auto stream = inc::stream_from(ds);
                auto r = inc::train_insitu(cfg, ds.x, stream);
                model = std::move(r.first);
                report = std::move(r.second);
            }
            if (report.diverged) {
                csv << factor << "," << ta.seed << ",nan,nan\n";
                continue;
            }
            const auto metrics = inc::evaluate(model, ds);
            rfes.push_back(metrics.rfe);
            csv << factor << "," << ta.seed << "," << metrics.rfe << "," << metrics.mean_psnr
                << "\n";
        }
        double mean = 0.0, sd = 0.0;
        for (double r : rfes) mean += r;
        if (!rfes.empty()) mean /= static_cast<double>(rfes.size());
        for (double r : rfes) sd += (r - mean) * (r - mean);
        if (rfes.size() > 1) sd = std::sqrt(sd / static_cast<double>(rfes.size() - 1));
        std::printf("factor %.4g%%: rfe %.5f +/- %.5f over %zu trials\n", factor, mean, sd,
                    rfes.size());
    }
    csv.close();
    std::printf("wrote %s\n", csv_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"in-situ neural compression toolkit"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--kind", gen_args.kind, "pulse2d|branch3d");
    gen->add_option("--side", gen_args.side, "grid side (pulse2d)");
    gen->add_option("--points", gen_args.points, "node count (branch3d)");
    gen->add_option("--T", gen_args.t_count, "snapshot count");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("-o,--out", gen_args.out, "output INCD file")->required();

    TrainArgs train_args;
    auto* compress = app.add_subcommand("compress", "train a compressor on a dataset");
    add_train_flags(compress, train_args);

    ReconArgs recon_args;
    auto* recon = app.add_subcommand("reconstruct", "evaluate a model over the mesh");
    recon->add_option("--model", recon_args.model, "INCM model artifact")->required();
    recon->add_option("--data", recon_args.data, "INCD file providing the mesh")->required();
    recon->add_option("-o,--out", recon_args.out, "output INCD file")->required();
    recon->add_option("--t-start", recon_args.t_start, "first snapshot (1-based)");
    recon->add_option("--t-end", recon_args.t_end, "last snapshot (default: model horizon)");
    recon->add_option("--precision", recon_args.precision, "f32|f64");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "compare two INCD files");
    eval->add_option("--truth", eval_args.truth)->required();
    eval->add_option("--recon", eval_args.recon)->required();
    eval->add_option("-o,--out", eval_args.out, "metrics JSON path");

    DimestArgs dim_args;
    auto* dim = app.add_subcommand("dimest", "theory-driven sketch-size estimate");
    dim->add_option("--model", dim_args.model, "INCM model (for lPCA)");
    dim->add_option("--data", dim_args.data, "INCD dataset (mesh for lPCA)");
    dim->add_option("--t", dim_args.t, "snapshot for the perturbation cloud");
    dim->add_option("--samples", dim_args.samples, "perturbation count");
    dim->add_option("--perturb", dim_args.perturb, "perturbation scale");
    dim->add_option("--threshold", dim_args.threshold, "explained-variance threshold");
    dim->add_option("--seed", dim_args.seed, "perturbation seed");
    dim->add_option("--full-loss", dim_args.full_loss, "offline-baseline loss")->required();
    dim->add_option("--sketch-loss", dim_args.sketch_loss, "offline-fjlt loss")->required();
    dim->add_option("--M", dim_args.m_direct, "manifold dimension (skip lPCA)");
    dim->add_option("--n", dim_args.n_direct, "mesh size");
    dim->add_option("-o,--out", dim_args.out, "output JSON path");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "sample-factor sweep with repeated trials");
    add_train_flags(sweep, sweep_args.train);
    sweep->add_option("--factors", sweep_args.factors, "sample factors (percent)")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", sweep_args.trials, "trials per factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_args);
        if (compress->parsed()) {
            if (train_args.precision == "f64") return run_compress<double>(train_args);
            if (train_args.precision == "f32") return run_compress<float>(train_args);
            throw inc::ConfigError("unknown precision '" + train_args.precision + "'");
        }
        if (recon->parsed()) {
            if (recon_args.precision == "f64") return run_reconstruct<double>(recon_args);
            if (recon_args.precision == "f32") return run_reconstruct<float>(recon_args);
            throw inc::ConfigError("unknown precision '" + recon_args.precision + "'");
        }
        if (eval->parsed()) return cmd_eval(eval_args);
        if (dim->parsed()) return cmd_dimest(dim_args);
        if (sweep->parsed()) {
            if (sweep_args.train.precision == "f64") return run_sweep<double>(sweep_args);
            return run_sweep<float>(sweep_args);
        }
    } catch (const inc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const inc::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const inc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const inc::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
