#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "inc/buffer.hpp"
#include "inc/dataio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("INC_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args, const std::string& log = "/dev/null") {
    const std::string cmd = cli_path() + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    json j;
    is >> j;
    return j;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("inc_cli_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kSmallTrain =
    " --cycles 8 --bs 4 --lr 1e-3 --sample-factor 5"
    " --hyper-width 8 --hyper-blocks 1 --target-width 6 --target-blocks 1 --seed 5";

} // namespace

TEST_CASE("gen writes a readable dataset of the stated size") {
    TempDir tmp;
    const auto out = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 32 --T 8 --seed 7 -o " + out) == 0);
    const auto ds = inc::read_dataset<float>(out);
    REQUIRE(ds.n() == 1024);
    REQUIRE(ds.t_count() == 8);
    REQUIRE(fs::file_size(out) == inc::dataset_file_bytes(1024, 2, 1, 8));

    const auto out2 = tmp / "d2.incd";
    REQUIRE(run("gen --kind pulse2d --side 32 --T 8 --seed 7 -o " + out2) == 0);
    REQUIRE(same_bytes(out, out2));

    REQUIRE(run("gen --kind nope --side 8 --T 4 --seed 1 -o " + (tmp / "x.incd")) == 2);
    REQUIRE(run("gen --side 8 --T 4") == 2);  // missing -o
}

TEST_CASE("compress emits artifact, csv, and a schema-complete summary") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 32 --T 6 --seed 3 -o " + data) == 0);
    const auto dir = tmp / "run";
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt -o " + dir + kSmallTrain) == 0);
    REQUIRE(fs::exists(dir + "/model.incm"));
    REQUIRE(fs::exists(dir + "/report.csv"));

    const json summary = read_json(dir + "/summary.json");
    REQUIRE(summary["metrics"].contains("rfe"));
    REQUIRE(summary["metrics"].contains("mean_psnr_db"));
    REQUIRE(summary["metrics"].contains("compression_rate"));
    REQUIRE(summary["config"]["mode"] == "insitu-fjlt");
    // k = round(5% of 1024) = 51
    REQUIRE(summary["config"]["k"] == 51);
    // size accounting for the in-situ buffer: T_f*n + T_s*k values at most
    REQUIRE(summary["buffer"]["value_budget"] == 1024 + 5 * 51);
    REQUIRE(summary["buffer"]["stored_values"] <= summary["buffer"]["value_budget"]);
    REQUIRE(summary["buffer"]["seed_bytes"] == 5 * 8);

    REQUIRE(run("compress --data " + data + " --mode bogus -o " + tmp / "x") == 2);
}

TEST_CASE("saved buffer state is reloadable") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 16 --T 5 --seed 2 -o " + data) == 0);
    const auto dir = tmp / "run";
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt --save-buffer -o " + dir +
                kSmallTrain) == 0);
    inc::SketchKind kind;
    const auto buf = inc::read_buffer<float>(dir + "/buffer.incb", &kind);
    REQUIRE(kind == inc::SketchKind::Fjlt);
    REQUIRE(buf.full_size() == 1);
    REQUIRE(buf.sketch_size() == 4);  // T-1 sketched snapshots
    REQUIRE(buf.full_queue().front().t == 5);
}

TEST_CASE("reconstruct then eval reproduces the summary rfe") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 16 --T 6 --seed 4 -o " + data) == 0);
    const auto dir = tmp / "run";
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt -o " + dir + kSmallTrain) == 0);
    const double summary_rfe = read_json(dir + "/summary.json")["metrics"]["rfe"];

    const auto recon = tmp / "recon.incd";
    REQUIRE(run("reconstruct --model " + dir + "/model.incm --data " + data + " -o " + recon) == 0);
    const auto mj = tmp / "metrics.json";
    REQUIRE(run("eval --truth " + data + " --recon " + recon + " -o " + mj) == 0);
    const double eval_rfe = read_json(mj)["rfe"];
    REQUIRE(eval_rfe == Catch::Approx(summary_rfe).margin(1e-6));

    // time subset emits only the requested range
    const auto sub = tmp / "sub.incd";
    REQUIRE(run("reconstruct --model " + dir + "/model.incm --data " + data +
                " --t-start 2 --t-end 4 -o " + sub) == 0);
    REQUIRE(inc::read_dataset<float>(sub).t_count() == 3);

    // mesh mismatch: a 3-d mesh under a 2-d model
    const auto branch = tmp / "b.incd";
    REQUIRE(run("gen --kind branch3d --points 128 --T 4 --seed 1 -o " + branch) == 0);
    REQUIRE(run("reconstruct --model " + dir + "/model.incm --data " + branch + " -o " +
                (tmp / "bad.incd")) == 3);
}

TEST_CASE("eval on identical files gives zero error and inf psnr") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 8 --T 4 --seed 9 -o " + data) == 0);
    const auto mj = tmp / "m.json";
    REQUIRE(run("eval --truth " + data + " --recon " + data + " -o " + mj) == 0);
    const json m = read_json(mj);
    REQUIRE(m["rfe"] == 0.0);
    REQUIRE(m["mean_psnr_db"] == "inf");

    const auto other = tmp / "o.incd";
    REQUIRE(run("gen --kind pulse2d --side 8 --T 5 --seed 9 -o " + other) == 0);
    REQUIRE(run("eval --truth " + data + " --recon " + other) == 3);
}

TEST_CASE("dimest matches the reference rows and rejects equal losses") {
    TempDir tmp;
    const auto out = tmp / "dim.json";
    REQUIRE(run("dimest --full-loss 0.0262 --sketch-loss 0.0485 --M 11 --n 2500 -o " + out) == 0);
    const json j = read_json(out);
    REQUIRE(double(j["sample_factor_pct"]) == Catch::Approx(1.46).margin(0.01));

    REQUIRE(run("dimest --full-loss 0.0076 --sketch-loss 0.0326 --M 29.454 --n 116943 -o " +
                out) == 0);
    REQUIRE(double(read_json(out)["sample_factor_pct"]) == Catch::Approx(0.03).margin(0.01));

    REQUIRE(run("dimest --full-loss 0.05 --sketch-loss 0.05 --M 10 --n 100") == 2);
    REQUIRE(run("dimest --full-loss 0.05 --sketch-loss 0.06") == 2);  // no M, no n
}

TEST_CASE("dimest runs the lpca path against a model artifact") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 8 --T 4 --seed 2 -o " + data) == 0);
    const auto dir = tmp / "run";
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt -o " + dir + kSmallTrain) == 0);
    const auto out = tmp / "dim.json";
    REQUIRE(run("dimest --model " + dir + "/model.incm --data " + data +
                " --samples 40 --full-loss 0.03 --sketch-loss 0.05 -o " + out) == 0);
    const json j = read_json(out);
    REQUIRE(double(j["M"]) >= 1.0);
    REQUIRE(j["sample_factor_pct"].is_number());
}

TEST_CASE("sweep writes one row per factor-trial pair") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 8 --T 4 --seed 6 -o " + data) == 0);
    REQUIRE(run("sweep --data " + data + " --mode insitu-fjlt --factors 5,20 --trials 2 -o " +
                tmp.path.string() + kSmallTrain) == 0);
    std::ifstream csv(tmp / "sweep.csv");
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "sample_factor,seed,rfe,psnr");
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    REQUIRE(rows == 4);

    REQUIRE(run("sweep --data " + data + " --mode insitu-fjlt --trials 2" + kSmallTrain) == 2);
}

TEST_CASE("identical seeds give byte-identical artifacts and metrics") {
    TempDir tmp;
    const auto data = tmp / "d.incd";
    REQUIRE(run("gen --kind pulse2d --side 16 --T 5 --seed 8 -o " + data) == 0);
    const auto a = tmp / "a";
    const auto b = tmp / "b";
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt -o " + a + kSmallTrain) == 0);
    REQUIRE(run("compress --data " + data + " --mode insitu-fjlt -o " + b + kSmallTrain) == 0);
    REQUIRE(same_bytes(a + "/model.incm", b + "/model.incm"));
    REQUIRE(read_json(a + "/summary.json")["metrics"] == read_json(b + "/summary.json")["metrics"]);
}
