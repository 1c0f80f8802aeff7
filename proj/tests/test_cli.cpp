#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "rahl/checkpoint.hpp"
#include "rahl/data.hpp"
#include "rahl/schema.hpp"
#include "test_util.hpp"

using namespace rahl;
using nlohmann::json;
using testutil::CommandResult;
using testutil::read_file;
using testutil::run_command;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::string cli() { return "'" + testutil::cli_path() + "'"; }

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

json repo_schema(const std::string& name) {
    const char* root = std::getenv("RAHL_SOURCE_DIR");
    REQUIRE(root != nullptr);
    return json::parse(read_file(std::filesystem::path(root) / "schemas" / name));
}

// Small but learnable trace plus the flags that keep runs fast.
std::string make_trace(const TempDir& tmp, int length = 120, int seed = 5) {
    const std::string path = (tmp / "trace.csv").string();
    const CommandResult r = run_command(cli() + " synth --length " + std::to_string(length) +
                                        " --seed " + std::to_string(seed) +
                                        " --noise-sd 1.2 -o " + path);
    REQUIRE(r.exit_code == 0);
    return path;
}

const std::string kFast = " --epochs 2 --batch 8 --window 4 --hidden 4 --fc-hidden 4";

// First "x,y x,y ..." points attribute after `from`.
std::vector<std::pair<double, double>> first_polyline(const std::string& svg,
                                                      std::size_t from = 0) {
    const std::size_t pos = svg.find("points=\"", from);
    REQUIRE(pos != std::string::npos);
    const std::size_t end = svg.find('"', pos + 8);
    std::istringstream in(svg.substr(pos + 8, end - pos - 8));
    std::vector<std::pair<double, double>> pts;
    std::string pair;
    while (in >> pair) {
        const std::size_t comma = pair.find(',');
        pts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
    return pts;
}

}  // namespace

TEST_CASE("synth writes header plus one row per sample, deterministically") {
    TempDir tmp("cli_synth");
    const std::string a = (tmp / "a.csv").string();
    const std::string b = (tmp / "b.csv").string();

    const std::string flags = " synth --length 2000 --seed 7 --outlier-rate 0.05 -o ";
    CHECK(run_command(cli() + flags + a).exit_code == 0);
    CHECK(run_command(cli() + flags + b).exit_code == 0);

    const std::string text = read_file(a);
    CHECK(count_lines(text) == 2001);
    CHECK(text.substr(0, 6) == "t,CQI\n");
    CHECK(text == read_file(b));
}

TEST_CASE("synth rejects an impossible outlier rate") {
    TempDir tmp("cli_synth_bad");
    const CommandResult r = run_command(cli() + " synth --length 10 --outlier-rate 1.5 -o " +
                                        (tmp / "x.csv").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("outlier rate") != std::string::npos);
}

TEST_CASE("train writes the four artifacts and valid metrics") {
    TempDir tmp("cli_train");
    const std::string trace = make_trace(tmp);
    const std::string outdir = (tmp / "run").string();

    const CommandResult r = run_command(cli() + " train -i " + trace + " -o " + outdir +
                                        kFast + " --loss rahl:0.5 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mape") != std::string::npos);

    for (const char* name : {"manifest.json", "metrics.json", "predictions.csv", "model.ckpt"}) {
        CHECK(std::filesystem::exists(tmp / "run" / name));
    }

    const json metrics = json::parse(read_file(tmp / "run" / "metrics.json"));
    schema_require(repo_schema("metrics-v1.json"), metrics, "metrics.json");
    CHECK(metrics.at("schema") == "rahl-metrics/1");
    CHECK(metrics.at("command") == "train");
    CHECK(metrics.at("seed") == 3);
    CHECK(metrics.at("window") == 4);
    CHECK(metrics.at("loss").at("kind") == "rahl");
    CHECK(metrics.at("loss").at("alpha") == 0.5);
    CHECK(metrics.at("epoch_loss").size() == 2);
    CHECK(metrics.at("delta_per_epoch").size() == 2);
    CHECK(metrics.at("final_delta").get<double>() > 0.0);

    const json manifest = json::parse(read_file(tmp / "run" / "manifest.json"));
    schema_require(repo_schema("manifest-v1.json"), manifest, "manifest.json");
    CHECK(manifest.at("command") == "train");
    CHECK(manifest.at("config").at("loss").at("alpha") == 0.5);

    // predictions.csv: header plus one line per test window, starting at
    // split + window.
    const std::string preds = read_file(tmp / "run" / "predictions.csv");
    CHECK(count_lines(preds) == metrics.at("n_test").get<std::size_t>() + 1);
    CHECK(preds.substr(0, 19) == "t,actual,predicted\n");
    const std::size_t first_t = 96 + 4;  // floor(0.8 * 120) + window
    CHECK(preds.find("\n" + std::to_string(first_t) + ",") != std::string::npos);
}

TEST_CASE("train rerun from the manifest reproduces metrics byte for byte") {
    TempDir tmp("cli_rerun");
    const std::string trace = make_trace(tmp);

    const CommandResult first = run_command(cli() + " train -i " + trace + " -o " +
                                            (tmp / "run1").string() + kFast +
                                            " --loss rahl:0.5 --seed 11");
    REQUIRE(first.exit_code == 0);

    const CommandResult second = run_command(cli() + " rerun --manifest " +
                                             (tmp / "run1" / "manifest.json").string() +
                                             " -o " + (tmp / "run2").string());
    REQUIRE(second.exit_code == 0);

    CHECK(read_file(tmp / "run1" / "metrics.json") == read_file(tmp / "run2" / "metrics.json"));
    CHECK(read_file(tmp / "run1" / "predictions.csv") ==
          read_file(tmp / "run2" / "predictions.csv"));
    CHECK(read_file(tmp / "run1" / "model.ckpt") == read_file(tmp / "run2" / "model.ckpt"));
}

TEST_CASE("rerun refuses a changed input file") {
    TempDir tmp("cli_rerun_crc");
    const std::string trace = make_trace(tmp);
    const CommandResult first = run_command(cli() + " train -i " + trace + " -o " +
                                            (tmp / "run1").string() + kFast);
    REQUIRE(first.exit_code == 0);

    write_file(trace, read_file(trace) + "120,9\n");
    const CommandResult r = run_command(cli() + " rerun --manifest " +
                                        (tmp / "run1" / "manifest.json").string() + " -o " +
                                        (tmp / "run2").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("crc32") != std::string::npos);
}

TEST_CASE("train maps error families onto exit codes") {
    TempDir tmp("cli_train_err");
    const std::string trace = make_trace(tmp);
    const std::string out = " -o " + (tmp / "out").string();

    CHECK(run_command(cli() + " train -i " + trace + out + kFast + " --loss huber:0")
              .exit_code == 1);
    CHECK(run_command(cli() + " train -i " + trace + out + kFast + " --loss nope")
              .exit_code == 1);
    CHECK(run_command(cli() + " train -i " + (tmp / "absent.csv").string() + out + kFast)
              .exit_code == 2);
    CHECK(run_command(cli() + " train -i " + trace + out + kFast + " --column Bogus")
              .exit_code == 2);

    const CommandResult diverged = run_command(cli() + " train -i " + trace + out + kFast +
                                               " --lr 1e300 --loss mse");
    CHECK(diverged.exit_code == 3);
    CHECK(diverged.output.find("epoch") != std::string::npos);
}

TEST_CASE("sweep writes one row per delta and a text table") {
    TempDir tmp("cli_sweep");
    const std::string trace = make_trace(tmp);
    const std::string outdir = (tmp / "sweep").string();

    const CommandResult r = run_command(cli() + " sweep -i " + trace + " -o " + outdir +
                                        kFast + " --deltas 0.5,1.0");
    CHECK(r.exit_code == 0);

    const json report = json::parse(read_file(tmp / "sweep" / "sweep.json"));
    schema_require(repo_schema("sweep-report-v1.json"), report, "sweep.json");
    CHECK(report.at("kind") == "delta-sweep");
    REQUIRE(report.at("rows").size() == 2);
    CHECK(report.at("rows")[0].at("label") == "0.5");
    CHECK(report.at("rows")[1].at("label") == "1");

    const std::string table = read_file(tmp / "sweep" / "sweep.txt");
    CHECK(table.find("label") != std::string::npos);
    CHECK(table.find("best:") != std::string::npos);
    CHECK(r.output.find("best:") != std::string::npos);

    const json manifest = json::parse(read_file(tmp / "sweep" / "manifest.json"));
    schema_require(repo_schema("manifest-v1.json"), manifest, "sweep manifest");
    CHECK(manifest.at("deltas").size() == 2);
}

TEST_CASE("a single-delta sweep is a single-row report") {
    TempDir tmp("cli_sweep_one");
    const std::string trace = make_trace(tmp);
    const CommandResult r = run_command(cli() + " sweep -i " + trace + " -o " +
                                        (tmp / "sweep").string() + kFast + " --deltas 1.0");
    CHECK(r.exit_code == 0);
    const json report = json::parse(read_file(tmp / "sweep" / "sweep.json"));
    CHECK(report.at("rows").size() == 1);
}

TEST_CASE("a sweep whose rows all diverge exits with the partial-failure code") {
    TempDir tmp("cli_sweep_fail");
    const std::string trace = make_trace(tmp);
    const CommandResult r = run_command(cli() + " sweep -i " + trace + " -o " +
                                        (tmp / "sweep").string() + kFast +
                                        " --deltas 0.5,1.0 --lr 1e300");
    CHECK(r.exit_code == 4);

    const json report = json::parse(read_file(tmp / "sweep" / "sweep.json"));
    schema_require(repo_schema("sweep-report-v1.json"), report, "sweep.json");
    CHECK(report.at("best") == "");
    for (const auto& row : report.at("rows")) {
        CHECK(row.at("failed") == true);
        CHECK(row.at("mape").is_null());
    }
}

TEST_CASE("compare emits four rows and five SVG plots") {
    TempDir tmp("cli_compare");
    const std::string trace = make_trace(tmp);
    const std::string outdir = (tmp / "cmp").string();

    const CommandResult r = run_command(cli() + " compare -i " + trace + " -o " + outdir +
                                        kFast + " --deltas 0.5,1.0 --alpha 0.5 --jobs 2");
    CHECK(r.exit_code == 0);

    const json report = json::parse(read_file(tmp / "cmp" / "compare.json"));
    schema_require(repo_schema("sweep-report-v1.json"), report, "compare.json");
    CHECK(report.at("kind") == "compare");
    REQUIRE(report.at("rows").size() == 4);
    CHECK(report.at("rows")[0].at("label") == "rahl");
    CHECK(report.at("rows")[2].at("label") == "mse");
    CHECK(report.at("rows")[3].at("label") == "mae");

    std::size_t svg_count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(tmp / "cmp")) {
        svg_count += entry.path().extension() == ".svg";
    }
    CHECK(svg_count == 5);
    for (const char* name : {"overlay_rahl.svg", "overlay_huber.svg", "overlay_mse.svg",
                             "overlay_mae.svg", "cumulative_ape.svg"}) {
        CHECK(std::filesystem::exists(tmp / "cmp" / name));
    }

    // Cumulative APE rises, so its pixel y must never rise.
    const std::string svg = read_file(tmp / "cmp" / "cumulative_ape.svg");
    std::size_t at = 0;
    for (int line = 0; line < 4; ++line) {
        const auto pts = first_polyline(svg, at);
        CHECK(pts.size() >= 2);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].second <= pts[i - 1].second + 1e-9);
        }
        at = svg.find("points=\"", at) + 8;
    }
}

TEST_CASE("compare with several seeds reports the per-seed spread") {
    TempDir tmp("cli_compare_seeds");
    const std::string trace = make_trace(tmp);
    const CommandResult r = run_command(cli() + " compare -i " + trace + " -o " +
                                        (tmp / "cmp").string() + kFast +
                                        " --deltas 1.0 --seeds 2 --jobs 2");
    CHECK(r.exit_code == 0);
    const json report = json::parse(read_file(tmp / "cmp" / "compare.json"));
    for (const auto& row : report.at("rows")) {
        CHECK(row.at("seed_mapes").size() == 2);
    }
}

TEST_CASE("predict on the training test slice reproduces the reported mape") {
    TempDir tmp("cli_predict");
    const std::string trace = make_trace(tmp);
    const CommandResult trained = run_command(cli() + " train -i " + trace + " -o " +
                                              (tmp / "run").string() + kFast +
                                              " --loss rahl:0.5 --seed 2");
    REQUIRE(trained.exit_code == 0);
    const json metrics = json::parse(read_file(tmp / "run" / "metrics.json"));

    // The test slice is everything past the 80/20 cut of the cleaned series.
    const TimeSeries full = load_csv(trace, "CQI");
    std::string slice = "t,CQI\n";
    for (std::size_t i = 96; i < full.values.size(); ++i) {
        slice += std::to_string(i) + "," + std::to_string(static_cast<long long>(full.values[i])) + "\n";
    }
    write_file(tmp / "slice.csv", slice);

    const CommandResult predicted = run_command(cli() + " predict --checkpoint " +
                                                (tmp / "run" / "model.ckpt").string() +
                                                " -i " + (tmp / "slice.csv").string() +
                                                " -o " + (tmp / "preds.csv").string());
    REQUIRE(predicted.exit_code == 0);

    const std::size_t at = predicted.output.find("mape ");
    REQUIRE(at != std::string::npos);
    const double reported = std::stod(predicted.output.substr(at + 5));
    CHECK(reported == metrics.at("mape").get<double>());

    CHECK(count_lines(read_file(tmp / "preds.csv")) ==
          metrics.at("n_test").get<std::size_t>() + 1);
}

TEST_CASE("a zero network with an output bias is a perfect constant predictor") {
    TempDir tmp("cli_predict_const");

    Checkpoint ckpt;
    ckpt.train.window = 4;
    ckpt.train.hidden_size = 4;
    ckpt.train.fc_hidden = 4;
    ckpt.scaler = Scaler{0.0, 16.0};
    ckpt.params = LstmParams(ckpt.train.model_config());
    ckpt.params.out_bias() = 0.625;  // unscales to exactly 10
    ckpt.adam = adam_init(ckpt.params.size(), 0.01);
    save_checkpoint(tmp / "const.ckpt", ckpt);

    std::string csv = "t,CQI\n";
    for (int i = 0; i < 30; ++i) csv += std::to_string(i) + ",10\n";
    write_file(tmp / "constant.csv", csv);

    const CommandResult r = run_command(cli() + " predict --checkpoint " +
                                        (tmp / "const.ckpt").string() + " -i " +
                                        (tmp / "constant.csv").string() + " -o " +
                                        (tmp / "preds.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mape 0%") != std::string::npos);

    const std::string preds = read_file(tmp / "preds.csv");
    CHECK(count_lines(preds) == 27);  // 26 windows + header
    CHECK(preds.find("4,10,10\n") != std::string::npos);
}

TEST_CASE("predict error paths") {
    TempDir tmp("cli_predict_err");
    const std::string trace = make_trace(tmp, 60);
    const CommandResult trained = run_command(cli() + " train -i " + trace + " -o " +
                                              (tmp / "run").string() + kFast);
    REQUIRE(trained.exit_code == 0);

    // Missing --checkpoint is a usage error.
    CHECK(run_command(cli() + " predict -i " + trace + " -o " +
                      (tmp / "p.csv").string()).exit_code == 1);

    // A corrupted checkpoint is a data error.
    std::string bytes = read_file(tmp / "run" / "model.ckpt");
    bytes[bytes.size() / 2] ^= 0x40;
    write_file(tmp / "bad.ckpt", bytes);
    const CommandResult r = run_command(cli() + " predict --checkpoint " +
                                        (tmp / "bad.ckpt").string() + " -i " + trace +
                                        " -o " + (tmp / "p.csv").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("CRC") != std::string::npos);
}

TEST_CASE("top-level usage errors exit with code 1") {
    TempDir tmp("cli_usage");
    CHECK(run_command(cli()).exit_code == 1);
    CHECK(run_command(cli() + " frobnicate").exit_code == 1);
    CHECK(run_command(cli() + " synth").exit_code == 1);  // missing -o
    CHECK(run_command(cli() + " --version").exit_code == 0);
    CHECK(run_command(cli() + " --help").exit_code == 0);
}
