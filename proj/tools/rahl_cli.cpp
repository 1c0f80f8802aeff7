#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rahl/checkpoint.hpp"
#include "rahl/data.hpp"
#include "rahl/errors.hpp"
#include "rahl/eval.hpp"
#include "rahl/json_io.hpp"
#include "rahl/manifest.hpp"
#include "rahl/svg.hpp"
#include "rahl/synth.hpp"
#include "rahl/train.hpp"
#include "rahl/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitPartialSweep = 4;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --loss mse | mae | huber:<delta> | rahl:<alpha>
rahl::LossSpec parse_loss(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    double value = 0.0;
    const bool has_value = colon != std::string::npos;
    if (has_value) {
        try {
            std::size_t pos = 0;
            value = std::stod(text.substr(colon + 1), &pos);
            if (pos != text.size() - colon - 1) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw rahl::InvalidArgument("--loss: cannot parse number in '" + text + "'");
        }
    }
    rahl::LossSpec spec;
    if (kind == "mse" && !has_value) {
        spec = rahl::LossSpec::mse();
    } else if (kind == "mae" && !has_value) {
        spec = rahl::LossSpec::mae();
    } else if (kind == "huber") {
        spec = rahl::LossSpec::huber(has_value ? value : 1.0);
    } else if (kind == "rahl") {
        spec = rahl::LossSpec::rahl(has_value ? value : 1.0);
    } else {
        throw rahl::InvalidArgument(
            "--loss: expected mse, mae, huber:<delta>, or rahl:<alpha>, got '" + text + "'");
    }
    spec.validate();
    return spec;
}

struct IoOptions {
    std::string input;
    std::string column = "CQI";
    std::string outdir;
};

void add_io_options(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("-i,--input", io.input, "input CSV file")->required();
    cmd->add_option("--column", io.column, "CSV column to forecast (default CQI)");
    cmd->add_option("-o,--outdir", io.outdir, "output directory")->required();
}

void add_train_options(CLI::App* cmd, rahl::TrainConfig& cfg) {
    cmd->add_option("--epochs", cfg.epochs, "training epochs (default 300)");
    cmd->add_option("--batch", cfg.batch_size, "mini-batch size (default 24)");
    cmd->add_option("--window", cfg.window, "input window size (default 36)");
    cmd->add_option("--lr", cfg.lr, "initial learning rate (default 0.01)");
    cmd->add_option("--seed", cfg.seed, "random seed (default 0)");
    cmd->add_option("--train-fraction", cfg.train_fraction,
                    "chronological training fraction (default 0.8)");
    cmd->add_option("--hidden", cfg.hidden_size, "LSTM hidden units (default 64)");
    cmd->add_option("--fc-hidden", cfg.fc_hidden, "FC layer units (default 64)");
}

rahl::RunManifest base_manifest(const std::string& command, const rahl::TrainConfig& cfg,
                                const IoOptions& io, const rahl::ExperimentData& data) {
    rahl::RunManifest m;
    m.command = command;
    m.config = cfg;
    m.input_path = io.input;
    m.input_column = io.column;
    m.input_crc32 = rahl::file_crc32(io.input);
    m.scaler = data.scaler;
    return m;
}

ordered_json metrics_common(const std::string& command, const rahl::TrainConfig& cfg,
                            const rahl::ExperimentData& data) {
    ordered_json doc;
    doc["schema"] = rahl::kMetricsSchema;
    doc["tool_version"] = rahl::kToolVersion;
    doc["command"] = command;
    doc["seed"] = cfg.seed;
    doc["window"] = cfg.window;
    doc["n_train"] = data.train_windows.size();
    doc["n_test"] = data.test_windows.size();
    return doc;
}

void write_predictions_csv(const fs::path& path, std::size_t first_t,
                           std::span<const double> actual, std::span<const double> predicted) {
    std::string out = "t,actual,predicted\n";
    for (std::size_t i = 0; i < actual.size(); ++i) {
        out += std::to_string(first_t + i) + "," + fmt17(actual[i]) + "," +
               fmt17(predicted[i]) + "\n";
    }
    rahl::write_text_file(path, out);
}

int run_train(const rahl::TrainConfig& cfg, const IoOptions& io) {
    const rahl::TimeSeries raw = rahl::load_csv(io.input, io.column);
    const rahl::ExperimentData data =
        rahl::make_experiment(raw, cfg.window, cfg.train_fraction);

    fs::create_directories(io.outdir);
    const fs::path outdir(io.outdir);

    rahl::RunManifest manifest = base_manifest("train", cfg, io, data);
    manifest.artifacts = {{"manifest", (outdir / "manifest.json").string()},
                          {"metrics", (outdir / "metrics.json").string()},
                          {"predictions", (outdir / "predictions.csv").string()},
                          {"checkpoint", (outdir / "model.ckpt").string()}};
    rahl::save_manifest(outdir / "manifest.json", manifest);

    rahl::TrainRecord rec = rahl::train(cfg, data.train_windows);
    auto [preds, targets] =
        rahl::predict_series(rec.params, data.scaler, data.test_windows);
    const rahl::EvalReport report = rahl::mape(targets, preds);

    ordered_json metrics = metrics_common("train", cfg, data);
    metrics["loss"] = rahl::loss_to_json(rec.final_loss);
    metrics["mape"] = report.mape;
    metrics["skipped_zero_targets"] = report.skipped_zero_targets;
    metrics["epochs"] = cfg.epochs;
    metrics["epoch_loss"] = rec.epoch_loss;
    if (rec.final_loss.kind == rahl::LossKind::Rahl) {
        metrics["delta_per_epoch"] = rec.delta_per_epoch;
        metrics["final_delta"] = rec.delta_per_epoch.back();
    }
    char fp[24];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(rec.params.fingerprint()));
    metrics["param_fingerprint"] = fp;
    rahl::write_text_file(outdir / "metrics.json", metrics.dump(2) + "\n");

    // Test targets start w past the split point of the cleaned series.
    write_predictions_csv(outdir / "predictions.csv", data.split_index + cfg.window,
                          targets, preds);

    rahl::Checkpoint ckpt{cfg, data.scaler, std::move(rec.params), std::move(rec.adam)};
    ckpt.train.loss = rec.final_loss;
    rahl::save_checkpoint(outdir / "model.ckpt", ckpt);

    std::printf("mape %.4f%% (%zu test windows)\n", report.mape, data.test_windows.size());
    return kExitOk;
}

int finish_sweep(const rahl::SweepReport& report, const std::string& kind,
                 const fs::path& json_path, const fs::path& table_path) {
    rahl::write_text_file(json_path, rahl::sweep_report_json(report, kind));
    const std::string table = rahl::sweep_report_table(report);
    rahl::write_text_file(table_path, table);
    std::fputs(table.c_str(), stdout);
    for (const rahl::SweepRow& row : report.rows) {
        if (row.failed) return kExitPartialSweep;
    }
    return kExitOk;
}

int run_sweep(const rahl::TrainConfig& cfg, const IoOptions& io,
              const std::vector<double>& deltas, std::size_t jobs) {
    const rahl::TimeSeries raw = rahl::load_csv(io.input, io.column);
    const rahl::ExperimentData data =
        rahl::make_experiment(raw, cfg.window, cfg.train_fraction);

    fs::create_directories(io.outdir);
    const fs::path outdir(io.outdir);

    rahl::RunManifest manifest = base_manifest("sweep", cfg, io, data);
    manifest.deltas = deltas;
    manifest.jobs = jobs;
    manifest.artifacts = {{"manifest", (outdir / "manifest.json").string()},
                          {"report", (outdir / "sweep.json").string()},
                          {"table", (outdir / "sweep.txt").string()}};
    rahl::save_manifest(outdir / "manifest.json", manifest);

    const rahl::SweepReport report = rahl::delta_sweep(cfg, data, deltas, jobs);
    return finish_sweep(report, "delta-sweep", outdir / "sweep.json", outdir / "sweep.txt");
}

int run_compare(const rahl::TrainConfig& cfg, const IoOptions& io,
                const std::vector<double>& deltas, std::size_t seeds, std::size_t jobs) {
    const rahl::TimeSeries raw = rahl::load_csv(io.input, io.column);
    const rahl::ExperimentData data =
        rahl::make_experiment(raw, cfg.window, cfg.train_fraction);

    fs::create_directories(io.outdir);
    const fs::path outdir(io.outdir);

    rahl::RunManifest manifest = base_manifest("compare", cfg, io, data);
    manifest.deltas = deltas;
    manifest.seeds = seeds;
    manifest.jobs = jobs;
    manifest.artifacts = {{"manifest", (outdir / "manifest.json").string()},
                          {"report", (outdir / "compare.json").string()},
                          {"table", (outdir / "compare.txt").string()},
                          {"cumulative_ape", (outdir / "cumulative_ape.svg").string()}};
    const char* overlay_names[4] = {"rahl", "huber", "mse", "mae"};
    for (const char* name : overlay_names) {
        manifest.artifacts["overlay_" + std::string(name)] =
            (outdir / ("overlay_" + std::string(name) + ".svg")).string();
    }
    rahl::save_manifest(outdir / "manifest.json", manifest);

    const rahl::SweepReport report = rahl::compare_losses(cfg, data, deltas, seeds, jobs);

    const char* colors[4] = {"#2a9d3f", "#1f6fd0", "#d03b1f", "#9138c2"};
    std::vector<rahl::SvgSeries> cumulative;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const rahl::SweepRow& row = report.rows[i];
        if (row.failed) continue;
        rahl::write_text_file(
            outdir / ("overlay_" + std::string(overlay_names[i]) + ".svg"),
            rahl::line_chart("test forecast, loss " + row.label,
                             {{"actual", "#2a9d3f", row.targets},
                              {"predicted", "#d03b1f", row.preds}}));
        cumulative.push_back({row.label, colors[i], row.eval.cumulative_ape});
    }
    if (!cumulative.empty()) {
        rahl::write_text_file(outdir / "cumulative_ape.svg",
                              rahl::line_chart("cumulative absolute percentage error",
                                               cumulative));
    }
    return finish_sweep(report, "compare", outdir / "compare.json", outdir / "compare.txt");
}

int run_predict(const std::string& ckpt_path, const IoOptions& io,
                const std::string& out_csv) {
    const rahl::Checkpoint ckpt = rahl::load_checkpoint(ckpt_path);
    const rahl::TimeSeries raw = rahl::load_csv(io.input, io.column);
    const rahl::TimeSeries cleaned = rahl::clean(raw);
    const rahl::WindowedDataset windows = rahl::make_windows(
        rahl::scale(ckpt.scaler, cleaned.values), ckpt.train.window);
    auto [preds, targets] = rahl::predict_series(ckpt.params, ckpt.scaler, windows);

    write_predictions_csv(out_csv, ckpt.train.window, targets, preds);
    const rahl::EvalReport report = rahl::mape(targets, preds);
    std::printf("mape %s%% (%zu windows)\n", fmt17(report.mape).c_str(), windows.size());
    return kExitOk;
}

int run_rerun(const std::string& manifest_path, const std::string& outdir) {
    const rahl::RunManifest m = rahl::load_manifest(manifest_path);
    IoOptions io{m.input_path, m.input_column, outdir};
    if (rahl::file_crc32(m.input_path) != m.input_crc32) {
        throw rahl::DataError(rahl::DataErrorKind::ChecksumMismatch,
                              m.input_path + ": content differs from the manifest's crc32");
    }
    if (m.command == "train") return run_train(m.config, io);
    if (m.command == "sweep") return run_sweep(m.config, io, m.deltas, m.jobs);
    if (m.command == "compare") return run_compare(m.config, io, m.deltas, m.seeds, m.jobs);
    throw rahl::InvalidArgument("rerun: unknown command '" + m.command + "' in manifest");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM time-series forecasting with an adaptive Huber loss"};
    app.set_version_flag("--version", rahl::kToolVersion);
    app.require_subcommand(1);

    // synth
    rahl::SynthConfig synth_cfg;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic CQI trace");
    synth->add_option("--length", synth_cfg.length, "number of samples (default 4000)");
    synth->add_option("--seed", synth_cfg.seed, "random seed (default 0)");
    synth->add_option("--base-level", synth_cfg.base_level, "mean CQI level (default 8)");
    synth->add_option("--smoothness", synth_cfg.smoothness, "AR(1) coefficient (default 0.9)");
    synth->add_option("--noise-sd", synth_cfg.noise_sd, "noise standard deviation (default 0.5)");
    synth->add_option("--outlier-rate", synth_cfg.outlier_rate,
                      "impulse probability per step (default 0)");
    synth->add_option("--outlier-magnitude", synth_cfg.outlier_magnitude,
                      "impulse magnitude (default 6)");
    synth->add_option("-o,--output", synth_out, "output CSV path")->required();

    // train
    rahl::TrainConfig train_cfg;
    IoOptions train_io;
    std::string train_loss = "rahl:1.0";
    CLI::App* train = app.add_subcommand("train", "train one model and evaluate it");
    add_io_options(train, train_io);
    add_train_options(train, train_cfg);
    train->add_option("--loss", train_loss,
                      "mse | mae | huber:<delta> | rahl:<alpha> (default rahl:1.0)");
    train->add_flag("--freeze-beta", train_cfg.freeze_beta,
                    "keep the rahl beta out of the optimizer");

    // sweep
    rahl::TrainConfig sweep_cfg;
    IoOptions sweep_io;
    std::vector<double> sweep_deltas = rahl::default_delta_grid();
    std::size_t sweep_jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "train fixed-delta Huber over a grid");
    add_io_options(sweep, sweep_io);
    add_train_options(sweep, sweep_cfg);
    sweep->add_option("--deltas", sweep_deltas,
                      "delta grid (default 0.5 1 1.5 ... 4)")->delimiter(',');
    sweep->add_option("--jobs", sweep_jobs, "parallel rows (default 1)");

    // compare
    rahl::TrainConfig compare_cfg;
    IoOptions compare_io;
    std::vector<double> compare_deltas = rahl::default_delta_grid();
    double compare_alpha = 1.0;
    std::size_t compare_seeds = 1;
    std::size_t compare_jobs = 1;
    CLI::App* compare =
        app.add_subcommand("compare", "compare rahl, best-delta huber, mse, and mae");
    add_io_options(compare, compare_io);
    add_train_options(compare, compare_cfg);
    compare->add_option("--deltas", compare_deltas,
                        "delta grid for the huber baseline")->delimiter(',');
    compare->add_option("--alpha", compare_alpha, "rahl alpha (default 1.0)");
    compare->add_option("--seeds", compare_seeds,
                        "seeds per row; reports the median (default 1)");
    compare->add_option("--jobs", compare_jobs, "parallel rows (default 1)");

    // predict
    IoOptions predict_io;
    std::string predict_ckpt, predict_out;
    CLI::App* predict = app.add_subcommand("predict", "run a saved model over a CSV");
    predict->add_option("--checkpoint", predict_ckpt, "model checkpoint")->required();
    predict->add_option("-i,--input", predict_io.input, "input CSV file")->required();
    predict->add_option("--column", predict_io.column, "CSV column (default CQI)");
    predict->add_option("-o,--output", predict_out, "predictions CSV path")->required();

    // rerun
    std::string rerun_manifest, rerun_outdir;
    CLI::App* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
    rerun->add_option("--manifest", rerun_manifest, "manifest.json of a previous run")
        ->required();
    rerun->add_option("-o,--outdir", rerun_outdir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            rahl::write_csv(rahl::generate(synth_cfg), synth_out);
            return kExitOk;
        }
        if (train->parsed()) {
            train_cfg.loss = parse_loss(train_loss);
            return run_train(train_cfg, train_io);
        }
        if (sweep->parsed()) {
            return run_sweep(sweep_cfg, sweep_io, sweep_deltas, sweep_jobs);
        }
        if (compare->parsed()) {
            compare_cfg.loss = rahl::LossSpec::rahl(compare_alpha);
            return run_compare(compare_cfg, compare_io, compare_deltas, compare_seeds,
                               compare_jobs);
        }
        if (predict->parsed()) {
            return run_predict(predict_ckpt, predict_io, predict_out);
        }
        if (rerun->parsed()) {
            return run_rerun(rerun_manifest, rerun_outdir);
        }
    } catch (const rahl::TrainingDiverged& e) {
        std::fprintf(stderr, "error (training): %s [epoch %zu, batch %zu]\n", e.what(),
                     e.epoch(), e.batch());
        return kExitDiverged;
    } catch (const rahl::DataError& e) {
        std::fprintf(stderr, "error (data): %s\n", e.what());
        return kExitData;
    } catch (const rahl::InvalidArgument& e) {
        std::fprintf(stderr, "error (usage): %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
