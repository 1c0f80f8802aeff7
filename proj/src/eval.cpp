#include "rahl/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "rahl/errors.hpp"

namespace rahl {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Runs one full train/predict/evaluate cycle per seed and fills the row.
// mape is the median across seeds; plotting artifacts come from the first.
void run_row(SweepRow& row, const TrainConfig& cfg, const ExperimentData& data,
             std::size_t seeds) {
    try {
        std::vector<double> mapes;
        mapes.reserve(seeds);
        for (std::size_t s = 0; s < seeds; ++s) {
            TrainConfig run_cfg = cfg;
            run_cfg.seed = cfg.seed + s;
            TrainRecord rec = train(run_cfg, data.train_windows);
            auto [preds, targets] = predict_series(rec.params, data.scaler, data.test_windows);
            EvalReport ev = mape(targets, preds);
            mapes.push_back(ev.mape);
            if (s == 0) {
                row.preds = std::move(preds);
                row.targets = std::move(targets);
                row.eval = std::move(ev);
                row.delta_per_epoch = rec.delta_per_epoch;
            }
        }
        row.seed_mapes = mapes;
        row.mape = median(std::move(mapes));
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
}

void run_rows(std::vector<SweepRow>& rows, const std::vector<TrainConfig>& cfgs,
              const ExperimentData& data, std::size_t seeds, std::size_t jobs) {
    jobs = std::max<std::size_t>(1, std::min(jobs, rows.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_row(rows[i], cfgs[i], data, seeds);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
                run_row(rows[i], cfgs[i], data, seeds);
            }
        });
    }
    for (std::thread& w : workers) w.join();
}

void pick_best(SweepReport& report) {
    const SweepRow* best = nullptr;
    for (const SweepRow& row : report.rows) {
        if (row.failed) continue;
        if (!best) {
            best = &row;
            continue;
        }
        const double bd = best->has_grid_delta ? best->grid_delta
                                               : std::numeric_limits<double>::infinity();
        const double rd = row.has_grid_delta ? row.grid_delta
                                             : std::numeric_limits<double>::infinity();
        if (std::tie(row.mape, rd, row.label) < std::tie(best->mape, bd, best->label)) {
            best = &row;
        }
    }
    report.best_label = best ? best->label : "";
}

}  // namespace

EvalReport mape(std::span<const double> targets, std::span<const double> preds) {
    if (targets.size() != preds.size()) {
        throw InvalidArgument("mape: length mismatch");
    }
    if (targets.empty()) {
        throw InvalidArgument("mape: empty input");
    }
    EvalReport rep;
    double cum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == 0.0) {
            rep.skipped_zero_targets += 1;
            continue;
        }
        const double ape = std::abs((targets[i] - preds[i]) / targets[i]) * 100.0;
        rep.ape_series.push_back(ape);
        cum += ape;
        rep.cumulative_ape.push_back(cum);
    }
    if (rep.ape_series.empty()) {
        throw DataError(DataErrorKind::UndefinedMetric, "mape: every target is zero");
    }
    rep.mape = cum / static_cast<double>(rep.ape_series.size());
    return rep;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> default_delta_grid() {
    return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
}

SweepReport delta_sweep(const TrainConfig& tmpl, const ExperimentData& data,
                        std::span<const double> deltas, std::size_t jobs) {
    if (deltas.empty()) throw InvalidArgument("delta_sweep: empty grid");
    for (double d : deltas) {
        if (!std::isfinite(d) || d <= 0.0) {
            throw InvalidArgument("delta_sweep: deltas must be positive");
        }
    }

    SweepReport report;
    report.rows.resize(deltas.size());
    std::vector<TrainConfig> cfgs(deltas.size(), tmpl);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        cfgs[i].loss = LossSpec::huber(deltas[i]);
        report.rows[i].label = fmt_g(deltas[i]);
        report.rows[i].loss = cfgs[i].loss;
        report.rows[i].grid_delta = deltas[i];
        report.rows[i].has_grid_delta = true;
    }
    run_rows(report.rows, cfgs, data, 1, jobs);
    pick_best(report);
    return report;
}

SweepReport compare_losses(const TrainConfig& tmpl, const ExperimentData& data,
                           std::span<const double> delta_grid, std::size_t seeds,
                           std::size_t jobs) {
    if (seeds < 1) throw InvalidArgument("compare_losses: seeds must be >= 1");
    const SweepReport sweep = delta_sweep(tmpl, data, delta_grid, jobs);

    const LossSpec rahl_spec = tmpl.loss.kind == LossKind::Rahl ? tmpl.loss : LossSpec::rahl(1.0);

    SweepReport report;
    report.rows.resize(4);
    std::vector<TrainConfig> cfgs(4, tmpl);

    cfgs[0].loss = rahl_spec;
    report.rows[0].label = "rahl";

    if (sweep.best_label.empty()) {
        report.rows[1].label = "huber:best";
        report.rows[1].failed = true;
        report.rows[1].error = "every delta-grid run failed";
    } else {
        double best_delta = 0.0;
        for (const SweepRow& row : sweep.rows) {
            if (row.label == sweep.best_label) best_delta = row.grid_delta;
        }
        cfgs[1].loss = LossSpec::huber(best_delta);
        report.rows[1].label = "huber:" + fmt_g(best_delta);
        report.rows[1].grid_delta = best_delta;
        report.rows[1].has_grid_delta = true;
    }

    cfgs[2].loss = LossSpec::mse();
    report.rows[2].label = "mse";
    cfgs[3].loss = LossSpec::mae();
    report.rows[3].label = "mae";

    for (std::size_t i = 0; i < 4; ++i) report.rows[i].loss = cfgs[i].loss;

    // The failed placeholder row must not be re-run.
    std::vector<SweepRow*> live;
    std::vector<TrainConfig> live_cfgs;
    std::vector<SweepRow> scratch;
    scratch.reserve(4);
    for (std::size_t i = 0; i < 4; ++i) {
        if (!report.rows[i].failed) {
            scratch.push_back(report.rows[i]);
            live.push_back(&report.rows[i]);
            live_cfgs.push_back(cfgs[i]);
        }
    }
    run_rows(scratch, live_cfgs, data, seeds, jobs);
    for (std::size_t i = 0; i < scratch.size(); ++i) *live[i] = std::move(scratch[i]);

    pick_best(report);
    return report;
}

std::string sweep_report_json(const SweepReport& report, const std::string& kind) {
    nlohmann::ordered_json doc;
    doc["schema"] = "rahl-sweep-report/1";
    doc["kind"] = kind;
    doc["best"] = report.best_label;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const SweepRow& row : report.rows) {
        nlohmann::ordered_json r;
        r["label"] = row.label;
        r["loss"] = loss_kind_name(row.loss.kind);
        if (row.has_grid_delta) r["delta"] = row.grid_delta;
        if (row.loss.kind == LossKind::Rahl) r["alpha"] = row.loss.alpha;
        r["failed"] = row.failed;
        if (row.failed) {
            r["mape"] = nullptr;
            r["error"] = row.error;
        } else {
            r["mape"] = row.mape;
            if (row.seed_mapes.size() > 1) r["seed_mapes"] = row.seed_mapes;
            if (!row.delta_per_epoch.empty()) r["final_delta"] = row.delta_per_epoch.back();
            r["skipped_zero_targets"] = row.eval.skipped_zero_targets;
        }
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

std::string sweep_report_table(const SweepReport& report) {
    std::size_t width = 5;
    for (const SweepRow& row : report.rows) width = std::max(width, row.label.size());

    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-*s  %10s  %s\n", static_cast<int>(width), "label",
                  "MAPE%", "status");
    out += line;
    for (const SweepRow& row : report.rows) {
        if (row.failed) {
            std::snprintf(line, sizeof line, "%-*s  %10s  failed: %s\n",
                          static_cast<int>(width), row.label.c_str(), "-",
                          row.error.c_str());
        } else {
            std::snprintf(line, sizeof line, "%-*s  %10.4f  ok\n", static_cast<int>(width),
                          row.label.c_str(), row.mape);
        }
        out += line;
    }
    out += "best: " + (report.best_label.empty() ? "-" : report.best_label) + "\n";
    return out;
}

}  // namespace rahl
