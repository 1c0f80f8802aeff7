#pragma once

#include <string>
#include <vector>

#include "rahl/data.hpp"
#include "rahl/train.hpp"

namespace rahl {

struct EvalReport {
    double mape = 0.0;                    // percent
    std::vector<double> ape_series;       // per-step APE, zero targets excluded
    std::vector<double> cumulative_ape;   // running sum of ape_series
    std::size_t skipped_zero_targets = 0;
};

/// Mean absolute percentage error over matching vectors. Entries whose
/// target is exactly 0 are excluded from the mean and counted.
EvalReport mape(std::span<const double> targets, std::span<const double> preds);

/// One trained model and its test evaluation.
struct SweepRow {
    std::string label;
    LossSpec loss;
    double grid_delta = 0.0;       // set for fixed-Huber grid rows
    bool has_grid_delta = false;

    double mape = 0.0;             // median over seeds when several ran
    std::vector<double> seed_mapes;

    bool failed = false;
    std::string error;

    // First-seed artifacts, kept for plotting and trajectory inspection.
    std::vector<double> preds;
    std::vector<double> targets;
    EvalReport eval;
    std::vector<double> delta_per_epoch;  // Rahl rows only
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::string best_label;  // minimum mape; ties broken by smallest delta,
                             // then lexicographic label; empty if all failed
};

/// The default grid from the evaluation protocol: 0.5, 1.0, ..., 4.0.
std::vector<double> default_delta_grid();

/// Trains one fixed-delta Huber model per grid value on identical data and
/// seed, evaluating test MAPE. A diverging row is flagged failed and the
/// sweep continues. Rows may run on up to `jobs` threads.
SweepReport delta_sweep(const TrainConfig& tmpl, const ExperimentData& data,
                        std::span<const double> deltas, std::size_t jobs = 1);

/// The four-way comparison: Rahl, fixed Huber at the grid's best delta, MSE,
/// and MAE, all on identical data. The best delta comes from a single-seed
/// delta_sweep with the template's seed; when seeds > 1 every comparison row
/// reports the median MAPE over seeds (template seed, +1, ...). The Rahl row
/// uses the template's loss spec when it is Rahl, else alpha = 1.
SweepReport compare_losses(const TrainConfig& tmpl, const ExperimentData& data,
                           std::span<const double> delta_grid, std::size_t seeds = 1,
                           std::size_t jobs = 1);

double median(std::vector<double> values);

/// Versioned JSON document ("rahl-sweep-report/1").
std::string sweep_report_json(const SweepReport& report, const std::string& kind);

/// Aligned human-readable table.
std::string sweep_report_table(const SweepReport& report);

}  // namespace rahl
