#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rahl {

/// A univariate series in chronological order. `values` may contain NaN
/// placeholders until clean() has run.
struct TimeSeries {
    std::vector<double> values;
    std::string name;    // source column name
    std::string origin;  // file path or "synthetic"
};

/// Parses one named column of a headered CSV as doubles. Empty and
/// unparseable cells become NaN; row order is preserved. Quoted fields and
/// CRLF line endings are handled.
TimeSeries load_csv(const std::filesystem::path& path, const std::string& column);

/// Forward-fills NaN entries from the most recent valid value and drops any
/// leading NaNs. Throws if every entry is NaN.
TimeSeries clean(const TimeSeries& series);

/// Min-max normalization fitted on the training split only.
struct Scaler {
    double min = 0.0;
    double max = 1.0;

    double scale1(double x) const { return (x - min) / (max - min); }
    double unscale1(double z) const { return min + z * (max - min); }
};

/// Throws DataError(DegenerateScale) when the values are constant.
Scaler fit_scaler(std::span<const double> values);

std::vector<double> scale(const Scaler& s, std::span<const double> values);
std::vector<double> unscale(const Scaler& s, std::span<const double> values);

/// Stride-1 sliding windows over a series: window i is series[i, i+w) and its
/// target is series[i+w]. The series is stored once; windows are views.
struct WindowedDataset {
    std::size_t w = 0;
    std::vector<double> series;

    std::size_t size() const { return series.size() - w; }
    std::span<const double> input(std::size_t i) const { return {series.data() + i, w}; }
    double target(std::size_t i) const { return series[i + w]; }
    std::vector<double> targets() const {
        return {series.begin() + static_cast<std::ptrdiff_t>(w), series.end()};
    }
};

WindowedDataset make_windows(std::span<const double> series, std::size_t w);

/// First floor(fraction * len) values vs. the rest, order preserved. Each
/// side must end up with at least `min_len` values.
std::pair<TimeSeries, TimeSeries> chrono_split(const TimeSeries& series,
                                               double train_fraction,
                                               std::size_t min_len = 1);

/// The full preprocessing pipeline for one experiment: clean, split
/// chronologically, fit the scaler on the training side only, scale both
/// sides, and window both sides with the same w.
struct ExperimentData {
    TimeSeries cleaned;
    Scaler scaler;
    std::size_t split_index = 0;  // cleaned[0, split) is the training side
    WindowedDataset train_windows;
    WindowedDataset test_windows;
};

ExperimentData make_experiment(const TimeSeries& raw, std::size_t w,
                               double train_fraction);

}  // namespace rahl
