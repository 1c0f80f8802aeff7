#include "rahl/data.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rahl/errors.hpp"

namespace rahl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// One CSV record, honoring double-quoted fields with "" escapes. Returns
// false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    int c;
    while ((c = in.get()) != EOF) {
        saw_any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field.push_back(static_cast<char>(c));
        }
    }
    if (!saw_any) return false;
    fields.push_back(std::move(field));
    return true;
}

double parse_cell(const std::string& cell) {
    if (cell.empty()) return kNan;
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) return kNan;
        return v;
    } catch (const std::exception&) {
        return kNan;
    }
}

}  // namespace

TimeSeries load_csv(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::FileNotFound, "cannot open " + path.string());
    }

    std::vector<std::string> header;
    if (!read_record(in, header)) {
        throw DataError(DataErrorKind::BadFormat, path.string() + ": missing header row");
    }
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) {
            col = i;
            break;
        }
    }
    if (col == header.size()) {
        std::string available;
        for (std::size_t i = 0; i < header.size(); ++i) {
            available += (i ? ", " : "") + header[i];
        }
        throw DataError(DataErrorKind::ColumnNotFound,
                        path.string() + ": no column '" + column +
                            "' (available: " + available + ")");
    }

    TimeSeries series;
    series.name = column;
    series.origin = path.string();
    std::vector<std::string> row;
    while (read_record(in, row)) {
        if (row.size() == 1 && row[0].empty()) continue;  // blank line
        series.values.push_back(col < row.size() ? parse_cell(row[col]) : kNan);
    }
    if (series.values.empty()) {
        throw DataError(DataErrorKind::NoRows, path.string() + ": no data rows");
    }
    return series;
}

TimeSeries clean(const TimeSeries& series) {
    if (series.values.empty()) {
        throw DataError(DataErrorKind::NoRows, "clean: empty series");
    }
    TimeSeries out;
    out.name = series.name;
    out.origin = series.origin;
    out.values.reserve(series.values.size());
    double last = kNan;
    for (double v : series.values) {
        if (std::isnan(v)) {
            if (std::isnan(last)) continue;  // leading NaN, nothing to fill from
            out.values.push_back(last);
        } else {
            last = v;
            out.values.push_back(v);
        }
    }
    if (out.values.empty()) {
        throw DataError(DataErrorKind::AllNan, "clean: series is entirely NaN");
    }
    return out;
}

Scaler fit_scaler(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidArgument("fit_scaler: empty input");
    }
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (std::isnan(v)) {
            throw InvalidArgument("fit_scaler: NaN input (clean the series first)");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
        throw DataError(DataErrorKind::DegenerateScale,
                        "fit_scaler: constant series (min == max == " + std::to_string(lo) + ")");
    }
    return Scaler{lo, hi};
}

std::vector<double> scale(const Scaler& s, std::span<const double> values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = s.scale1(values[i]);
    return out;
}

std::vector<double> unscale(const Scaler& s, std::span<const double> values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = s.unscale1(values[i]);
    return out;
}

WindowedDataset make_windows(std::span<const double> series, std::size_t w) {
    if (w == 0) {
        throw InvalidArgument("make_windows: window size must be >= 1");
    }
    if (series.size() < w + 1) {
        throw InvalidArgument("make_windows: series of length " +
                              std::to_string(series.size()) + " is too short for w=" +
                              std::to_string(w) + " (need w+1)");
    }
    WindowedDataset ds;
    ds.w = w;
    ds.series.assign(series.begin(), series.end());
    return ds;
}

std::pair<TimeSeries, TimeSeries> chrono_split(const TimeSeries& series,
                                               double train_fraction,
                                               std::size_t min_len) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("chrono_split: train fraction must be in (0, 1)");
    }
    const std::size_t n = series.values.size();
    const std::size_t cut =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (cut < min_len || n - cut < min_len) {
        throw DataError(DataErrorKind::SplitTooSmall,
                        "chrono_split: " + std::to_string(n) + " values split at " +
                            std::to_string(cut) + " leaves a side shorter than " +
                            std::to_string(min_len));
    }
    TimeSeries train{.values = {series.values.begin(),
                                series.values.begin() + static_cast<std::ptrdiff_t>(cut)},
                     .name = series.name,
                     .origin = series.origin};
    TimeSeries test{.values = {series.values.begin() + static_cast<std::ptrdiff_t>(cut),
                               series.values.end()},
                    .name = series.name,
                    .origin = series.origin};
    return {std::move(train), std::move(test)};
}

ExperimentData make_experiment(const TimeSeries& raw, std::size_t w,
                               double train_fraction) {
    ExperimentData ex;
    ex.cleaned = clean(raw);
    auto [train_side, test_side] = chrono_split(ex.cleaned, train_fraction, w + 1);
    ex.split_index = train_side.values.size();
    ex.scaler = fit_scaler(train_side.values);
    ex.train_windows = make_windows(scale(ex.scaler, train_side.values), w);
    ex.test_windows = make_windows(scale(ex.scaler, test_side.values), w);
    return ex;
}

}  // namespace rahl
