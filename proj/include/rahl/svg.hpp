#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rahl {

struct SvgSeries {
    std::string label;
    std::string color;  // any CSS color
    std::vector<double> ys;
};

/// Standalone SVG line chart: all series share the x axis (sample index) and
/// a common y range computed from the data. Emits one polyline per series
/// plus axes, tick labels, and a legend.
std::string line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                       int width = 960, int height = 480);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rahl
