#include "rahl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rahl/errors.hpp"

namespace rahl {

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                       int width, int height) {
    if (series.empty()) throw InvalidArgument("line_chart: no series");
    std::size_t n = 0;
    double y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const SvgSeries& s : series) {
        if (s.ys.empty()) throw InvalidArgument("line_chart: empty series " + s.label);
        n = std::max(n, s.ys.size());
        for (double y : s.ys) {
            if (!std::isfinite(y)) throw InvalidArgument("line_chart: non-finite value");
            y_min = first ? y : std::min(y_min, y);
            y_max = first ? y : std::max(y_max, y);
            first = false;
        }
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }

    const double ml = 64, mr = 16, mt = 36, mb = 40;  // margins
    const double pw = width - ml - mr;                // plot area
    const double ph = height - mt - mb;
    const auto px = [&](std::size_t i, std::size_t len) {
        return len == 1 ? ml + pw / 2
                        : ml + pw * static_cast<double>(i) / static_cast<double>(len - 1);
    };
    const auto py = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";

    // Axes.
    out << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double y = y_min + (y_max - y_min) * k / 4.0;
        out << "  <text x=\"" << ml - 6 << "\" y=\"" << fmt2(py(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(y) << "</text>\n";
    }
    out << "  <text x=\"" << ml << "\" y=\"" << height - 10
        << "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
    out << "  <text x=\"" << ml + pw << "\" y=\"" << height - 10
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << (n - 1) << "</text>\n";

    for (const SvgSeries& s : series) {
        out << "  <polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.ys.size(); ++i) {
            if (i) out << ' ';
            out << fmt2(px(i, s.ys.size())) << ',' << fmt2(py(s.ys[i]));
        }
        out << "\"/>\n";
    }

    double lx = ml + 10;
    for (const SvgSeries& s : series) {
        out << "  <line x1=\"" << fmt2(lx) << "\" y1=\"" << mt + 10 << "\" x2=\""
            << fmt2(lx + 18) << "\" y2=\"" << mt + 10 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        out << "  <text x=\"" << fmt2(lx + 22) << "\" y=\"" << mt + 14
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label)
            << "</text>\n";
        lx += 30 + 7.0 * static_cast<double>(s.label.size());
    }

    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::FileNotFound, "cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw DataError(DataErrorKind::BadFormat, "write failed: " + path.string());
    }
}

}  // namespace rahl
