#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtga/core.hpp"

namespace mtga::report {

/// Shortest lossless decimal form of a double; stable across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        // try progressively shorter forms that still round-trip
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Minimal SVG line chart; y axis switches to log scale when every value is
/// positive and the data spans more than three decades.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const std::vector<Series>& series) {
    const double width = 860, height = 540;
    const double ml = 90, mr = 30, mt = 50, mb = 70;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true, all_positive = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
            all_positive = all_positive && y > 0.0;
        }
    if (x_max == x_min) x_max = x_min + 1;
    const bool log_y = all_positive && y_min > 0.0 && y_max / y_min > 1e3;
    double ty_min = log_y ? std::log10(y_min) : y_min;
    double ty_max = log_y ? std::log10(y_max) : y_max;
    if (ty_max == ty_min) ty_max = ty_min + 1;
    const double pad = 0.05 * (ty_max - ty_min);
    ty_min -= pad;
    ty_max += pad;

    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
        const double t = log_y ? std::log10(y) : y;
        return mt + plot_h - (t - ty_min) / (ty_max - ty_min) * plot_h;
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
           "font-family=\"sans-serif\">"
        << title << "</text>\n";

    // axes and ticks
    svg << "<g stroke=\"#333\" stroke-width=\"1\">"
        << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
        << "\" y2=\"" << mt + plot_h << "\"/>"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + plot_h << "\"/></g>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy_t = ty_min + pad + (ty_max - ty_min - 2 * pad) * i / 5.0;
        const double fy = log_y ? std::pow(10.0, fy_t) : fy_t;
        char xb[32], yb[32];
        std::snprintf(xb, sizeof(xb), "%.4g", fx);
        std::snprintf(yb, sizeof(yb), "%.3g", fy);
        svg << "<text x=\"" << px(fx) << "\" y=\"" << mt + plot_h + 22
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << xb
            << "</text>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << yb
            << "</text>\n"
            << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + plot_h << "\" x2=\"" << px(fx)
            << "\" y2=\"" << mt + plot_h + 5 << "\" stroke=\"#333\"/>\n"
            << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
            << py(fy) << "\" stroke=\"#333\"/>\n";
    }
    svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 18
        << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" << x_label
        << "</text>\n"
        << "<text x=\"22\" y=\"" << mt + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 22 "
        << mt + plot_h / 2 << ")\">" << y_label << (log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % (sizeof(colors) / sizeof(colors[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : series[s].points) {
            if (!std::isfinite(x) || !std::isfinite(y) || (log_y && y <= 0.0)) continue;
            svg << px(x) << "," << py(y) << " ";
        }
        svg << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(s);
        svg << "<line x1=\"" << ml + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
            << ml + plot_w - 120 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + plot_w - 112 << "\" y=\"" << ly + 4
            << "\" font-size=\"13\" font-family=\"sans-serif\">" << series[s].name << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::ConfigError("cannot write '" + path + "'");
    out << svg.str();
}

}  // namespace mtga::report
