#pragma once

// Minimal SVG output for line plots and heatmaps. Plots are derived
// artifacts; CSV stays the canonical output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "halo/value_space.hpp"

namespace halo::svg {

struct Series {
    std::string label;
    std::span<const double> y;
    std::string color = "#08306B";
    bool dashed = false;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

inline void line_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                      std::span<const double> x, const std::vector<Series>& series) {
    constexpr double W = 720, H = 420, L = 70, R = 20, T = 40, B = 50;
    double xmin = x.empty() ? 0 : x.front(), xmax = x.empty() ? 1 : x.back();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(ymax > ymin)) {
        ymin = std::isfinite(ymin) ? ymin - 1 : -1;
        ymax = ymin + 2;
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << detail::escape(title) << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    if (ymin < 0 && ymax > 0) {
        os << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
           << "\" stroke=\"grey\" stroke-dasharray=\"2,3\"/>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << detail::num(xv) << "</text>\n"
           << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << detail::num(yv) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << detail::escape(x_label) << "</text>\n";

    double legend_y = T + 12;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
           << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        const std::size_t n = std::min(x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.y[i])) continue;
            os << detail::num(px(x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
        }
        os << "\"/>\n"
           << "<text x=\"" << W - R - 4 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
           << s.color << "\">" << detail::escape(s.label) << "</text>\n";
        legend_y += 14;
    }
    os << "</svg>\n";
}

// Grayscale heatmap of normalized apex values, 0 black to 1 light. Unsafe
// cells get a red outline.
inline void heatmap(std::ostream& os, const ValueSpaceMap& map) {
    constexpr double cell = 24, L = 80, T = 40, B = 60;
    const double W = L + cell * static_cast<double>(map.nx) + 20;
    const double H = T + cell * static_cast<double>(map.ny) + B;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">TU apex: "
       << map.param_x << " x " << map.param_y << "</text>\n";
    for (const auto& c : map.cells) {
        const int g = static_cast<int>(std::lround(20 + 215 * c.tu_apex_norm));
        const double x = L + cell * static_cast<double>(c.ix);
        const double y = T + cell * static_cast<double>(map.ny - 1 - c.iy);
        const bool unsafe = !c.shape || *c.shape != Shape::hormetic;
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
           << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\""
           << (unsafe ? " stroke=\"#c00\" stroke-width=\"1\"" : "") << "/>\n";
    }
    const double base = T + cell * static_cast<double>(map.ny);
    os << "<text x=\"" << L << "\" y=\"" << base + 16 << "\" font-size=\"11\">" << detail::num(map.cells.front().x_value)
       << "</text>\n"
       << "<text x=\"" << W - 20 << "\" y=\"" << base + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
       << detail::num(map.cells.back().x_value) << "</text>\n"
       << "<text x=\"" << (L + W) / 2 << "\" y=\"" << base + 36 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << map.param_x << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << base << "\" text-anchor=\"end\" font-size=\"11\">"
       << detail::num(map.cells.front().y_value) << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
       << detail::num(map.cells.back().y_value) << "</text>\n"
       << "<text x=\"14\" y=\"" << (T + base) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
       << (T + base) / 2 << ")\">" << map.param_y << "</text>\n"
       << "</svg>\n";
}

}  // namespace halo::svg
