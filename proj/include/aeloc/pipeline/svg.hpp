#pragma once

// Minimal static SVG scatter plots for the calibration and evaluation reports.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace aeloc::pipeline {

enum class Marker { Plus, Circle, None };

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    Marker marker = Marker::Circle;
    bool connect = false; ///< draw a polyline through the points
    std::string color = "#1f77b4";
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
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

} // namespace detail

inline std::string render_svg(const Plot& plot) {
    constexpr double width = 640, height = 480, left = 80, right = 20, top = 40, bottom = 60;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x), x1 = std::max(x1, x);
            y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
    using detail::num;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           detail::escape(plot.title) + "</text>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
        out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
               detail::tick(xv) + "</text>\n";
        out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" +
               detail::tick(yv) + "</text>\n";
    }
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 16) + "\" text-anchor=\"middle\">" +
           detail::escape(plot.x_label) + "</text>\n";
    out += "<text transform=\"translate(18," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           detail::escape(plot.y_label) + "</text>\n";

    double legend_y = top + 16;
    for (const auto& s : plot.series) {
        if (s.connect && s.points.size() > 1) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"";
            for (const auto& [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y)) out += num(sx(x)) + "," + num(sy(y)) + " ";
            out += "\"/>\n";
        }
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            const double cx = sx(x), cy = sy(y);
            if (s.marker == Marker::Circle)
                out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"4\" fill=\"none\" stroke=\"" +
                       s.color + "\"/>\n";
            else if (s.marker == Marker::Plus)
                out += "<path d=\"M" + num(cx - 5) + " " + num(cy) + "h10M" + num(cx) + " " + num(cy - 5) +
                       "v10\" stroke=\"" + s.color + "\"/>\n";
        }
        out += "<text x=\"" + num(left + 10) + "\" y=\"" + num(legend_y) + "\" fill=\"" + s.color + "\">" +
               detail::escape(s.label) + "</text>\n";
        legend_y += 16;
    }
    out += "</svg>\n";
    return out;
}

} // namespace aeloc::pipeline
