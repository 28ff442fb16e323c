#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace rtq {

/// Minimal self-contained SVG line chart: one polyline per series, labeled
/// axes with nice ticks, and a legend. Output is deterministic.
class SvgLineChart {
public:
    SvgLineChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)),
          y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<std::pair<double, double>> pts) {
        series_.push_back({std::move(name), std::move(pts)});
    }

    void render(std::ostream& out) const {
        const double w = 720, h = 460;
        const double left = 72, right = w - 180, top = 48, bottom = h - 58;

        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const Series& s : series_)
            for (auto& [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (xmin > xmax) { xmin = 0; xmax = 1; }
        if (ymin > ymax) { ymin = 0; ymax = 1; }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + (ymin == 0 ? 1.0 : std::abs(ymin) * 0.1);
        const double ypad = 0.05 * (ymax - ymin);
        ymin = std::max(0.0, ymin - ypad);
        ymax += ypad;

        auto px = [&](double x) {
            return left + (x - xmin) / (xmax - xmin) * (right - left);
        };
        auto py = [&](double y) {
            return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
        };

        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
            << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
            << "\">\n";
        out << "<rect width=\"" << w << "\" height=\"" << h
            << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << (left + right) / 2 << "\" y=\"24\" font-size=\"15\""
            << " text-anchor=\"middle\" font-family=\"sans-serif\">"
            << escape(title_) << "</text>\n";

        // Gridlines and ticks.
        for (double t : ticks(xmin, xmax)) {
            const double x = px(t);
            out << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x
                << "\" y2=\"" << bottom << "\" stroke=\"#dddddd\"/>\n";
            out << "<text x=\"" << x << "\" y=\"" << bottom + 18
                << "\" font-size=\"11\" text-anchor=\"middle\""
                << " font-family=\"sans-serif\">" << num(t) << "</text>\n";
        }
        for (double t : ticks(ymin, ymax)) {
            const double y = py(t);
            out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << right
                << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
            out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
                << "\" font-size=\"11\" text-anchor=\"end\""
                << " font-family=\"sans-serif\">" << num(t) << "</text>\n";
        }
        out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
            << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
            << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << h - 14
            << "\" font-size=\"13\" text-anchor=\"middle\""
            << " font-family=\"sans-serif\">" << escape(x_label_) << "</text>\n";
        out << "<text x=\"20\" y=\"" << (top + bottom) / 2
            << "\" font-size=\"13\" text-anchor=\"middle\""
            << " font-family=\"sans-serif\" transform=\"rotate(-90 20 "
            << (top + bottom) / 2 << ")\">" << escape(y_label_) << "</text>\n";

        for (std::size_t i = 0; i < series_.size(); ++i) {
            const Series& s = series_[i];
            out << "<polyline fill=\"none\" stroke=\"" << color(i)
                << "\" stroke-width=\"1.8\" points=\"";
            for (auto& [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                out << num(px(x)) << ',' << num(py(y)) << ' ';
            }
            out << "\"/>\n";
            const double ly = top + 16 + 18 * static_cast<double>(i);
            out << "<line x1=\"" << right + 10 << "\" y1=\"" << ly << "\" x2=\""
                << right + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color(i)
                << "\" stroke-width=\"1.8\"/>\n";
            out << "<text x=\"" << right + 40 << "\" y=\"" << ly + 4
                << "\" font-size=\"11\" font-family=\"sans-serif\">"
                << escape(s.name) << "</text>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    static std::vector<double> ticks(double lo, double hi) {
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
            if (mag * m >= raw) { step = mag * m; break; }
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span;
             t += step)
            out.push_back(t);
        return out;
    }

    static const char* color(std::size_t i) {
        static const char* palette[] = {"#1f6fb4", "#d0421e", "#2d8a44",
                                        "#8047a8", "#b8860b", "#14808c",
                                        "#a03050", "#555555"};
        return palette[i % (sizeof palette / sizeof *palette)];
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out += c;
        }
        return out;
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace rtq
