#include "arithdyn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace arithdyn {

namespace {

constexpr double kWidth = 860, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
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

struct Scale {
    double lo = 0, hi = 1, px0 = 0, px1 = 1;
    bool log = false;
    double operator()(double v) const {
        double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                       : (v - lo) / (hi - lo);
        return px0 + t * (px1 - px0);
    }
};

std::vector<double> linear_ticks(double lo, double hi) {
    double span = hi - lo;
    if (span <= 0) return {lo};
    double step = std::pow(10.0, std::floor(std::log10(span / 4)));
    if (span / step > 8) step *= 2;
    if (span / step > 8) step *= 2.5;
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
    return t;
}

} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool log_x) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (std::isnan(s.x[i]) || std::isnan(s.y[i])) continue;
            if (log_x && s.x[i] <= 0) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin <= xmax)) { xmin = log_x ? 1 : 0; xmax = log_x ? 10 : 1; }
    if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
    if (xmin == xmax) { xmax = xmin + 1; }
    if (ymin == ymax) { ymax = ymin + 1; ymin = ymin - (ymin != 0 ? std::abs(ymin) * 0.1 : 0.5); }
    double pad = (ymax - ymin) * 0.05;
    ymin -= pad;
    ymax += pad;

    Scale sx{xmin, xmax, kLeft, kWidth - kRight, log_x};
    Scale sy{ymin, ymax, kHeight - kBottom, kTop, false};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << escape(title) << "</text>\n";

    // Axes.
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
       << kHeight - kBottom << "\" stroke=\"black\"/>\n";

    if (log_x) {
        for (double e = std::floor(std::log10(xmin)); e <= std::ceil(std::log10(xmax)); ++e) {
            double v = std::pow(10.0, e);
            if (v < xmin || v > xmax) continue;
            double px = sx(v);
            os << "<line x1=\"" << fmt(px) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << fmt(px) << "\" y2=\""
               << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(px) << "\" y=\"" << kHeight - kBottom + 20
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v) << "</text>\n";
        }
    } else {
        for (double v : linear_ticks(xmin, xmax)) {
            double px = sx(v);
            os << "<line x1=\"" << fmt(px) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << fmt(px) << "\" y2=\""
               << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(px) << "\" y=\"" << kHeight - kBottom + 20
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v) << "</text>\n";
        }
    }
    for (double v : linear_ticks(ymin, ymax)) {
        double py = sy(v);
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(py)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v) << "</text>\n";
    }
    os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
       << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 8];
        std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
        std::ostringstream pts;
        bool open = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            bool ok = !std::isnan(s.x[i]) && !std::isnan(s.y[i]) && (!log_x || s.x[i] > 0);
            if (!ok) {
                if (open) {
                    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"" << dash
                       << " points=\"" << pts.str() << "\"/>\n";
                    pts.str("");
                    open = false;
                }
                continue;
            }
            pts << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << " ";
            open = true;
        }
        if (open)
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"" << dash << " points=\""
               << pts.str() << "\"/>\n";
        double ly = kTop + 16 * double(si);
        os << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << fmt(ly) << "\" x2=\"" << kWidth - kRight + 34
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"" << dash << "/>\n";
        os << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << fmt(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string histogram_svg(const std::string& title, long long first_bin,
                          const std::vector<double>& counts, const std::vector<double>& fit,
                          const std::string& note) {
    if (counts.empty()) throw std::runtime_error("histogram_svg: no bins");
    double ymax = 1;
    for (double v : counts) ymax = std::max(ymax, v);
    for (double v : fit) ymax = std::max(ymax, v);
    double xmin = double(first_bin) - 0.5, xmax = double(first_bin) + double(counts.size()) - 0.5;
    Scale sx{xmin, xmax, kLeft, kWidth - kRight, false};
    Scale sy{0, ymax * 1.05, kHeight - kBottom, kTop, false};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << escape(title) << "</text>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
       << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
       << "\" stroke=\"black\"/>\n";
    for (size_t i = 0; i < counts.size(); ++i) {
        double x0 = sx(double(first_bin) + double(i) - 0.5);
        double x1 = sx(double(first_bin) + double(i) + 0.5);
        double y = sy(counts[i]);
        os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
           << fmt(sy(0) - y) << "\" fill=\"#9ecae1\" stroke=\"none\"/>\n";
    }
    if (!fit.empty()) {
        std::ostringstream pts;
        for (size_t i = 0; i < fit.size(); ++i)
            pts << fmt(sx(double(first_bin) + double(i))) << "," << fmt(sy(fit[i])) << " ";
        os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.8\" points=\"" << pts.str() << "\"/>\n";
    }
    for (double v : linear_ticks(xmin, xmax)) {
        double px = sx(v);
        os << "<text x=\"" << fmt(px) << "\" y=\"" << kHeight - kBottom + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v) << "</text>\n";
    }
    os << "<text x=\"" << kWidth - kRight + 10 << "\" y=\"" << kTop + 10
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(note) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace arithdyn
