#pragma once

#include <string>
#include <vector>

namespace arithdyn {

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false;
};

// Fixed-layout 860x480 line chart; NaN points break the polyline. Output is
// byte-stable for golden-file comparisons.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool log_x);

// Unit-bin histogram with an overlaid fitted curve.
std::string histogram_svg(const std::string& title, long long first_bin,
                          const std::vector<double>& counts, const std::vector<double>& fit,
                          const std::string& note);

} // namespace arithdyn
