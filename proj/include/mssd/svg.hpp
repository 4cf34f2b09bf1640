#ifndef MSSD_SVG_HPP
#define MSSD_SVG_HPP

#include <string>
#include <vector>

namespace mssd {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 860;
    int height = 520;
};

/// Writes a simple multi-series line chart.
void write_line_svg(const std::string& path, const std::vector<SvgSeries>& series,
                    const SvgOptions& options);

} // namespace mssd

#endif // MSSD_SVG_HPP
