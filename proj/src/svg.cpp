#include "mssd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mssd/errors.hpp"

namespace mssd {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

} // namespace

void write_line_svg(const std::string& path, const std::vector<SvgSeries>& series,
                    const SvgOptions& options) {
    if (series.empty()) throw ContractError("svg: no series to plot");
    const double left = 70, right = 30, top = 40, bottom = 55;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;

    auto tx = [&](double v) { return options.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return options.log_y ? std::log10(v) : v; };

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ContractError("svg: x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            min_x = std::min(min_x, tx(s.x[i]));
            max_x = std::max(max_x, tx(s.x[i]));
            min_y = std::min(min_y, ty(s.y[i]));
            max_y = std::max(max_y, ty(s.y[i]));
        }
    }
    if (!(max_x > min_x)) max_x = min_x + 1;
    if (!(max_y > min_y)) {
        max_y = min_y + (min_y == 0 ? 1 : std::abs(min_y) * 0.1 + 1e-12);
    }

    auto px = [&](double v) { return left + (tx(v) - min_x) / (max_x - min_x) * plot_w; };
    auto py = [&](double v) { return top + (1.0 - (ty(v) - min_y) / (max_y - min_y)) * plot_h; };

    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << options.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"16\">" << options.title << "</text>\n";

    // axes
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = min_x + (max_x - min_x) * i / ticks;
        const double fy = min_y + (max_y - min_y) * i / ticks;
        const double x_pos = left + plot_w * i / ticks;
        const double y_pos = top + plot_h * (1.0 - static_cast<double>(i) / ticks);
        const double x_value = options.log_x ? std::pow(10.0, fx) : fx;
        const double y_value = options.log_y ? std::pow(10.0, fy) : fy;
        out << "<line x1=\"" << x_pos << "\" y1=\"" << top + plot_h << "\" x2=\"" << x_pos
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x_pos << "\" y=\"" << top + plot_h + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(x_value) << "</text>\n";
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << y_pos << "\" x2=\"" << left
            << "\" y2=\"" << y_pos << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y_pos + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y_value) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << options.height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << options.x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">" << options.y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        out << "\"/>\n";
        // legend
        const double ly = top + 16 + 18 * static_cast<double>(si);
        out << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w - 125 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w - 118 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw DataError("failed writing " + path);
}

} // namespace mssd
