#ifndef CENTROPY_REPORT_HPP
#define CENTROPY_REPORT_HPP

#include <fstream>
#include <limits>
#include <json.hpp>
#include <string>
#include <vector>

#include "centropy/types.hpp"

namespace centropy {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::json;

inline Json report_envelope(const std::string& experiment_id, Json config_echo) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["experiment"] = experiment_id;
    j["config"] = std::move(config_echo);
    return j;
}

inline void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

/// Column-oriented table for CSV emission; every plotted series must also land
/// in one of these (the CSV, not the SVG, is the artifact of record).
struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;

    void add_column(std::string name, std::vector<double> values) {
        headers.push_back(std::move(name));
        columns.push_back(std::move(values));
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ParseError(path + ": cannot open for writing");
        for (std::size_t j = 0; j < headers.size(); ++j) {
            if (j) out << ',';
            out << headers[j];
        }
        out << '\n';
        std::size_t rows = 0;
        for (const auto& c : columns) rows = std::max(rows, c.size());
        out.precision(12);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < columns.size(); ++j) {
                if (j) out << ',';
                if (i < columns[j].size()) out << columns[j][i];
            }
            out << '\n';
        }
    }
};

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

/// Minimal static line plot: polylines on a framed viewport with min/max axis
/// labels and a legend. Every series here must also exist as CSV columns.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::vector<PlotSeries>& series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out.precision(6);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title << "</text>\n"
        << "<rect x='" << L << "' y='" << T << "' width='" << W - L - R << "' height='" << H - T - B
        << "' fill='none' stroke='#333'/>\n";
    out << "<text x='" << L << "' y='" << H - B + 18 << "' font-size='11'>" << xmin << "</text>\n"
        << "<text x='" << W - R << "' y='" << H - B + 18 << "' text-anchor='end' font-size='11'>" << xmax
        << "</text>\n"
        << "<text x='" << L - 6 << "' y='" << H - B << "' text-anchor='end' font-size='11'>" << ymin
        << "</text>\n"
        << "<text x='" << L - 6 << "' y='" << T + 10 << "' text-anchor='end' font-size='11'>" << ymax
        << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % 8];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            out << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        out << "'/>\n";
        out << "<text x='" << L + 8 << "' y='" << T + 16 + 14 * static_cast<double>(s)
            << "' font-size='11' fill='" << color << "'>" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace centropy

#endif
