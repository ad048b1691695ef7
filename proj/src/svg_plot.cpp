#include "dispectral/svg_plot.hpp"

#include "dispectral/csv.hpp"
#include "dispectral/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace dispectral {

namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kMarginL = 70.0, kMarginR = 30.0, kMarginT = 30.0, kMarginB = 50.0;

const char* kPalette[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d68910",
                          "#16a085", "#7f8c8d", "#2c3e50", "#a04000", "#1f618d"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Canvas {
    std::ostringstream body;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool log_y = false;

    double sx(double x) const {
        return kMarginL + (x - x_min) / (x_max - x_min) * (kWidth - kMarginL - kMarginR);
    }
    double sy(double y) const {
        double t = log_y ? (std::log10(y) - std::log10(y_min)) /
                               (std::log10(y_max) - std::log10(y_min))
                         : (y - y_min) / (y_max - y_min);
        return kHeight - kMarginB - t * (kHeight - kMarginT - kMarginB);
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0) {
        body << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
             << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << fmt(width) << "\"/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& stroke,
                const std::string& fill) {
        body << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
             << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        body << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
             << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "middle") {
        body << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y)
             << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"" << anchor
             << "\">" << s << "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5) {
        if (pts.size() < 2) return;
        body << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
             << fmt(width) << "\" points=\"";
        for (const auto& [x, y] : pts) body << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
        body << "\"/>\n";
    }

    void axes(const std::string& xlabel, const std::string& ylabel) {
        line(kMarginL, kHeight - kMarginB, kWidth - kMarginR, kHeight - kMarginB, "#000", 1.0);
        line(kMarginL, kMarginT, kMarginL, kHeight - kMarginB, "#000", 1.0);
        for (int i = 0; i <= 5; ++i) {
            double tx = x_min + (x_max - x_min) * i / 5.0;
            text(sx(tx), kHeight - kMarginB + 18.0, fmt(tx));
            double ty = log_y ? std::pow(10.0, std::log10(y_min) +
                                                   (std::log10(y_max) - std::log10(y_min)) *
                                                       i / 5.0)
                              : y_min + (y_max - y_min) * i / 5.0;
            text(kMarginL - 8.0, sy(ty) + 4.0, fmt(ty), "end");
        }
        text((kMarginL + kWidth - kMarginR) / 2.0, kHeight - 12.0, xlabel);
        text(14.0, kMarginT - 10.0, ylabel, "start");
    }

    void save(const std::string& path) {
        std::ofstream out(path);
        if (!out) throw validation_error("plot: cannot open " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
            << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
            << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body.str() << "</svg>\n";
    }
};

void require_columns(const CsvTable& t, const std::vector<std::string>& names) {
    std::string missing;
    for (const auto& n : names)
        if (t.column(n) < 0) missing += (missing.empty() ? "" : ", ") + n;
    if (!missing.empty())
        throw validation_error("plot: CSV schema mismatch, missing columns: " + missing);
}

double cell_double(const std::vector<std::string>& row, int col) {
    if (col < 0 || col >= static_cast<int>(row.size()) || row[col].empty())
        return std::nan("");
    return std::strtod(row[col].c_str(), nullptr);
}

void plot_overlap_curves(const CsvTable& t, const std::string& out) {
    require_columns(t, {"eta", "method", "aov"});
    int c_eta = t.column("eta"), c_method = t.column("method"), c_aov = t.column("aov");
    int c_d = t.column("d_target");

    // group -> eta -> aov samples
    std::map<std::string, std::map<double, std::vector<double>>> groups;
    for (const auto& row : t.rows) {
        double eta = cell_double(row, c_eta);
        double aov = cell_double(row, c_aov);
        if (std::isnan(eta) || std::isnan(aov)) continue;
        std::string key = row[c_method];
        if (c_d >= 0 && !row[c_d].empty()) key += " d=" + row[c_d];
        groups[key][eta].push_back(aov);
    }

    Canvas cv;
    cv.x_min = 0.5;
    cv.x_max = 1.0;
    cv.y_min = -0.1;
    cv.y_max = 1.0;
    if (!groups.empty()) {
        double lo = 1e300, hi = -1e300;
        for (const auto& [k, pts] : groups)
            for (const auto& [eta, v] : pts) { lo = std::min(lo, eta); hi = std::max(hi, eta); }
        if (lo < hi) { cv.x_min = lo; cv.x_max = hi; }
    }
    cv.axes("eta", "adjusted overlap");

    int color = 0;
    double legend_y = kMarginT + 10.0;
    for (const auto& [key, pts] : groups) {
        const std::string stroke = kPalette[color % 10];
        std::vector<std::pair<double, double>> curve;
        for (const auto& [eta, v] : pts) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            double se = v.size() > 1 ? std::sqrt(var / (v.size() - 1.0) / v.size()) : 0.0;
            curve.push_back({eta, mean});
            cv.line(cv.sx(eta), cv.sy(mean - se), cv.sx(eta), cv.sy(mean + se), stroke, 1.0);
        }
        cv.polyline(curve, stroke);
        cv.text(kWidth - kMarginR - 150.0, legend_y, key, "start");
        cv.line(kWidth - kMarginR - 170.0, legend_y - 4.0, kWidth - kMarginR - 155.0,
                legend_y - 4.0, stroke, 2.0);
        legend_y += 16.0;
        ++color;
    }
    cv.save(out);
}

void plot_spectrum_scatter(const CsvTable& t, const std::string& out) {
    require_columns(t, {"type", "re", "im"});
    int c_type = t.column("type"), c_re = t.column("re"), c_im = t.column("im");
    double extent = 1.0;
    for (const auto& row : t.rows) {
        double re = cell_double(row, c_re), im = cell_double(row, c_im);
        if (!std::isnan(re)) extent = std::max(extent, std::abs(re) * 1.15);
        if (!std::isnan(im)) extent = std::max(extent, std::abs(im) * 1.15);
    }
    Canvas cv;
    cv.x_min = -extent;
    cv.x_max = extent;
    cv.y_min = -extent;
    cv.y_max = extent;
    cv.axes("Re", "Im");
    // radius in pixels from the x scale (equal aspect so x/y agree)
    auto px = [&](double r) { return cv.sx(r) - cv.sx(0.0); };
    for (const auto& row : t.rows) {
        if (row[c_type] == "vartheta") {
            double r = cell_double(row, c_re);
            if (!std::isnan(r))
                cv.circle(cv.sx(0.0), cv.sy(0.0), px(r), "#d8c39a", "#f5ecd7");
        }
    }
    for (const auto& row : t.rows) {
        double re = cell_double(row, c_re), im = cell_double(row, c_im);
        if (row[c_type] == "lambda" && !std::isnan(re) && !std::isnan(im))
            cv.circle(cv.sx(re), cv.sy(im), 2.2, "#2c3e50", "#2c3e50");
        else if (row[c_type] == "mu" && !std::isnan(re) && !std::isnan(im))
            cv.line(cv.sx(re), cv.sy(im) - 9.0, cv.sx(re), cv.sy(im) + 9.0, "#8b5a2b", 2.0);
    }
    cv.save(out);
}

void plot_threshold_map(const CsvTable& t, const std::string& out) {
    require_columns(t, {"r", "eta", "rhs"});
    int c_r = t.column("r"), c_eta = t.column("eta"), c_rhs = t.column("rhs");
    std::map<long, std::vector<std::pair<double, double>>> curves;
    double y_lo = 1e300, y_hi = -1e300;
    for (const auto& row : t.rows) {
        double r = cell_double(row, c_r);
        double eta = cell_double(row, c_eta);
        double rhs = cell_double(row, c_rhs);
        if (std::isnan(r) || std::isnan(eta) || std::isnan(rhs) || !std::isfinite(rhs) ||
            rhs <= 0.0)
            continue;
        curves[static_cast<long>(r)].push_back({eta, rhs});
        y_lo = std::min(y_lo, rhs);
        y_hi = std::max(y_hi, rhs);
    }
    Canvas cv;
    cv.log_y = true;
    cv.x_min = 0.5;
    cv.x_max = 1.0;
    cv.y_min = y_lo < y_hi ? y_lo : 0.1;
    cv.y_max = y_lo < y_hi ? y_hi : 10.0;
    cv.axes("eta", "threshold rhs (log)");
    int color = 0;
    double legend_y = kMarginT + 10.0;
    for (auto& [r, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        const std::string stroke = kPalette[color % 10];
        cv.polyline(pts, stroke);
        cv.text(kWidth - kMarginR - 80.0, legend_y, "r=" + std::to_string(r), "start");
        cv.line(kWidth - kMarginR - 100.0, legend_y - 4.0, kWidth - kMarginR - 85.0,
                legend_y - 4.0, stroke, 2.0);
        legend_y += 16.0;
        ++color;
    }
    cv.save(out);
}

void plot_histogram(const CsvTable& t, const std::string& out) {
    require_columns(t, {"kind", "series"});
    int c_kind = t.column("kind"), c_series = t.column("series");
    int c_lo = t.column("lo"), c_hi = t.column("hi"), c_density = t.column("density");
    int c_x = t.column("x");
    double x_lo = 1e300, x_hi = -1e300, y_hi = 0.0;
    for (const auto& row : t.rows) {
        double d = cell_double(row, c_density);
        if (!std::isnan(d)) y_hi = std::max(y_hi, d);
        for (int c : {c_lo, c_hi, c_x}) {
            double v = cell_double(row, c);
            if (!std::isnan(v)) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
        }
    }
    Canvas cv;
    cv.x_min = x_lo < x_hi ? x_lo : 0.0;
    cv.x_max = x_lo < x_hi ? x_hi : 1.0;
    cv.y_min = 0.0;
    cv.y_max = y_hi > 0.0 ? y_hi * 1.1 : 1.0;
    cv.axes("value", "density");

    std::map<std::string, int> series_color;
    auto color_of = [&](const std::string& s) {
        auto it = series_color.find(s);
        if (it == series_color.end())
            it = series_color.emplace(s, static_cast<int>(series_color.size())).first;
        return kPalette[it->second % 10];
    };
    for (const auto& row : t.rows) {
        if (row[c_kind] != "bin") continue;
        double lo = cell_double(row, c_lo), hi = cell_double(row, c_hi);
        double d = cell_double(row, c_density);
        if (std::isnan(lo) || std::isnan(hi) || std::isnan(d)) continue;
        std::string fill = color_of(row[c_series]);
        cv.rect(cv.sx(lo), cv.sy(d), cv.sx(hi) - cv.sx(lo),
                cv.sy(0.0) - cv.sy(d), fill + std::string("55"));
    }
    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    for (const auto& row : t.rows) {
        if (row[c_kind] != "curve") continue;
        double x = cell_double(row, c_x), d = cell_double(row, c_density);
        if (std::isnan(x) || std::isnan(d)) continue;
        curves[row[c_series]].push_back({x, d});
    }
    for (auto& [series, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        cv.polyline(pts, "#666666", 1.6);
    }
    double legend_y = kMarginT + 10.0;
    for (const auto& [series, idx] : series_color) {
        cv.text(kWidth - kMarginR - 130.0, legend_y, series, "start");
        cv.rect(kWidth - kMarginR - 150.0, legend_y - 10.0, 12.0, 8.0,
                std::string(kPalette[idx % 10]) + "55");
        legend_y += 16.0;
    }
    cv.save(out);
}

} // namespace

PlotKind plot_kind_from_string(const std::string& name) {
    if (name == "overlap-curves") return PlotKind::overlap_curves;
    if (name == "spectrum-scatter") return PlotKind::spectrum_scatter;
    if (name == "threshold-map") return PlotKind::threshold_map;
    if (name == "histogram") return PlotKind::histogram;
    throw validation_error("unknown plot kind: " + name);
}

void plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path) {
    CsvTable t = read_csv(csv_path);
    switch (kind) {
    case PlotKind::overlap_curves: plot_overlap_curves(t, svg_path); return;
    case PlotKind::spectrum_scatter: plot_spectrum_scatter(t, svg_path); return;
    case PlotKind::threshold_map: plot_threshold_map(t, svg_path); return;
    case PlotKind::histogram: plot_histogram(t, svg_path); return;
    }
    throw validation_error("plot: unknown kind");
}

} // namespace dispectral
