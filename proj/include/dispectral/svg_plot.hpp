#pragma once

#include <string>

namespace dispectral {

// Deterministic SVG rendering of the harness CSV outputs: fixed 800x600
// canvas, text as SVG elements, no timestamps; identical input bytes give
// identical output bytes.
//
//   overlap-curves   : experiment CSV (eta, method, aov[, d_target])
//   spectrum-scatter : rows (type, re, im[, extra]); type in
//                      {lambda, mu, vartheta}, circle of radius vartheta,
//                      tick lines at the mu
//   threshold-map    : rows (r, eta, rhs), log y-axis, one curve per r
//   histogram        : rows (kind, series, lo, hi, count, density, x);
//                      kind=bin draws bars, kind=curve draws polylines
//
// A schema mismatch raises validation_error naming the missing columns.
enum class PlotKind { overlap_curves, spectrum_scatter, threshold_map, histogram };

PlotKind plot_kind_from_string(const std::string& name);

void plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path);

} // namespace dispectral
