#pragma once

#include "dispectral/config.hpp"
#include "dispectral/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dispectral {

// Monte Carlo sweep over (degree target, eta) grid points. One graph is
// sampled per (point, run) with seed hash(master_seed, task index) and
// every method scores that same graph. CSV schema (one row per grid
// point x method x run, written incrementally and flushed per row):
//   run_id,n,r_blocks,s,eta,d_target,method,seed,r0_used,aov,
//   lambda1,lambda2,lambda3,lambda4,runtime_ms,error
// With resume = true an interrupted output file is truncated to the last
// complete task and the sweep continues from there, reproducing exactly
// the rows an uninterrupted run would have written (runtime_ms aside).
void run_experiment(const ExperimentConfig& cfg, int threads = 1, bool resume = false);

// Per-eta comparison of measured |<u_i, phi_j>| / |<v_i, xi_j>| against
// the predicted a/b matrices for the two-block model. Prediction columns
// beyond r0 are left empty.
void run_overlap_validation(double s, const std::vector<double>& eta_grid, index_t n,
                            int runs, std::uint64_t master_seed, const std::string& out_csv);

// Histograms of sqrt(n) * u_i entries grouped by true cluster, with the
// limiting Gaussian-mixture densities overlaid; writes the histogram CSV
// and renders it to SVG when svg_path is nonempty.
void run_fluctuation_histograms(const SbmModel& spec, int samples, std::uint64_t seed,
                                const std::string& out_csv, const std::string& svg_path);

// (r, eta, rhs) table of the pathwise detection threshold, one row per
// grid point; input for the threshold-map plot.
void write_threshold_map_csv(const std::vector<int>& r_list, int eta_count,
                             const std::string& out_csv);

} // namespace dispectral
