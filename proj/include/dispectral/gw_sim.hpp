#pragma once

#include "dispectral/model.hpp"
#include "dispectral/theory.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace dispectral {

// Multitype Galton-Watson tree: the root has a fixed type, every vertex of
// type i spawns Poisson(M(i,k)) children of type k. Only per-type level
// counts are kept; conditionally on one level, the next level counts are
// independent Poissons with means (counts^T M)_k, which is exactly the law
// of per-vertex Poisson offspring summed over the level.
struct GwConfig {
    Eigen::MatrixXd m;  // r x r offspring-mean matrix (modularity F*Pi)
    Eigen::MatrixXd f;  // unit right eigenvectors of m (columns)
    Eigen::VectorXd nu; // matching eigenvalues
    int depth = 12;
    long n_samples = 100000;
    int root_type = 0;
    // Samples whose population would cross this are flagged and excluded;
    // the level recursion costs O(r^2) per level regardless of population.
    double population_cap = 1e19;
};

// Builds a GwConfig from an SBM (sigma_left == sigma_right); offspring
// means come from the modularity matrix and eigenvectors from its real
// eigendecomposition.
GwConfig gw_config_from_sbm(const SbmModel& spec, int depth, long n_samples, int root_type);

// One realization of the normalized level sums
//   U_i(j, t) = nu_i^{-t} sum_k N_k(t) f_i(k),  t = 0..depth,
// a martingale started at f_i(j).
struct MartingaleSample {
    std::vector<double> values;
    bool extinct = false;
    bool overflowed = false;
};

struct GwRunResult {
    std::vector<MartingaleSample> samples; // overflowed samples excluded
    long overflow_count = 0;
};

// eigen_index is 0-based. Deterministic given (cfg, seed).
GwRunResult simulate_martingale(const GwConfig& cfg, int eigen_index, std::uint64_t seed);

// Moment comparison of normalized end values against the analytic limits,
// with Monte Carlo standard errors. The Kolmogorov-Smirnov distance to the
// matching normal law probes the Gaussian-limit conjecture and is reported,
// never asserted.
struct MomentReport {
    long n_valid = 0;
    double emp_mean = 0.0, emp_var = 0.0;
    double se_mean = 0.0, se_var = 0.0;
    double z_mean = 0.0, z_var = 0.0;
    double atom_fraction = 0.0; // exact zeros (extinction atom)
    double ks_to_normal = 0.0;
};

MomentReport moment_check(const std::vector<double>& end_values, double target_mean,
                          double target_variance);

} // namespace dispectral
