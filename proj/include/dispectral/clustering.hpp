#pragma once

#include "dispectral/dense_oracle.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace dispectral {

// Spectral embedding x -> (u_1(x),...,u_{r0}(x), v_1(x),...,v_{r0}(x)).
// A complex-conjugate eigenvector pair contributes exactly two real
// columns (real and imaginary parts of one representative); the partner
// is redundant and dropped. realification_map documents the column
// layout.
struct Embedding {
    Eigen::MatrixXd points; // n rows
    index_t r0 = 0;
    std::string realification_map;
};

Embedding embed(const EigenPairs& pairs, index_t r0);

// Number of eigenvalues outside the bulk: #{i : |lambda_i| > (1 + margin)
// sqrt(|lambda_1|)}, the sqrt(rho) rule for unweighted graphs with a
// safety margin.
index_t estimate_r0(const Eigen::VectorXcd& values, double margin = 0.1);

struct Partition {
    std::vector<int> labels;
    int k = 0;
};

struct GmmModel {
    Eigen::VectorXd weights;
    Eigen::MatrixXd means; // k x dim
    std::vector<Eigen::MatrixXd> covariances;
    double log_likelihood = 0.0;
    std::vector<double> ll_trace; // per-iteration log-likelihood of the best run
};

struct GmmOptions {
    int restarts = 10;
    double tol = 1e-7;
    int max_iter = 500;
    std::uint64_t seed = 1;
};

// Full-covariance EM, k-means++ initialization with pooled covariances,
// best of `restarts` runs by final log-likelihood. Covariances carry a
// floor of 1e-6 * mean pooled diagonal at every M-step; a run whose
// components still collapse is retried, and if every restart collapses a
// numerical_error is thrown.
std::pair<GmmModel, Partition> gmm_fit(const Eigen::MatrixXd& points, int k,
                                       const GmmOptions& opts = {});

// Lloyd iterations from k-means++ seeding, best of restarts by
// within-cluster sum of squares; empty clusters are repaired by splitting
// the largest one.
Partition kmeans_fit(const Eigen::MatrixXd& points, int k, int restarts = 10,
                     std::uint64_t seed = 1);

double kmeans_cost(const Eigen::MatrixXd& points, const Partition& part);

// Chance-adjusted pair-counting agreement (Hubert-Arabie adjusted Rand
// index): 1 = identical partitions, ~0 for random labels. Symmetric and
// invariant under relabeling.
double adjusted_overlap(const std::vector<int>& truth, const std::vector<int>& guess);

} // namespace dispectral
