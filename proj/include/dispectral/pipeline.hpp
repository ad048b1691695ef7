#pragma once

#include "dispectral/baselines.hpp"
#include "dispectral/clustering.hpp"
#include "dispectral/eigensolver.hpp"

#include <string>

namespace dispectral {

enum class Method { gmm, kmeans, svd, simpleherm };

Method method_from_string(const std::string& name);
std::string method_name(Method m);

struct ClusterOptions {
    index_t r0 = -1;     // -1: estimate from the sample spectrum
    double r0_margin = 0.1;
    int restarts = 10;
    SolverOptions solver;
    bool normalize_embedding = false; // simpleherm sensitivity flag
};

struct ClusterDiagnostics {
    Eigen::VectorXcd eigenvalues; // adjacency Ritz values (or singular values)
    Eigen::VectorXd residuals;
    index_t r0_used = 0;
    double fit_score = 0.0; // GMM log-likelihood or k-means cost
    std::string realification_map;
};

// Spectral clustering of the raw adjacency matrix: top eigenpairs of A
// (both sides), spectral embedding, geometric clustering. No trimming, no
// pruning, no normalization; A is never modified. The svd / simpleherm
// methods dispatch to the baselines with k retained vectors.
std::pair<Partition, ClusterDiagnostics> cluster_digraph(const SparseReal& a, int k,
                                                         Method method, std::uint64_t seed,
                                                         const ClusterOptions& opts = {});

} // namespace dispectral
