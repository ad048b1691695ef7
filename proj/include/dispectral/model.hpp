#pragma once

#include "dispectral/csr_matrix.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <variant>
#include <vector>

namespace dispectral {

// Weighted inhomogeneous directed Erdos-Renyi model: edge (x,y) present
// independently with probability P(x,y), weight W(x,y). Self-loops are
// allowed; all n^2 ordered pairs are candidate edges.
struct DenseModel {
    Eigen::MatrixXd P;
    Eigen::MatrixXd W;

    index_t n() const { return P.rows(); }
    double q_entry(index_t x, index_t y) const { return P(x, y) * W(x, y); }
    double k_entry(index_t x, index_t y) const { return P(x, y) * W(x, y) * W(x, y); }
};

// Directed SBM: edge (x,y) present with probability F(sigma_left(x),
// sigma_right(y)) / n, unit weight. Q and K stay block-structured, so no
// n x n storage is ever materialized.
struct SbmModel {
    index_t n = 0;
    Eigen::MatrixXd F; // r x r, nonnegative, max(F)/n <= 1
    std::vector<int> sigma_left;  // [n] -> [r]
    std::vector<int> sigma_right; // [n] -> [r]

    int r() const { return static_cast<int>(F.rows()); }
    double edge_probability(index_t x, index_t y) const {
        return F(sigma_left[x], sigma_right[y]) / static_cast<double>(n);
    }
    double q_entry(index_t x, index_t y) const { return edge_probability(x, y); }
    double k_entry(index_t x, index_t y) const { return edge_probability(x, y); }
};

using ModelSpec = std::variant<DenseModel, SbmModel>;

// Throws validation_error when invariants are violated (probabilities
// outside [0,1], negative F, membership out of range, ...).
void validate(const ModelSpec& spec);

// Cluster proportions, intersection matrix and modularity matrix F*Pi.
// Pi(i,j) = |sigma_left^{-1}(j) ∩ sigma_right^{-1}(i)| / n.
struct SbmSummary {
    Eigen::VectorXd p; // left cluster proportions
    Eigen::VectorXd q; // right cluster proportions
    Eigen::MatrixXd Pi;
    Eigen::MatrixXd modularity; // F * Pi
};

SbmSummary sbm_summary(const SbmModel& spec);

// Pathwise SBM: tridiagonal Toeplitz connectivity with s/2 on the
// diagonal, s*eta above and s*(1-eta) below, equal-sized contiguous
// clusters, identical left and right memberships. Models flow data where
// edges prefer the block order direction.
SbmModel pathwise_spec(int r_blocks, double s, double eta, index_t n);

// Samples the adjacency matrix. Deterministic given (spec, seed). The SBM
// path draws a Binomial edge count per cluster block and places the edges
// uniformly without replacement, so the cost is O(expected edges), never
// O(n^2).
SparseReal sample(const ModelSpec& spec, std::uint64_t seed);

// Exact expected number of stored entries, computed blockwise for the SBM
// variant.
double expected_edge_count(const ModelSpec& spec);

// Dense n x n first and second entrywise moments Q = E[A], K = E[A.A].
// Oracle/test support only; guarded at n <= 2000.
Eigen::MatrixXd materialize_q(const ModelSpec& spec);
Eigen::MatrixXd materialize_k(const ModelSpec& spec);

} // namespace dispectral
