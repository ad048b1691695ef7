#pragma once

#include "dispectral/clustering.hpp"
#include "dispectral/csr_matrix.hpp"
#include "dispectral/eigensolver.hpp"

namespace dispectral {

// SVD baseline: k left and k right top singular vectors as an n x 2k
// embedding (left block first), then k-means.
Partition svd_cluster(const SparseReal& a, int k, std::uint64_t seed,
                      const SolverOptions& solver = {});

// SimpleHerm representation: H = omega A + conj(omega) A^T with omega the
// ceil(2 pi k)-th root of unity, D the total-degree matrix (out + in edge
// counts) and L = I - D^{-1/2} H D^{-1/2}. Isolated nodes get a zero
// D^{-1/2} entry (pseudo-inverse convention).
struct SimpleHermMatrices {
    SparseComplex h;
    SparseComplex laplacian;
    int omega_order = 0;
};

SimpleHermMatrices build_simpleherm(const SparseReal& a, int k);

// 2-D embedding from the eigenvector of the smallest eigenvalue of L.
struct HermitianEmbedding {
    Eigen::MatrixXd points; // n x 2: (Re, Im)
    double eigenvalue = 0.0;
    int omega_order = 0;
};

HermitianEmbedding simpleherm_embedding(const SparseReal& a, int k,
                                        const SolverOptions& solver = {});

// Full SimpleHerm baseline; normalize_rows optionally projects the 2-D
// cloud to the unit circle before k-means (sensitivity check only, off by
// default).
Partition simpleherm_cluster(const SparseReal& a, int k, std::uint64_t seed,
                             const SolverOptions& solver = {}, bool normalize_rows = false);

} // namespace dispectral
