#pragma once

#include "dispectral/csr_matrix.hpp"
#include "dispectral/dense_oracle.hpp"

#include <cstdint>
#include <functional>

namespace dispectral {

struct SolverOptions {
    double tol = 1e-10;     // residual target relative to |lambda_1|
    int max_restarts = 300;
    int krylov_dim = 0;     // 0 = max(2k + 10, 30), capped at n
    std::uint64_t seed = 1; // start-vector seed
};

// Top-k eigenpairs (largest modulus) of a sparse real square matrix by
// restarted Arnoldi iteration (Krylov-Schur truncation). Left vectors come
// from an identical run on the transpose view, matched to the right
// eigenvalues by nearest complex distance. When the k-th and (k+1)-th
// Ritz values form a conjugate pair the pair is kept whole, so up to k+1
// pairs may be returned. Deterministic given (A, k, options).
EigenPairs top_eigenpairs(const SparseReal& a, index_t k, const SolverOptions& opts = {});

// Right-side spectrum scan: Ritz values only, no transpose run. Used for
// bulk-edge inspection where a looser tolerance is enough.
struct SpectrumScan {
    Eigen::VectorXcd values;
    Eigen::VectorXd residuals;
};

SpectrumScan top_eigenvalues(const SparseReal& a, index_t k, const SolverOptions& opts = {});

// Top-k singular triplets via thick-restart Lanczos on the implicitly
// formed Gram operator x -> A^T(Ax).
SvdTriplets top_svd(const SparseReal& a, index_t k, const SolverOptions& opts = {});

// Extreme eigenpairs of a sparse complex Hermitian matrix. The smallest
// end is reached through the spectral shift c*I - H with c the upper
// Gershgorin bound, so no factorization is ever needed.
EigenPairs hermitian_extreme(const SparseComplex& h, Extreme which, index_t k,
                             const SolverOptions& opts = {});

} // namespace dispectral
