#pragma once

#include "dispectral/csr_matrix.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace dispectral {

// Eigenpairs sorted by decreasing modulus. Columns of `right` / `left`
// are unit vectors; left vectors satisfy A^T v_i = lambda_i v_i (plain
// transpose, matched to the right eigenvalues by nearest complex
// distance). Phase convention: the largest-modulus coordinate of every
// vector is real and positive, exact ties broken by lowest index. For
// real input the value multiset is closed under conjugation.
struct EigenPairs {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd right;
    Eigen::MatrixXcd left;
    Eigen::VectorXd right_residuals; // |A u_i - lambda_i u_i|
    Eigen::VectorXd left_residuals;  // |A^T v_i - lambda_i v_i|

    index_t k() const { return values.size(); }
};

struct SvdTriplets {
    Eigen::VectorXd singular_values; // nonincreasing, >= 0
    Eigen::MatrixXd left;            // unit columns u_i
    Eigen::MatrixXd right;           // unit columns v_i
};

// Shared conventions ------------------------------------------------------

// Rotates v so its largest-modulus coordinate is real and positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v);

// Indices of `values` ordered by decreasing modulus; conjugate pairs stay
// adjacent with the positive-imaginary member first.
std::vector<int> modulus_order(const Eigen::VectorXcd& values);

// Matches each right eigenvalue to the nearest left one (greedy, in
// modulus order). Throws degeneracy_error when the two nearest candidates
// are closer than collision_tol apart.
std::vector<int> match_eigenvalues(const Eigen::VectorXcd& right_values,
                                   const Eigen::VectorXcd& left_values,
                                   double collision_tol);

// Dense oracles -----------------------------------------------------------
//
// Test oracles backed by dense QR-type decompositions; guarded at n <=
// 2000. They follow the exact same ordering/phase conventions as the
// sparse solvers so results are directly comparable.

// Full eigendecomposition of a real square matrix; keeps the k pairs of
// largest modulus (k = n when omitted).
EigenPairs dense_eigen_oracle(const Eigen::MatrixXd& a, index_t k = -1);

// Singular triplets through the symmetric eigendecomposition of A^T A.
SvdTriplets dense_svd_oracle(const Eigen::MatrixXd& a, index_t k);

enum class Extreme { smallest, largest };

// Extreme eigenpairs of a complex Hermitian matrix (values are real).
EigenPairs dense_hermitian_oracle(const Eigen::MatrixXcd& h, Extreme which, index_t k);

} // namespace dispectral
