#include "dispectral/dense_oracle.hpp"

#include "dispectral/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dispectral {

namespace {
constexpr index_t kDenseGuard = 2000;
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    index_t best = 0;
    double best_mod = -1.0;
    for (index_t i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best_mod) { // strict: ties keep the lowest index
            best_mod = m;
            best = i;
        }
    }
    if (best_mod <= 0.0) return;
    std::complex<double> rot = std::conj(v[best]) / best_mod;
    v *= rot;
    v[best] = std::complex<double>(std::abs(v[best]), 0.0); // kill roundoff imaginary part
}

std::vector<int> modulus_order(const Eigen::VectorXcd& values) {
    std::vector<int> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ma = std::abs(values[a]), mb = std::abs(values[b]);
        if (ma != mb) return ma > mb;
        if (values[a].imag() != values[b].imag()) return values[a].imag() > values[b].imag();
        return values[a].real() > values[b].real();
    });
    return idx;
}

std::vector<int> match_eigenvalues(const Eigen::VectorXcd& right_values,
                                   const Eigen::VectorXcd& left_values,
                                   double collision_tol) {
    const index_t k = right_values.size();
    if (left_values.size() < k)
        throw numerical_error("match_eigenvalues: not enough left candidates");
    std::vector<bool> used(left_values.size(), false);
    std::vector<int> match(k, -1);
    for (index_t i = 0; i < k; ++i) {
        int best = -1, second = -1;
        double best_d = 0.0, second_d = 0.0;
        for (index_t j = 0; j < left_values.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(right_values[i] - left_values[j]);
            if (best < 0 || d < best_d) {
                second = best;
                second_d = best_d;
                best = static_cast<int>(j);
                best_d = d;
            } else if (second < 0 || d < second_d) {
                second = static_cast<int>(j);
                second_d = d;
            }
        }
        // Exactly repeated eigenvalues are not ambiguous: any candidate of
        // the group is valid, so only genuinely distinct close values error.
        if (second >= 0 && second_d - best_d < collision_tol &&
            std::abs(left_values[best] - left_values[second]) > collision_tol * 1e-6)
            throw degeneracy_error(
                "match_eigenvalues: ambiguous left/right pairing, eigenvalues too close");
        used[best] = true;
        match[i] = best;
    }
    return match;
}

namespace {

// Sorts, truncates to k and applies the phase convention; residuals are
// recomputed explicitly from the supplied matrices.
EigenPairs assemble(const Eigen::VectorXcd& values, const Eigen::MatrixXcd& right,
                    const Eigen::MatrixXcd& left, const Eigen::MatrixXd& a, index_t k) {
    std::vector<int> order = modulus_order(values);
    if (k < 0 || k > static_cast<index_t>(order.size())) k = static_cast<index_t>(order.size());
    EigenPairs out;
    out.values.resize(k);
    out.right.resize(right.rows(), k);
    out.left.resize(left.rows(), k);
    out.right_residuals.resize(k);
    out.left_residuals.resize(k);
    for (index_t i = 0; i < k; ++i) {
        int s = order[i];
        out.values[i] = values[s];
        Eigen::VectorXcd u = right.col(s).normalized();
        Eigen::VectorXcd v = left.col(s).normalized();
        fix_phase(u);
        fix_phase(v);
        out.right.col(i) = u;
        out.left.col(i) = v;
        out.right_residuals[i] = (a.cast<std::complex<double>>() * u - values[s] * u).norm();
        out.left_residuals[i] =
            (a.transpose().cast<std::complex<double>>() * v - values[s] * v).norm();
    }
    return out;
}

} // namespace

EigenPairs dense_eigen_oracle(const Eigen::MatrixXd& a, index_t k) {
    if (a.rows() != a.cols()) throw validation_error("dense_eigen_oracle: matrix must be square");
    if (a.rows() > kDenseGuard)
        throw validation_error("dense_eigen_oracle: n exceeds the dense guard (2000)");
    Eigen::EigenSolver<Eigen::MatrixXd> right_solver(a, true);
    if (right_solver.info() != Eigen::Success)
        throw numerical_error("dense_eigen_oracle: QR iteration did not converge");
    Eigen::EigenSolver<Eigen::MatrixXd> left_solver(a.transpose(), true);
    if (left_solver.info() != Eigen::Success)
        throw numerical_error("dense_eigen_oracle: QR iteration did not converge (transpose)");

    Eigen::VectorXcd values = right_solver.eigenvalues();
    double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    std::vector<int> match =
        match_eigenvalues(values, left_solver.eigenvalues(), 1e-6 * std::max(scale, 1e-300));
    Eigen::MatrixXcd left(a.rows(), values.size());
    for (index_t i = 0; i < values.size(); ++i)
        left.col(i) = left_solver.eigenvectors().col(match[i]);
    return assemble(values, right_solver.eigenvectors(), left, a, k);
}

SvdTriplets dense_svd_oracle(const Eigen::MatrixXd& a, index_t k) {
    if (std::max(a.rows(), a.cols()) > kDenseGuard)
        throw validation_error("dense_svd_oracle: dimension exceeds the dense guard (2000)");
    if (k < 0 || k > std::min(a.rows(), a.cols()))
        throw validation_error("dense_svd_oracle: bad k");
    Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
        throw numerical_error("dense_svd_oracle: symmetric eigensolver failed");
    SvdTriplets out;
    out.singular_values.resize(k);
    out.left.resize(a.rows(), k);
    out.right.resize(a.cols(), k);
    const index_t m = gram.rows();
    for (index_t i = 0; i < k; ++i) {
        double lambda = std::max(es.eigenvalues()[m - 1 - i], 0.0); // ascending in Eigen
        double sigma = std::sqrt(lambda);
        Eigen::VectorXd v = es.eigenvectors().col(m - 1 - i);
        // Deterministic sign: largest-modulus entry positive.
        index_t arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        out.singular_values[i] = sigma;
        out.right.col(i) = v;
        if (sigma > 1e-14 * (out.singular_values[0] + 1e-300))
            out.left.col(i) = (a * v) / sigma;
        else
            out.left.col(i).setZero();
    }
    return out;
}

EigenPairs dense_hermitian_oracle(const Eigen::MatrixXcd& h, Extreme which, index_t k) {
    if (h.rows() != h.cols())
        throw validation_error("dense_hermitian_oracle: matrix must be square");
    if (h.rows() > kDenseGuard)
        throw validation_error("dense_hermitian_oracle: n exceeds the dense guard (2000)");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw validation_error("dense_hermitian_oracle: input is not Hermitian");
    if (k < 1 || k > h.rows()) throw validation_error("dense_hermitian_oracle: bad k");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw numerical_error("dense_hermitian_oracle: eigensolver failed");
    EigenPairs out;
    out.values.resize(k);
    out.right.resize(h.rows(), k);
    out.right_residuals.resize(k);
    const index_t n = h.rows();
    // Eigen returns ascending eigenvalues.
    std::vector<index_t> pick(k);
    for (index_t i = 0; i < k; ++i)
        pick[i] = which == Extreme::smallest ? i : n - 1 - i;
    // Returned pairs still honor the decreasing-modulus ordering.
    std::sort(pick.begin(), pick.end(), [&](index_t a, index_t b) {
        double ma = std::abs(es.eigenvalues()[a]), mb = std::abs(es.eigenvalues()[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    for (index_t i = 0; i < k; ++i) {
        out.values[i] = es.eigenvalues()[pick[i]];
        Eigen::VectorXcd u = es.eigenvectors().col(pick[i]);
        fix_phase(u);
        out.right.col(i) = u;
        out.right_residuals[i] = (h * u - out.values[i] * u).norm();
    }
    out.left = out.right; // Hermitian: left and right eigenvectors coincide
    out.left_residuals = out.right_residuals;
    return out;
}

} // namespace dispectral
