#pragma once

#include "dispectral/dense_oracle.hpp"
#include "dispectral/model.hpp"

#include <Eigen/Core>

#include <complex>

namespace dispectral {

// Analytic spectral data of Q = E[A].
//
// For an SBM all quantities come from the r x r modularity matrix F*Pi
// (right) and Pi*F (left): the nonzero eigenvalues of Q are exactly those
// of F*Pi and the eigenvectors of Q are cluster-constant lifts. The dense
// model path materializes Q and uses the dense oracle (n <= 2000).
//
// rho is the squared bulk radius: for the unweighted SBM, K = Q and rho =
// |mu_1|; for dense models rho = ||K|| (spectral norm). The detection
// threshold is max(sqrt(rho), max|W|) and r0 counts |mu_i| strictly above
// it.
struct ExpectedSpectrum {
    Eigen::VectorXcd mu;  // decreasing modulus
    Eigen::MatrixXcd phi; // n x r unit right eigenvectors of Q
    Eigen::MatrixXcd xi;  // n x r unit left eigenvectors (Q^T xi_i = mu_i xi_i)
    Eigen::MatrixXcd f;   // r x r unit right eigenvectors of F*Pi (SBM only)
    Eigen::MatrixXcd g;   // r x r unit left eigenvectors of Pi*F (SBM only)
    double rho = 0.0;
    double theta_threshold = 0.0;
    index_t r0 = 0;
    double tau = 0.0; // sqrt(theta/|mu_{r0}|), NaN when r0 == 0
};

// Throws degeneracy_error when eigenvalues are closer than 1e-8*|mu_1|
// (SBM: any pair of modularity eigenvalues; dense: any pair of outliers).
ExpectedSpectrum expected_spectrum(const ModelSpec& spec);

enum class Side { right, left };

// Covariance functional Gamma(z, .) for the SBM: the n-dimensional series
// sum_t <1, K^t (Sigma h)> / z^t collapses to the r x r resolvent
//   n <p, (I - z^{-1} F Pi)^{-1} h>      (right)
//   n <q, (I - z^{-1} (Pi F)^*)^{-1} h>  (left).
// h is an r-vector. Requires |z| > rho.
std::complex<double> gamma_functional(const SbmModel& spec, std::complex<double> z,
                                      const Eigen::VectorXcd& h, Side side);

// Truncated Neumann series oracle sum_{t<=T} <1, K^t xi> / z^t with T such
// that (rho/|z|)^T < 1e-12; xi is an n-vector. Independent of the r x r
// route above, which it cross-checks in the tests.
std::complex<double> gamma_neumann(const Eigen::MatrixXd& k_matrix, std::complex<double> z,
                                   const Eigen::VectorXcd& xi, double rho);

// Predicted limiting overlaps |<u_i, phi_j>| -> a(i,j) and |<v_i, xi_j>|
// -> b(i,j) for i,j in [r0], together with the eigendefects R_i, L_i.
struct OverlapPrediction {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::VectorXd R;
    Eigen::VectorXd L;
    bool empty = false; // r0 == 0: no outliers, nothing to predict
};

OverlapPrediction overlap_prediction(const ModelSpec& spec);

// Closed-form eigendecomposition of the pathwise tridiagonal Toeplitz
// connectivity (diagonal s/2, superdiagonal s*eta, subdiagonal s*(1-eta)):
//   values[k-1] = s/2 + 2 s cos(k pi/(r+1)) sqrt(eta(1-eta)),  k = 1..r
//   f_i(j) ~ ((1-eta)/eta)^{j/2} sin(i j pi/(r+1)), left with inverted ratio.
// Vectors are unit columns; values keep the natural k order (decreasing).
// eta must lie strictly inside (0,1); use the dense oracle otherwise.
struct ToeplitzEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;
};

ToeplitzEigen tridiag_toeplitz_eigen(int r_blocks, double s, double eta);

// Detection condition for all r pathwise eigenvalues:
//   s/r > (1/2 + c_1 theta) / min_k (1/2 + c_k theta)^2,
// c_k = cos(k pi/(r+1)), theta = 2 sqrt(eta(1-eta)). When some eigenvalue
// vanishes (theta = -2 c_k) the right side is +infinity.
struct ThresholdCheck {
    bool detect_all = false;
    double lhs = 0.0;
    double rhs = 0.0;
    bool rhs_infinite = false;
};

ThresholdCheck pathwise_detection_threshold(int r_blocks, double s, double eta);

// Smallest asymmetry at which the two-block second eigenvalue escapes the
// bulk: eta(s) = (1 + sqrt(1 - x(s)^2))/2 with x(s) = 1 + (2 - 2
// sqrt(2s+1))/s. Defined for s > 4.
double eta_threshold(double s);

// Mean degree of the pathwise model, d = (s/k)(3/2 - 1/k^2), and its
// inverse s = k d / (3/2 - 1/k^2).
double pathwise_mean_degree(int r_blocks, double s);
double calibrate_s(int r_blocks, double d);

// Limiting mean and variance of the per-cluster eigenvector entry
// distributions Z_{i,j} (sqrt(n)-normalized eigenvectors):
//   mean(i,j)     = f_i(j) / gamma_i
//   variance(i,j) = w_i(j) / gamma_i^2 - mean(i,j)^2
// with w_i = (I - nu_i^{-2} M)^{-1} f^{i,i} and gamma_i = sqrt(<p, w_i>).
// Requires sigma_left == sigma_right and real outlier eigenvalues.
struct LimitMoments {
    Eigen::MatrixXd mean;     // r0 x r
    Eigen::MatrixXd variance; // r0 x r
    Eigen::VectorXd gamma;    // r0 normalizers
};

LimitMoments limit_moments(const SbmModel& spec);

// Everything explicit about the two-block model at (s, eta): theta, the
// modularity eigenvalues, threshold, r0, the exact a_11/a_22 and their
// O(1/s) expansions. eta = 1 makes F defective; that case is flagged
// rather than computed.
struct TwoBlockReport {
    double theta = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double vartheta = 0.0;
    int r0 = 0;
    bool degenerate = false;
    double a11 = 0.0;
    double a22 = 0.0;
    double a11_asymptotic = 0.0;
    double a22_asymptotic = 0.0;
    bool has_a22 = false;
};

TwoBlockReport two_block_report(double s, double eta);

} // namespace dispectral
