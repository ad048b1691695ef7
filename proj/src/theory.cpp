#include "dispectral/theory.hpp"

#include "dispectral/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace dispectral {

namespace {

using Cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

struct SbmBasis {
    Eigen::VectorXcd nu;  // modularity eigenvalues, decreasing modulus
    Eigen::MatrixXcd f;   // unit right eigenvectors of F*Pi
    Eigen::MatrixXcd g;   // unit right eigenvectors of (Pi*F)^T, matched to nu
    Eigen::VectorXd p, q; // cluster proportions
    Eigen::MatrixXd m_right; // F*Pi
    Eigen::MatrixXd m_left;  // (Pi*F)^T
};

void separation_guard(const Eigen::VectorXcd& values, double scale) {
    for (index_t i = 0; i < values.size(); ++i)
        for (index_t j = i + 1; j < values.size(); ++j)
            if (std::abs(values[i] - values[j]) < 1e-8 * scale)
                throw degeneracy_error(
                    "expected_spectrum: near-defective modularity matrix, eigenvalues "
                    "closer than 1e-8*|mu_1|");
}

SbmBasis sbm_basis(const SbmModel& spec) {
    SbmSummary summary = sbm_summary(spec);
    SbmBasis basis;
    basis.p = summary.p;
    basis.q = summary.q;
    basis.m_right = summary.modularity;
    basis.m_left = (summary.Pi * spec.F).transpose();

    EigenPairs right = dense_eigen_oracle(basis.m_right);
    EigenPairs left = dense_eigen_oracle(basis.m_left);
    double scale = std::max(std::abs(right.values[0]), 1e-300);
    separation_guard(right.values, scale);
    std::vector<int> match = match_eigenvalues(right.values, left.values, 1e-10 * scale);

    basis.nu = right.values;
    basis.f = right.right;
    basis.g.resize(left.right.rows(), right.values.size());
    for (index_t i = 0; i < right.values.size(); ++i)
        basis.g.col(i) = left.right.col(match[i]);
    return basis;
}

double unweighted_threshold(double rho) { return std::max(std::sqrt(rho), 1.0); }

index_t count_outliers(const Eigen::VectorXcd& mu, double theta) {
    index_t r0 = 0;
    while (r0 < mu.size() && std::abs(mu[r0]) > theta) ++r0;
    return r0;
}

// Spectral norm by power iteration on K^T K; deterministic start.
double spectral_norm(const Eigen::MatrixXd& k_matrix) {
    if (k_matrix.size() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(k_matrix.cols(), 1.0);
    v.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = k_matrix.transpose() * (k_matrix * v);
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        w /= nw;
        if (std::abs(nw - sigma2) <= 1e-13 * nw && it > 2) { sigma2 = nw; break; }
        sigma2 = nw;
        v = w;
    }
    return std::sqrt(sigma2);
}

ExpectedSpectrum expected_spectrum_sbm(const SbmModel& spec) {
    SbmBasis basis = sbm_basis(spec);
    const int r = spec.r();
    ExpectedSpectrum out;
    out.mu = basis.nu;
    out.f = basis.f;
    out.g = basis.g;

    out.phi.resize(spec.n, r);
    out.xi.resize(spec.n, r);
    for (int i = 0; i < r; ++i) {
        for (index_t x = 0; x < spec.n; ++x) {
            out.phi(x, i) = basis.f(spec.sigma_left[x], i);
            out.xi(x, i) = basis.g(spec.sigma_right[x], i);
        }
        out.phi.col(i).normalize();
        out.xi.col(i).normalize();
    }

    out.rho = std::abs(basis.nu[0]); // unweighted: K = Q
    out.theta_threshold = unweighted_threshold(out.rho);
    out.r0 = count_outliers(out.mu, out.theta_threshold);
    out.tau = out.r0 >= 1 ? std::sqrt(out.theta_threshold / std::abs(out.mu[out.r0 - 1]))
                          : std::numeric_limits<double>::quiet_NaN();
    return out;
}

ExpectedSpectrum expected_spectrum_dense(const DenseModel& spec) {
    Eigen::MatrixXd q = materialize_q(ModelSpec(spec));
    Eigen::MatrixXd k = materialize_k(ModelSpec(spec));
    EigenPairs pairs = dense_eigen_oracle(q);

    double top = std::abs(pairs.values[0]);
    index_t r = 0; // keep the numerically nonzero spectrum
    while (r < pairs.values.size() && std::abs(pairs.values[r]) > 1e-10 * top) ++r;
    if (r == 0) r = 1;

    ExpectedSpectrum out;
    out.mu = pairs.values.head(r);
    out.phi = pairs.right.leftCols(r);
    out.xi = pairs.left.leftCols(r);
    out.rho = spectral_norm(k);
    out.theta_threshold = std::max(std::sqrt(out.rho), spec.W.cwiseAbs().maxCoeff());
    out.r0 = count_outliers(out.mu, out.theta_threshold);
    separation_guard(out.mu.head(out.r0), std::max(top, 1e-300));
    out.tau = out.r0 >= 1 ? std::sqrt(out.theta_threshold / std::abs(out.mu[out.r0 - 1]))
                          : std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace

ExpectedSpectrum expected_spectrum(const ModelSpec& spec) {
    validate(spec);
    if (const auto* dense = std::get_if<DenseModel>(&spec))
        return expected_spectrum_dense(*dense);
    return expected_spectrum_sbm(std::get<SbmModel>(spec));
}

std::complex<double> gamma_functional(const SbmModel& spec, Cplx z, const Eigen::VectorXcd& h,
                                      Side side) {
    SbmSummary summary = sbm_summary(spec);
    const int r = spec.r();
    if (h.size() != r) throw validation_error("gamma_functional: h must be an r-vector");
    EigenPairs top = dense_eigen_oracle(summary.modularity, 1);
    double rho = std::abs(top.values[0]);
    if (std::abs(z) <= rho)
        throw validation_error("gamma_functional: |z| <= rho, series diverges");

    Eigen::MatrixXcd resolvent_base;
    Eigen::VectorXd weights;
    if (side == Side::right) {
        resolvent_base = summary.modularity.cast<Cplx>();
        weights = summary.p;
    } else {
        resolvent_base = (summary.Pi * spec.F).transpose().cast<Cplx>();
        weights = summary.q;
    }
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(r, r) - resolvent_base / z;
    Eigen::VectorXcd w = lhs.partialPivLu().solve(h);
    return static_cast<double>(spec.n) * (weights.cast<Cplx>().array() * w.array()).sum();
}

std::complex<double> gamma_neumann(const Eigen::MatrixXd& k_matrix, Cplx z,
                                   const Eigen::VectorXcd& xi, double rho) {
    if (k_matrix.rows() != k_matrix.cols())
        throw validation_error("gamma_neumann: K must be square");
    if (xi.size() != k_matrix.rows())
        throw validation_error("gamma_neumann: xi must be an n-vector");
    if (std::abs(z) <= rho)
        throw validation_error("gamma_neumann: |z| <= rho, series diverges");
    long t_max = 0;
    if (rho > 0.0) {
        double ratio = rho / std::abs(z);
        t_max = static_cast<long>(std::ceil(std::log(1e-12) / std::log(ratio))) + 1;
    }
    Eigen::VectorXcd cur = xi;
    Cplx acc = cur.sum();
    for (long t = 1; t <= t_max; ++t) {
        cur = (k_matrix.cast<Cplx>() * cur) / z;
        acc += cur.sum();
    }
    return acc;
}

namespace {

OverlapPrediction overlap_prediction_sbm(const SbmModel& spec) {
    SbmBasis basis = sbm_basis(spec);
    const double rho = std::abs(basis.nu[0]);
    const double theta = unweighted_threshold(rho);
    const index_t r0 = count_outliers(basis.nu, theta);
    OverlapPrediction out;
    if (r0 == 0) {
        out.empty = true;
        return out;
    }
    out.a.resize(r0, r0);
    out.b.resize(r0, r0);
    out.R.resize(r0);
    out.L.resize(r0);

    const int r = spec.r();
    auto side_fill = [&](const Eigen::MatrixXcd& vecs, const Eigen::VectorXd& w,
                         const Eigen::MatrixXd& mod, Eigen::MatrixXd& target,
                         Eigen::VectorXd& defects) {
        Eigen::VectorXd nrm2(r0); // <w, |vec_i|^2>
        for (index_t i = 0; i < r0; ++i)
            nrm2[i] = (w.array() * vecs.col(i).cwiseAbs2().array()).sum();
        for (index_t i = 0; i < r0; ++i) {
            Cplx nu2 = basis.nu[i] * basis.nu[i];
            Eigen::VectorXcd sq = vecs.col(i).array().square(); // entrywise, no conjugation
            Eigen::MatrixXcd lhs = nu2 * Eigen::MatrixXcd::Identity(r, r) - mod.cast<Cplx>();
            Eigen::VectorXcd resolved = lhs.partialPivLu().solve(sq);
            double ell1 = (w.array() * resolved.cwiseAbs().array()).sum();
            defects[i] = ell1 / nrm2[i];
            for (index_t j = 0; j < r0; ++j) {
                Cplx ip = (w.cast<Cplx>().array() * vecs.col(i).conjugate().array() *
                           vecs.col(j).array())
                              .sum();
                double overlap = std::abs(ip) / std::sqrt(nrm2[i] * nrm2[j]);
                target(i, j) = overlap / (std::abs(basis.nu[i]) * std::sqrt(defects[i]));
            }
        }
    };
    side_fill(basis.f, basis.p, basis.m_right, out.a, out.R);
    side_fill(basis.g, basis.q, basis.m_left, out.b, out.L);
    return out;
}

OverlapPrediction overlap_prediction_dense(const DenseModel& spec) {
    ExpectedSpectrum es = expected_spectrum_dense(spec);
    OverlapPrediction out;
    if (es.r0 == 0) {
        out.empty = true;
        return out;
    }
    const index_t n = spec.n();
    const index_t r0 = es.r0;
    Eigen::MatrixXd k = materialize_k(ModelSpec(spec));
    out.a.resize(r0, r0);
    out.b.resize(r0, r0);
    out.R.resize(r0);
    out.L.resize(r0);
    auto side_fill = [&](const Eigen::MatrixXcd& vecs, const Eigen::MatrixXd& k_side,
                         Eigen::MatrixXd& target, Eigen::VectorXd& defects) {
        for (index_t i = 0; i < r0; ++i) {
            Cplx nu2 = es.mu[i] * es.mu[i];
            Eigen::VectorXcd sq = vecs.col(i).array().square();
            Eigen::MatrixXcd lhs = nu2 * Eigen::MatrixXcd::Identity(n, n) - k_side.cast<Cplx>();
            Eigen::VectorXcd resolved = lhs.partialPivLu().solve(sq);
            defects[i] = resolved.cwiseAbs().sum(); // unit vectors: plain l1 norm
            for (index_t j = 0; j < r0; ++j) {
                double overlap = std::abs(vecs.col(i).dot(vecs.col(j)));
                target(i, j) = overlap / (std::abs(es.mu[i]) * std::sqrt(defects[i]));
            }
        }
    };
    side_fill(es.phi, k, out.a, out.R);
    side_fill(es.xi, k.transpose(), out.b, out.L);
    return out;
}

} // namespace

OverlapPrediction overlap_prediction(const ModelSpec& spec) {
    validate(spec);
    if (const auto* dense = std::get_if<DenseModel>(&spec))
        return overlap_prediction_dense(*dense);
    return overlap_prediction_sbm(std::get<SbmModel>(spec));
}

ToeplitzEigen tridiag_toeplitz_eigen(int r_blocks, double s, double eta) {
    if (r_blocks < 1) throw validation_error("tridiag_toeplitz_eigen: r_blocks must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
        throw validation_error(
            "tridiag_toeplitz_eigen: eta must lie strictly in (0,1); use the dense "
            "oracle for the boundary cases");
    const int r = r_blocks;
    ToeplitzEigen out;
    out.values.resize(r);
    out.right.resize(r, r);
    out.left.resize(r, r);
    const double root = std::sqrt(eta * (1.0 - eta));
    const double ratio = (1.0 - eta) / eta;
    for (int k = 1; k <= r; ++k) {
        out.values[k - 1] = s / 2.0 + 2.0 * s * std::cos(k * kPi / (r + 1)) * root;
        for (int j = 1; j <= r; ++j) {
            double angle = std::sin(static_cast<double>(k) * j * kPi / (r + 1));
            out.right(j - 1, k - 1) = std::pow(ratio, j / 2.0) * angle;
            out.left(j - 1, k - 1) = std::pow(1.0 / ratio, j / 2.0) * angle;
        }
        out.right.col(k - 1).normalize();
        out.left.col(k - 1).normalize();
        // Deterministic sign: largest-modulus entry positive.
        for (auto* m : {&out.right, &out.left}) {
            index_t arg = 0;
            m->col(k - 1).cwiseAbs().maxCoeff(&arg);
            if ((*m)(arg, k - 1) < 0.0) m->col(k - 1) *= -1.0;
        }
    }
    return out;
}

ThresholdCheck pathwise_detection_threshold(int r_blocks, double s, double eta) {
    if (r_blocks < 1) throw validation_error("pathwise_detection_threshold: bad r_blocks");
    if (!(eta >= 0.5 && eta <= 1.0))
        throw validation_error("pathwise_detection_threshold: eta must lie in [1/2, 1]");
    const double theta = 2.0 * std::sqrt(eta * (1.0 - eta));
    const int r = r_blocks;
    double min_sq = std::numeric_limits<double>::infinity();
    double c1 = std::cos(kPi / (r + 1));
    for (int k = 1; k <= r; ++k) {
        double term = 0.5 + std::cos(k * kPi / (r + 1)) * theta;
        min_sq = std::min(min_sq, term * term);
    }
    ThresholdCheck out;
    out.lhs = s / r;
    if (min_sq < 1e-14) {
        // Some eigenvalue vanishes (theta = -2 c_k); no finite s detects all.
        out.rhs = std::numeric_limits<double>::infinity();
        out.rhs_infinite = true;
        out.detect_all = false;
        return out;
    }
    out.rhs = (0.5 + c1 * theta) / min_sq;
    out.detect_all = out.lhs > out.rhs;
    return out;
}

double eta_threshold(double s) {
    if (!(s > 4.0))
        throw validation_error(
            "eta_threshold: defined only for s > 4 (below that no eta in [1/2,1] "
            "detects the second eigenvalue)");
    double x = 1.0 + (2.0 - 2.0 * std::sqrt(2.0 * s + 1.0)) / s;
    return (1.0 + std::sqrt(1.0 - x * x)) / 2.0;
}

double pathwise_mean_degree(int r_blocks, double s) {
    if (r_blocks < 2) throw validation_error("pathwise_mean_degree: r_blocks must be >= 2");
    double k = r_blocks;
    return (s / k) * (1.5 - 1.0 / (k * k));
}

double calibrate_s(int r_blocks, double d) {
    if (r_blocks < 2) throw validation_error("calibrate_s: r_blocks must be >= 2");
    double k = r_blocks;
    return k * d / (1.5 - 1.0 / (k * k));
}

LimitMoments limit_moments(const SbmModel& spec) {
    if (spec.sigma_left != spec.sigma_right)
        throw validation_error("limit_moments: unsupported for sigma_left != sigma_right");
    SbmBasis basis = sbm_basis(spec);
    const double theta = unweighted_threshold(std::abs(basis.nu[0]));
    const index_t r0 = count_outliers(basis.nu, theta);
    if (r0 < 1) throw validation_error("limit_moments: r0 must be >= 1");
    const int r = spec.r();
    double scale = std::abs(basis.nu[0]);
    for (index_t i = 0; i < r0; ++i)
        if (std::abs(basis.nu[i].imag()) > 1e-10 * scale ||
            basis.f.col(i).imag().cwiseAbs().maxCoeff() > 1e-10)
            throw numerical_error("limit_moments: complex outlier eigenpair not supported");

    LimitMoments out;
    out.mean.resize(r0, r);
    out.variance.resize(r0, r);
    out.gamma.resize(r0);
    for (index_t i = 0; i < r0; ++i) {
        double nu = basis.nu[i].real();
        Eigen::VectorXd f = basis.f.col(i).real();
        Eigen::VectorXd f_sq = f.array().square();
        Eigen::MatrixXd lhs =
            Eigen::MatrixXd::Identity(r, r) - basis.m_right / (nu * nu);
        Eigen::VectorXd w = lhs.partialPivLu().solve(f_sq);
        double pw = basis.p.dot(w);
        if (!(pw > 0.0)) throw numerical_error("limit_moments: nonpositive normalizer");
        out.gamma[i] = std::sqrt(pw);
        for (int j = 0; j < r; ++j) {
            double mean = f[j] / out.gamma[i];
            out.mean(i, j) = mean;
            out.variance(i, j) = w[j] / pw - mean * mean;
        }
    }
    return out;
}

TwoBlockReport two_block_report(double s, double eta) {
    if (!(s > 1.0)) throw validation_error("two_block_report: s must exceed 1");
    if (!(eta >= 0.5 && eta <= 1.0))
        throw validation_error("two_block_report: eta must lie in [1/2, 1]");
    TwoBlockReport out;
    out.theta = 2.0 * std::sqrt(eta * (1.0 - eta));
    out.nu1 = s * (1.0 + out.theta) / 4.0;
    out.nu2 = s * (1.0 - out.theta) / 4.0;
    out.vartheta = std::max(std::sqrt(out.nu1), 1.0);
    out.degenerate = std::abs(out.nu1 - out.nu2) < 1e-8 * std::abs(out.nu1);
    out.r0 = (out.nu1 > out.vartheta ? 1 : 0) + (out.nu2 > out.vartheta ? 1 : 0);

    const double th2 = out.theta * out.theta;
    out.a11_asymptotic = 1.0 - (2.0 / s) * (1.0 + th2) / ((1.0 + out.theta) * (1.0 + out.theta));
    out.a22_asymptotic = out.theta < 1.0
        ? 1.0 - (2.0 / s) * (1.0 + th2) / ((1.0 - out.theta) * (1.0 - out.theta))
        : std::numeric_limits<double>::quiet_NaN();

    auto exact_aii = [&](double nu) {
        Eigen::Matrix2d m;
        m << s / 4.0, s * eta / 2.0, s * (1.0 - eta) / 2.0, s / 4.0;
        Eigen::Vector2d f_sq(eta, 1.0 - eta);
        Eigen::Matrix2d lhs = Eigen::Matrix2d::Identity() - m / (nu * nu);
        Eigen::Vector2d w = lhs.partialPivLu().solve(f_sq);
        Eigen::Vector2d p(0.5, 0.5);
        return std::sqrt(p.dot(f_sq) / p.dot(w));
    };
    out.a11 = std::numeric_limits<double>::quiet_NaN();
    out.a22 = std::numeric_limits<double>::quiet_NaN();
    out.has_a22 = false;
    if (!out.degenerate && out.r0 >= 1) out.a11 = exact_aii(out.nu1);
    if (!out.degenerate && out.r0 == 2) {
        out.a22 = exact_aii(out.nu2);
        out.has_a22 = true;
    }
    return out;
}

} // namespace dispectral
