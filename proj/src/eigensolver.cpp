#include "dispectral/eigensolver.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace dispectral {

namespace {

using Cplx = std::complex<double>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Vec<Scalar> random_unit(index_t n, CounterRng& rng) {
    Vec<Scalar> v(n);
    for (index_t i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<Scalar, double>)
            v[i] = rng.normal();
        else
            v[i] = Cplx(rng.normal(), rng.normal());
    }
    double nrm = v.norm();
    if (nrm == 0.0) { v.setZero(); v[0] = Scalar(1); return v; }
    return v / nrm;
}

// Two-pass classical Gram-Schmidt of w against the first j columns of V;
// returns the accumulated coefficients.
template <typename Scalar>
Vec<Scalar> orthogonalize(const Mat<Scalar>& v, index_t j, Vec<Scalar>& w) {
    Vec<Scalar> c = Vec<Scalar>::Zero(j);
    for (int pass = 0; pass < 2; ++pass) {
        Vec<Scalar> proj = v.leftCols(j).adjoint() * w;
        w.noalias() -= v.leftCols(j) * proj;
        c += proj;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Krylov-Schur for real non-symmetric operators.
//
// Maintains the generalized Arnoldi decomposition  A V = V B + u b^T  with
// V orthonormal, u a unit residual direction orthogonal to V. Restarts
// compress V onto the invariant subspace of B spanned by the wanted Ritz
// vectors (conjugate pairs kept whole).
// ---------------------------------------------------------------------------

struct RitzPair {
    Cplx value;
    Eigen::VectorXcd vector; // unit, phase-fixed
    double residual;
};

struct KrylovSchurResult {
    std::vector<RitzPair> pairs; // sorted by decreasing modulus
    bool converged = false;
    double worst_residual = 0.0;
};

class KrylovSchur {
public:
    using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

    KrylovSchur(MatVec op, index_t n, index_t k, const SolverOptions& opts)
        : op_(std::move(op)), n_(n), k_(k), opts_(opts) {
        if (k < 1) throw validation_error("top_eigenpairs: k must be >= 1");
        if (k > n) throw validation_error("top_eigenpairs: k exceeds matrix dimension");
        m_ = opts.krylov_dim > 0 ? opts.krylov_dim : std::max<index_t>(2 * k + 10, 30);
        m_ = std::min(m_, n);
        if (m_ < k) m_ = k;
        v_.resize(n, m_);
        b_mat_ = Eigen::MatrixXd::Zero(m_, m_);
        b_vec_ = Eigen::VectorXd::Zero(m_);
        j_ = 0;
    }

    KrylovSchurResult run() {
        CounterRng rng(opts_.seed);
        u_ = random_unit<double>(n_, rng);
        KrylovSchurResult best;
        for (int restart = 0; restart <= opts_.max_restarts; ++restart) {
            expand(rng);
            KrylovSchurResult cur = extract();
            if (best.pairs.empty() || cur.worst_residual < best.worst_residual) best = cur;
            if (cur.converged) { best = cur; best.converged = true; return best; }
            if (j_ >= n_) break; // full space explored, nothing more to gain
            truncate();
        }
        return best;
    }

private:
    void expand(CounterRng& rng) {
        Eigen::VectorXd w(n_);
        while (j_ < m_) {
            v_.col(j_) = u_;
            op_(u_, w);
            double raw_norm = w.norm();
            Eigen::VectorXd c = orthogonalize<double>(v_, j_ + 1, w);
            double beta = w.norm();
            b_mat_.block(j_, 0, 1, j_) = b_vec_.head(j_).transpose();
            b_mat_.block(0, j_, j_ + 1, 1) = c;
            ++j_;
            b_vec_.setZero();
            if (beta <= std::max(1e-14 * raw_norm, 1e-300)) {
                // Invariant subspace found; continue in a fresh direction.
                if (j_ >= n_) { u_.setZero(); return; }
                Eigen::VectorXd f = random_unit<double>(n_, rng);
                orthogonalize<double>(v_, j_, f);
                double fn = f.norm();
                if (fn <= 1e-300) { u_.setZero(); return; }
                u_ = f / fn;
            } else {
                u_ = w / beta;
                b_vec_[j_ - 1] = beta;
            }
        }
    }

    // Ritz extraction with true-residual verification.
    KrylovSchurResult extract() {
        Eigen::EigenSolver<Eigen::MatrixXd> es(b_mat_.topLeftCorner(j_, j_), true);
        if (es.info() != Eigen::Success)
            throw numerical_error("top_eigenpairs: projected eigensolve failed");
        const Eigen::VectorXcd& thetas = es.eigenvalues();
        std::vector<int> order = modulus_order(thetas);
        double scale = std::max(std::abs(thetas[order[0]]), 1e-300);

        KrylovSchurResult out;
        std::vector<bool> consumed(j_, false);
        Eigen::VectorXd w_re(n_), w_im(n_);
        for (int oi = 0; oi < static_cast<int>(order.size()); ++oi) {
            int t = order[oi];
            if (consumed[t]) continue;
            if (static_cast<index_t>(out.pairs.size()) >= k_) break;
            consumed[t] = true;
            Eigen::VectorXcd y = es.eigenvectors().col(t);
            Eigen::VectorXcd z = v_.leftCols(j_) * y;
            z.normalize();
            fix_phase(z);
            RitzPair rp{thetas[t], z, true_residual(thetas[t], z, w_re, w_im)};
            out.pairs.push_back(rp);
            if (thetas[t].imag() != 0.0) {
                // Conjugate pairs are kept whole; this may push the count to
                // k+1 when the truncation boundary falls inside a pair.
                int partner = find_conjugate(thetas, consumed, t);
                if (partner >= 0) consumed[partner] = true;
                RitzPair cp{std::conj(rp.value), rp.vector.conjugate(), rp.residual};
                fix_phase(cp.vector);
                out.pairs.push_back(cp);
            }
        }
        std::sort(out.pairs.begin(), out.pairs.end(), [](const RitzPair& a, const RitzPair& b) {
            double ma = std::abs(a.value), mb = std::abs(b.value);
            if (ma != mb) return ma > mb;
            return a.value.imag() > b.value.imag();
        });
        out.worst_residual = 0.0;
        for (const auto& p : out.pairs) out.worst_residual = std::max(out.worst_residual, p.residual);
        out.converged = out.worst_residual <= opts_.tol * scale &&
                        static_cast<index_t>(out.pairs.size()) >= k_;
        return out;
    }

    static int find_conjugate(const Eigen::VectorXcd& thetas, const std::vector<bool>& consumed,
                              int t) {
        double best = -1.0;
        int arg = -1;
        for (int s = 0; s < thetas.size(); ++s) {
            if (consumed[s]) continue;
            double d = std::abs(thetas[s] - std::conj(thetas[t]));
            if (arg < 0 || d < best) { best = d; arg = s; }
        }
        if (arg >= 0 && best <= 1e-10 * std::max(std::abs(thetas[t]), 1e-300)) return arg;
        return -1;
    }

    double true_residual(Cplx theta, const Eigen::VectorXcd& z, Eigen::VectorXd& w_re,
                         Eigen::VectorXd& w_im) {
        Eigen::VectorXd zr = z.real(), zi = z.imag();
        op_(zr, w_re);
        op_(zi, w_im);
        Eigen::VectorXcd az = w_re.cast<Cplx>() + Cplx(0, 1) * w_im.cast<Cplx>();
        return (az - theta * z).norm();
    }

    void truncate() {
        Eigen::EigenSolver<Eigen::MatrixXd> es(b_mat_.topLeftCorner(j_, j_), true);
        if (es.info() != Eigen::Success)
            throw numerical_error("top_eigenpairs: projected eigensolve failed");
        const Eigen::VectorXcd& thetas = es.eigenvalues();
        std::vector<int> order = modulus_order(thetas);
        index_t keep_target = std::min<index_t>(k_ + (m_ - k_) / 2, std::max<index_t>(j_ - 1, 1));

        Eigen::MatrixXd w(j_, j_);
        index_t cols = 0;
        std::vector<bool> consumed(j_, false);
        for (int oi = 0; oi < static_cast<int>(order.size()) && cols < keep_target; ++oi) {
            int t = order[oi];
            if (consumed[t]) continue;
            consumed[t] = true;
            if (thetas[t].imag() == 0.0) {
                w.col(cols++) = es.eigenvectors().col(t).real();
            } else {
                if (cols + 2 > static_cast<index_t>(j_)) break;
                int partner = find_conjugate(thetas, consumed, t);
                if (partner >= 0) consumed[partner] = true;
                w.col(cols++) = es.eigenvectors().col(t).real();
                w.col(cols++) = es.eigenvectors().col(t).imag();
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(w.leftCols(cols));
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(j_, cols);

        v_.leftCols(cols) = (v_.leftCols(j_) * q).eval();
        b_mat_.topLeftCorner(cols, cols) =
            (q.transpose() * b_mat_.topLeftCorner(j_, j_) * q).eval();
        Eigen::VectorXd nb = q.transpose() * b_vec_.head(j_);
        b_vec_.setZero();
        b_vec_.head(cols) = nb;
        j_ = cols;
    }

    MatVec op_;
    index_t n_, k_, m_, j_;
    SolverOptions opts_;
    Eigen::MatrixXd v_;
    Eigen::MatrixXd b_mat_;
    Eigen::VectorXd b_vec_;
    Eigen::VectorXd u_;
};

// ---------------------------------------------------------------------------
// Thick-restart Lanczos for Hermitian operators (real symmetric included).
// The projected matrix stays real symmetric throughout; full
// reorthogonalization keeps the basis clean at these problem sizes.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct LanczosResult {
    Eigen::VectorXd values; // descending algebraic order
    Mat<Scalar> vectors;    // unit columns
    Eigen::VectorXd residuals;
    bool converged = false;
};

template <typename Scalar>
class ThickRestartLanczos {
public:
    using MatVec = std::function<void(const Vec<Scalar>&, Vec<Scalar>&)>;

    ThickRestartLanczos(MatVec op, index_t n, index_t k, const SolverOptions& opts)
        : op_(std::move(op)), n_(n), k_(k), opts_(opts) {
        if (k < 1) throw validation_error("lanczos: k must be >= 1");
        if (k > n) throw validation_error("lanczos: k exceeds matrix dimension");
        m_ = opts.krylov_dim > 0 ? opts.krylov_dim : std::max<index_t>(2 * k + 10, 30);
        m_ = std::min(m_, n);
        if (m_ < k) m_ = k;
        v_.resize(n, m_);
        t_mat_ = Eigen::MatrixXd::Zero(m_, m_);
        b_vec_ = Eigen::VectorXd::Zero(m_);
        j_ = 0;
    }

    LanczosResult<Scalar> run() {
        CounterRng rng(opts_.seed);
        u_ = random_unit<Scalar>(n_, rng);
        LanczosResult<Scalar> best;
        bool have_best = false;
        double best_worst = 0.0;
        for (int restart = 0; restart <= opts_.max_restarts; ++restart) {
            expand(rng);
            auto [cur, worst] = extract();
            if (!have_best || worst < best_worst) { best = cur; best_worst = worst; have_best = true; }
            if (cur.converged) return cur;
            if (j_ >= n_) break;
            truncate();
        }
        return best;
    }

private:
    void expand(CounterRng& rng) {
        Vec<Scalar> w(n_);
        while (j_ < m_) {
            v_.col(j_) = u_;
            op_(u_, w);
            double raw_norm = w.norm();
            Vec<Scalar> c = orthogonalize<Scalar>(v_, j_ + 1, w);
            double beta = w.norm();
            t_mat_.block(j_, 0, 1, j_) = b_vec_.head(j_).transpose();
            t_mat_.block(0, j_, j_, 1) = b_vec_.head(j_);
            t_mat_(j_, j_) = std::real(c[j_]);
            ++j_;
            b_vec_.setZero();
            if (beta <= std::max(1e-14 * raw_norm, 1e-300)) {
                if (j_ >= n_) { u_.setZero(); return; }
                Vec<Scalar> f = random_unit<Scalar>(n_, rng);
                orthogonalize<Scalar>(v_, j_, f);
                double fn = f.norm();
                if (fn <= 1e-300) { u_.setZero(); return; }
                u_ = f / fn;
            } else {
                u_ = w / beta;
                b_vec_[j_ - 1] = beta;
            }
        }
    }

    std::pair<LanczosResult<Scalar>, double> extract() {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat_.topLeftCorner(j_, j_));
        if (es.info() != Eigen::Success)
            throw numerical_error("lanczos: projected eigensolve failed");
        LanczosResult<Scalar> out;
        out.values.resize(k_);
        out.vectors.resize(n_, k_);
        out.residuals.resize(k_);
        double scale = std::max(std::abs(es.eigenvalues()[j_ - 1]),
                                std::abs(es.eigenvalues()[0]));
        scale = std::max(scale, 1e-300);
        Vec<Scalar> w(n_);
        double worst = 0.0;
        index_t avail = std::min(k_, j_);
        for (index_t i = 0; i < avail; ++i) {
            index_t src = j_ - 1 - i; // Eigen sorts ascending
            Vec<Scalar> z = v_.leftCols(j_) * es.eigenvectors().col(src);
            z.normalize();
            op_(z, w);
            double theta = es.eigenvalues()[src];
            out.values[i] = theta;
            out.residuals[i] = (w - Scalar(theta) * z).norm();
            out.vectors.col(i) = z;
            worst = std::max(worst, out.residuals[i]);
        }
        for (index_t i = avail; i < k_; ++i) { // only when j_ < k_, transient
            out.values[i] = 0.0;
            out.vectors.col(i).setZero();
            out.residuals[i] = scale;
            worst = scale;
        }
        out.converged = (avail == k_) && worst <= opts_.tol * scale;
        return {out, worst};
    }

    void truncate() {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat_.topLeftCorner(j_, j_));
        if (es.info() != Eigen::Success)
            throw numerical_error("lanczos: projected eigensolve failed");
        index_t keep = std::min<index_t>(k_ + (m_ - k_) / 2, std::max<index_t>(j_ - 1, 1));
        Eigen::MatrixXd y(j_, keep);
        Eigen::VectorXd theta(keep);
        for (index_t i = 0; i < keep; ++i) {
            y.col(i) = es.eigenvectors().col(j_ - 1 - i);
            theta[i] = es.eigenvalues()[j_ - 1 - i];
        }
        v_.leftCols(keep) = (v_.leftCols(j_) * y).eval();
        t_mat_.setZero();
        t_mat_.topLeftCorner(keep, keep).diagonal() = theta;
        Eigen::VectorXd nb = y.transpose() * b_vec_.head(j_);
        b_vec_.setZero();
        b_vec_.head(keep) = nb;
        j_ = keep;
    }

    MatVec op_;
    index_t n_, k_, m_, j_;
    SolverOptions opts_;
    Mat<Scalar> v_;
    Eigen::MatrixXd t_mat_; // projected matrix, real symmetric
    Eigen::VectorXd b_vec_;
    Vec<Scalar> u_;
};

std::string residual_report(const KrylovSchurResult& r) {
    std::ostringstream os;
    os << "best residuals:";
    for (const auto& p : r.pairs) os << ' ' << p.residual;
    return os.str();
}

} // namespace

EigenPairs top_eigenpairs(const SparseReal& a, index_t k, const SolverOptions& opts) {
    if (a.n_rows() != a.n_cols()) throw validation_error("top_eigenpairs: matrix must be square");
    const index_t n = a.n_rows();
    if (k > n) throw validation_error("top_eigenpairs: k exceeds matrix dimension");

    auto right_op = [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { a.multiply(x, y); };
    auto left_op = [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        a.multiply_transpose(x, y);
    };

    KrylovSchurResult right = KrylovSchur(right_op, n, k, opts).run();
    if (!right.converged)
        throw numerical_error("top_eigenpairs: no convergence after max restarts; " +
                              residual_report(right));
    const index_t kr = static_cast<index_t>(right.pairs.size());
    KrylovSchurResult left = KrylovSchur(left_op, n, kr, opts).run();
    if (!left.converged)
        throw numerical_error("top_eigenpairs: transpose run did not converge; " +
                              residual_report(left));

    Eigen::VectorXcd rv(kr), lv(left.pairs.size());
    for (index_t i = 0; i < kr; ++i) rv[i] = right.pairs[i].value;
    for (std::size_t i = 0; i < left.pairs.size(); ++i) lv[i] = left.pairs[i].value;
    double scale = std::max(std::abs(rv[0]), 1e-300);
    std::vector<int> match = match_eigenvalues(rv, lv, 1e-6 * scale);

    EigenPairs out;
    out.values.resize(kr);
    out.right.resize(n, kr);
    out.left.resize(n, kr);
    out.right_residuals.resize(kr);
    out.left_residuals.resize(kr);
    for (index_t i = 0; i < kr; ++i) {
        out.values[i] = right.pairs[i].value;
        out.right.col(i) = right.pairs[i].vector;
        out.right_residuals[i] = right.pairs[i].residual;
        out.left.col(i) = left.pairs[match[i]].vector;
        out.left_residuals[i] = left.pairs[match[i]].residual;
    }
    return out;
}

SpectrumScan top_eigenvalues(const SparseReal& a, index_t k, const SolverOptions& opts) {
    if (a.n_rows() != a.n_cols())
        throw validation_error("top_eigenvalues: matrix must be square");
    auto op = [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { a.multiply(x, y); };
    KrylovSchurResult res = KrylovSchur(op, a.n_rows(), k, opts).run();
    if (!res.converged)
        throw numerical_error("top_eigenvalues: no convergence after max restarts; " +
                              residual_report(res));
    SpectrumScan out;
    out.values.resize(res.pairs.size());
    out.residuals.resize(res.pairs.size());
    for (std::size_t i = 0; i < res.pairs.size(); ++i) {
        out.values[i] = res.pairs[i].value;
        out.residuals[i] = res.pairs[i].residual;
    }
    return out;
}

SvdTriplets top_svd(const SparseReal& a, index_t k, const SolverOptions& opts) {
    const index_t nc = a.n_cols();
    if (k < 1 || k > std::min(a.n_rows(), nc)) throw validation_error("top_svd: bad k");
    auto gram_op = [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        Eigen::VectorXd ax;
        a.multiply(x, ax);
        a.multiply_transpose(ax, y);
    };
    auto res = ThickRestartLanczos<double>(gram_op, nc, k, opts).run();
    if (!res.converged) throw numerical_error("top_svd: Lanczos did not converge");
    SvdTriplets out;
    out.singular_values.resize(k);
    out.right.resize(nc, k);
    out.left.resize(a.n_rows(), k);
    CounterRng rng(CounterRng::hash_combine(opts.seed, 0x5fd1)); // fill-in for null directions
    for (index_t i = 0; i < k; ++i) {
        double sigma = std::sqrt(std::max(res.values[i], 0.0));
        Eigen::VectorXd v = res.vectors.col(i);
        index_t arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        out.singular_values[i] = sigma;
        out.right.col(i) = v;
        if (sigma > 1e-12 * (out.singular_values[0] + 1e-300)) {
            Eigen::VectorXd av;
            a.multiply(v, av);
            out.left.col(i) = av / sigma;
        } else {
            // Null singular direction: deterministic orthonormal completion.
            Eigen::VectorXd f(a.n_rows());
            for (index_t r = 0; r < f.size(); ++r) f[r] = rng.normal();
            for (index_t p = 0; p < i; ++p) f -= out.left.col(p).dot(f) * out.left.col(p);
            out.left.col(i) = f.normalized();
        }
    }
    return out;
}

EigenPairs hermitian_extreme(const SparseComplex& h, Extreme which, index_t k,
                             const SolverOptions& opts) {
    if (h.n_rows() != h.n_cols())
        throw validation_error("hermitian_extreme: matrix must be square");
    const index_t n = h.n_rows();
    if (k < 1 || k > n) throw validation_error("hermitian_extreme: bad k");

    // Entrywise Hermiticity check at 1e-12.
    {
        const auto& rp = h.row_ptr();
        const auto& cols = h.col_indices();
        const auto& vals = h.values();
        for (index_t r = 0; r < n; ++r)
            for (index_t p = rp[r]; p < rp[r + 1]; ++p)
                if (std::abs(std::conj(h.entry(cols[p], r)) - vals[p]) > 1e-12)
                    throw validation_error("hermitian_extreme: input is not Hermitian");
    }

    // Gershgorin bounds for the spectral shift.
    double upper = 0.0, lower = 0.0;
    {
        const auto& rp = h.row_ptr();
        const auto& cols = h.col_indices();
        const auto& vals = h.values();
        bool first = true;
        for (index_t r = 0; r < n; ++r) {
            double diag = 0.0, radius = 0.0;
            for (index_t p = rp[r]; p < rp[r + 1]; ++p) {
                if (cols[p] == r)
                    diag = vals[p].real();
                else
                    radius += std::abs(vals[p]);
            }
            if (first) { upper = diag + radius; lower = diag - radius; first = false; }
            upper = std::max(upper, diag + radius);
            lower = std::min(lower, diag - radius);
        }
    }

    const double shift = which == Extreme::smallest ? upper : lower;
    auto op = [&h, which, shift](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        h.multiply(x, y);
        if (which == Extreme::smallest)
            y = shift * x - y;
        else
            y -= shift * x;
    };
    auto res = ThickRestartLanczos<Cplx>(op, n, k, opts).run();
    if (!res.converged) throw numerical_error("hermitian_extreme: Lanczos did not converge");

    EigenPairs out;
    out.values.resize(k);
    out.right.resize(n, k);
    out.right_residuals.resize(k);
    std::vector<int> idx(k);
    for (index_t i = 0; i < k; ++i) idx[i] = static_cast<int>(i);
    Eigen::VectorXd lambdas(k);
    for (index_t i = 0; i < k; ++i)
        lambdas[i] = which == Extreme::smallest ? shift - res.values[i] : res.values[i] + shift;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ma = std::abs(lambdas[a]), mb = std::abs(lambdas[b]);
        if (ma != mb) return ma > mb;
        return lambdas[a] > lambdas[b];
    });
    Eigen::VectorXcd w(n);
    for (index_t i = 0; i < k; ++i) {
        int s = idx[i];
        out.values[i] = lambdas[s];
        Eigen::VectorXcd z = res.vectors.col(s);
        fix_phase(z);
        out.right.col(i) = z;
        h.multiply(z, w);
        out.right_residuals[i] = (w - Cplx(lambdas[s]) * z).norm();
    }
    out.left = out.right;
    out.left_residuals = out.right_residuals;
    return out;
}

} // namespace dispectral
