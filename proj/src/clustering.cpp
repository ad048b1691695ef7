#include "dispectral/clustering.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dispectral {

Embedding embed(const EigenPairs& pairs, index_t r0) {
    if (r0 < 1) throw validation_error("embed: r0 must be >= 1");
    if (r0 > pairs.k())
        throw validation_error("embed: r0 exceeds the number of available eigenpairs");
    const index_t n = pairs.right.rows();

    // Column plan over the first r0 values; the same plan applies to the
    // left block since left/right pairs share eigenvalues.
    struct Col {
        index_t src;
        bool imag_part;
    };
    std::vector<Col> plan;
    std::ostringstream map;
    for (index_t i = 0; i < r0; ++i) {
        const auto v = pairs.values[i];
        if (v.imag() == 0.0) {
            plan.push_back({i, false});
            map << (i ? "; " : "") << "pair" << i + 1 << ":re";
            continue;
        }
        if (i > 0 && pairs.values[i - 1] == std::conj(v)) {
            map << "; pair" << i + 1 << ":conjugate-of-" << i << ",dropped";
            continue; // redundant partner
        }
        plan.push_back({i, false});
        plan.push_back({i, true});
        map << (i ? "; " : "") << "pair" << i + 1 << ":(re,im)";
    }

    Embedding out;
    out.r0 = r0;
    out.realification_map = map.str();
    out.points.resize(n, 2 * static_cast<index_t>(plan.size()));
    index_t c = 0;
    for (const auto& col : plan) {
        if (col.imag_part)
            out.points.col(c++) = pairs.right.col(col.src).imag();
        else
            out.points.col(c++) = pairs.right.col(col.src).real();
    }
    for (const auto& col : plan) {
        if (col.imag_part)
            out.points.col(c++) = pairs.left.col(col.src).imag();
        else
            out.points.col(c++) = pairs.left.col(col.src).real();
    }
    return out;
}

index_t estimate_r0(const Eigen::VectorXcd& values, double margin) {
    if (values.size() == 0) throw validation_error("estimate_r0: empty spectrum");
    double top = values.cwiseAbs().maxCoeff();
    double threshold = (1.0 + margin) * std::sqrt(top);
    index_t count = 0;
    for (index_t i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) > threshold) ++count;
    return count;
}

// --------------------------------------------------------------------------
// k-means
// --------------------------------------------------------------------------

namespace {

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& pts, int k, CounterRng& rng) {
    const index_t n = pts.rows();
    Eigen::MatrixXd centers(k, pts.cols());
    centers.row(0) = pts.row(static_cast<index_t>(rng.uniform_below(n)));
    Eigen::VectorXd dist2 =
        (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = dist2.sum();
        index_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform01() * total;
            double acc = 0.0;
            for (index_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= target) { pick = i; break; }
                pick = i;
            }
        } else {
            pick = static_cast<index_t>(rng.uniform_below(n));
        }
        centers.row(c) = pts.row(pick);
        dist2 = dist2.cwiseMin((pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

std::pair<std::vector<int>, double> lloyd(const Eigen::MatrixXd& pts, int k,
                                          Eigen::MatrixXd centers) {
    const index_t n = pts.rows();
    std::vector<int> labels(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        std::vector<index_t> counts(k, 0);
        for (index_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (pts.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (pts.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) { best_d = d; best = c; }
            }
            if (labels[i] != best) { labels[i] = best; changed = true; }
            ++counts[best];
        }
        // Empty-cluster repair: seed from the farthest point of the largest cluster.
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            int big = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                       counts.begin());
            index_t far_idx = 0;
            double far_d = -1.0;
            for (index_t i = 0; i < n; ++i) {
                if (labels[i] != big) continue;
                double d = (pts.row(i) - centers.row(big)).squaredNorm();
                if (d > far_d) { far_d = d; far_idx = i; }
            }
            centers.row(c) = pts.row(far_idx);
            labels[far_idx] = c;
            --counts[big];
            ++counts[c];
            changed = true;
        }
        if (!changed) break;
        centers.setZero();
        for (index_t i = 0; i < n; ++i) centers.row(labels[i]) += pts.row(i);
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
    }
    double cost = 0.0;
    for (index_t i = 0; i < n; ++i) cost += (pts.row(i) - centers.row(labels[i])).squaredNorm();
    return {std::move(labels), cost};
}

} // namespace

Partition kmeans_fit(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed) {
    const index_t n = points.rows();
    if (k < 1) throw validation_error("kmeans_fit: k must be >= 1");
    if (k > n) throw validation_error("kmeans_fit: k exceeds the number of points");
    if (restarts < 1) throw validation_error("kmeans_fit: restarts must be >= 1");
    std::vector<int> best_labels;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        CounterRng rng = CounterRng::derived(seed, static_cast<std::uint64_t>(r));
        auto [labels, cost] = lloyd(points, k, kmeanspp_centers(points, k, rng));
        if (cost < best_cost) {
            best_cost = cost;
            best_labels = std::move(labels);
        }
    }
    return Partition{std::move(best_labels), k};
}

double kmeans_cost(const Eigen::MatrixXd& points, const Partition& part) {
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(part.k, points.cols());
    std::vector<index_t> counts(part.k, 0);
    for (index_t i = 0; i < points.rows(); ++i) {
        centers.row(part.labels[i]) += points.row(i);
        ++counts[part.labels[i]];
    }
    for (int c = 0; c < part.k; ++c)
        if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
    double cost = 0.0;
    for (index_t i = 0; i < points.rows(); ++i)
        cost += (points.row(i) - centers.row(part.labels[i])).squaredNorm();
    return cost;
}

// --------------------------------------------------------------------------
// Gaussian mixture EM
// --------------------------------------------------------------------------

namespace {

struct GmmRun {
    GmmModel model;
    std::vector<int> labels;
    bool collapsed = false;
};

GmmRun gmm_single_run(const Eigen::MatrixXd& pts, int k, const GmmOptions& opts,
                      const Eigen::MatrixXd& pooled, double reg, CounterRng& rng) {
    const index_t n = pts.rows();
    const index_t dim = pts.cols();
    GmmRun run;
    GmmModel& m = run.model;
    m.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    m.means = kmeanspp_centers(pts, k, rng);
    m.covariances.assign(k, pooled + reg * Eigen::MatrixXd::Identity(dim, dim));

    Eigen::MatrixXd log_resp(n, k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    const double log2pi = std::log(2.0 * 3.14159265358979323846);
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // E step
        for (int c = 0; c < k; ++c) {
            Eigen::LLT<Eigen::MatrixXd> llt(m.covariances[c]);
            if (llt.info() != Eigen::Success) { run.collapsed = true; return run; }
            double logdet = 0.0;
            for (index_t d = 0; d < dim; ++d) logdet += 2.0 * std::log(llt.matrixL()(d, d));
            Eigen::MatrixXd centered = pts.rowwise() - m.means.row(c);
            Eigen::MatrixXd solved = llt.matrixL().solve(centered.transpose());
            Eigen::VectorXd quad = solved.colwise().squaredNorm();
            log_resp.col(c) = (-0.5 * (quad.array() + dim * log2pi + logdet) +
                               std::log(m.weights[c]))
                                  .matrix();
        }
        double ll = 0.0;
        for (index_t i = 0; i < n; ++i) {
            double mx = log_resp.row(i).maxCoeff();
            double sum = (log_resp.row(i).array() - mx).exp().sum();
            double log_norm = mx + std::log(sum);
            ll += log_norm;
            log_resp.row(i) = (log_resp.row(i).array() - log_norm).exp();
        }
        m.ll_trace.push_back(ll);
        // M step (log_resp now holds responsibilities)
        for (int c = 0; c < k; ++c) {
            double rc = log_resp.col(c).sum();
            if (rc < 1e-10) { run.collapsed = true; return run; }
            m.weights[c] = rc / static_cast<double>(n);
            m.means.row(c) = (log_resp.col(c).transpose() * pts) / rc;
            Eigen::MatrixXd centered = pts.rowwise() - m.means.row(c);
            m.covariances[c] =
                (centered.transpose() * log_resp.col(c).asDiagonal() * centered) / rc +
                reg * Eigen::MatrixXd::Identity(dim, dim);
        }
        m.log_likelihood = ll;
        if (std::abs(ll - prev_ll) <= opts.tol * std::max(1.0, std::abs(ll))) break;
        prev_ll = ll;
    }
    run.labels.resize(n);
    for (index_t i = 0; i < n; ++i) {
        int best = 0;
        log_resp.row(i).maxCoeff(&best);
        run.labels[i] = best;
    }
    return run;
}

} // namespace

std::pair<GmmModel, Partition> gmm_fit(const Eigen::MatrixXd& points, int k,
                                       const GmmOptions& opts) {
    const index_t n = points.rows();
    const index_t dim = points.cols();
    if (k < 1) throw validation_error("gmm_fit: k must be >= 1");
    if (n < static_cast<index_t>(k) * (dim + 1))
        throw validation_error("gmm_fit: need at least k*(dim+1) points");

    Eigen::RowVectorXd mean = points.colwise().mean();
    Eigen::MatrixXd centered = points.rowwise() - mean;
    Eigen::MatrixXd pooled = (centered.transpose() * centered) / static_cast<double>(n);
    // Sparse-regime embeddings carry atoms that can flatten a component;
    // the floor keeps every covariance invertible.
    double reg = 1e-6 * std::max(pooled.diagonal().mean(), 1e-12);

    bool have_best = false;
    GmmRun best;
    for (int r = 0; r < opts.restarts; ++r) {
        CounterRng rng = CounterRng::derived(opts.seed, static_cast<std::uint64_t>(r));
        GmmRun run = gmm_single_run(points, k, opts, pooled, reg, rng);
        if (run.collapsed) continue;
        if (!have_best || run.model.log_likelihood > best.model.log_likelihood) {
            best = std::move(run);
            have_best = true;
        }
    }
    if (!have_best)
        throw numerical_error("gmm_fit: every restart collapsed despite regularization");
    return {best.model, Partition{best.labels, k}};
}

// --------------------------------------------------------------------------
// Adjusted overlap (adjusted Rand index)
// --------------------------------------------------------------------------

double adjusted_overlap(const std::vector<int>& truth, const std::vector<int>& guess) {
    if (truth.size() != guess.size())
        throw validation_error("adjusted_overlap: partitions must have the same length");
    if (truth.empty()) throw validation_error("adjusted_overlap: empty partitions");
    int kt = *std::max_element(truth.begin(), truth.end()) + 1;
    int kg = *std::max_element(guess.begin(), guess.end()) + 1;
    for (int l : truth)
        if (l < 0) throw validation_error("adjusted_overlap: negative label");
    for (int l : guess)
        if (l < 0) throw validation_error("adjusted_overlap: negative label");

    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(kt, kg);
    for (std::size_t i = 0; i < truth.size(); ++i) table(truth[i], guess[i]) += 1.0;
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };

    double sum_cells = 0.0;
    for (int i = 0; i < kt; ++i)
        for (int j = 0; j < kg; ++j) sum_cells += choose2(table(i, j));
    double sum_rows = 0.0, sum_cols = 0.0;
    for (int i = 0; i < kt; ++i) sum_rows += choose2(table.row(i).sum());
    for (int j = 0; j < kg; ++j) sum_cols += choose2(table.col(j).sum());
    double total = choose2(static_cast<double>(truth.size()));

    double expected = sum_rows * sum_cols / total;
    double denom = 0.5 * (sum_rows + sum_cols) - expected;
    if (denom == 0.0) return 1.0; // both partitions trivial: agreement is perfect
    return (sum_cells - expected) / denom;
}

} // namespace dispectral
