#include "dispectral/pipeline.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <algorithm>

namespace dispectral {

Method method_from_string(const std::string& name) {
    if (name == "gmm") return Method::gmm;
    if (name == "kmeans") return Method::kmeans;
    if (name == "svd") return Method::svd;
    if (name == "simpleherm") return Method::simpleherm;
    throw validation_error("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
    case Method::gmm: return "gmm";
    case Method::kmeans: return "kmeans";
    case Method::svd: return "svd";
    case Method::simpleherm: return "simpleherm";
    }
    return "?";
}

namespace {

std::pair<Partition, ClusterDiagnostics> eigen_pipeline(const SparseReal& a, int k,
                                                        Method method, std::uint64_t seed,
                                                        const ClusterOptions& opts) {
    const index_t n = a.n_rows();
    ClusterDiagnostics diag;

    index_t r0 = opts.r0;
    Eigen::VectorXcd scan_values;
    if (r0 < 0) {
        // Bulk-edge scan with a loose tolerance: only the moduli matter here.
        index_t k_scan = std::min<index_t>(std::max<index_t>(k + 2, 8), n);
        SolverOptions scan_opts = opts.solver;
        scan_opts.tol = std::max(scan_opts.tol, 1e-6);
        scan_opts.seed = CounterRng::hash_combine(seed, 0xa001);
        SpectrumScan scan = top_eigenvalues(a, k_scan, scan_opts);
        scan_values = scan.values;
        r0 = estimate_r0(scan.values, opts.r0_margin);
        if (r0 < 1) r0 = 1; // always keep the Perron direction
        r0 = std::min(r0, k_scan);
    }
    if (r0 > n) throw validation_error("cluster_digraph: r0 exceeds matrix dimension");

    SolverOptions solve_opts = opts.solver;
    solve_opts.seed = CounterRng::hash_combine(seed, 0xa002);
    EigenPairs pairs = top_eigenpairs(a, r0, solve_opts);
    diag.eigenvalues = scan_values.size() > 0 ? scan_values : pairs.values;
    diag.residuals = pairs.right_residuals;
    diag.r0_used = r0;

    Embedding emb = embed(pairs, r0);
    diag.realification_map = emb.realification_map;

    Partition part;
    if (method == Method::gmm) {
        GmmOptions gopts;
        gopts.restarts = opts.restarts;
        gopts.seed = CounterRng::hash_combine(seed, 0xa003);
        auto [model, labels] = gmm_fit(emb.points, k, gopts);
        diag.fit_score = model.log_likelihood;
        part = std::move(labels);
    } else {
        part = kmeans_fit(emb.points, k, opts.restarts,
                          CounterRng::hash_combine(seed, 0xa004));
        diag.fit_score = kmeans_cost(emb.points, part);
    }
    return {std::move(part), std::move(diag)};
}

} // namespace

std::pair<Partition, ClusterDiagnostics> cluster_digraph(const SparseReal& a, int k,
                                                         Method method, std::uint64_t seed,
                                                         const ClusterOptions& opts) {
    if (a.n_rows() != a.n_cols())
        throw validation_error("cluster_digraph: matrix must be square");
    if (k < 1) throw validation_error("cluster_digraph: k must be >= 1");

    switch (method) {
    case Method::gmm:
    case Method::kmeans:
        return eigen_pipeline(a, k, method, seed, opts);
    case Method::svd: {
        ClusterDiagnostics diag;
        SvdTriplets svd = top_svd(a, k, [&] {
            SolverOptions o = opts.solver;
            o.seed = CounterRng::hash_combine(seed, 0x57d1);
            return o;
        }());
        diag.eigenvalues = svd.singular_values.cast<std::complex<double>>();
        diag.r0_used = k;
        Eigen::MatrixXd points(a.n_rows(), 2 * k);
        points.leftCols(k) = svd.left;
        points.rightCols(k) = svd.right;
        Partition part =
            kmeans_fit(points, k, opts.restarts, CounterRng::hash_combine(seed, 0x57d2));
        diag.fit_score = kmeans_cost(points, part);
        return {std::move(part), std::move(diag)};
    }
    case Method::simpleherm: {
        ClusterDiagnostics diag;
        SolverOptions o = opts.solver;
        o.seed = CounterRng::hash_combine(seed, 0x4e31);
        HermitianEmbedding emb = simpleherm_embedding(a, k, o);
        diag.eigenvalues = Eigen::VectorXcd::Constant(1, emb.eigenvalue);
        diag.r0_used = 1;
        Eigen::MatrixXd points = emb.points;
        if (opts.normalize_embedding) {
            for (index_t i = 0; i < points.rows(); ++i) {
                double nrm = points.row(i).norm();
                if (nrm > 0.0) points.row(i) /= nrm;
            }
        }
        Partition part =
            kmeans_fit(points, k, opts.restarts, CounterRng::hash_combine(seed, 0x4e32));
        diag.fit_score = kmeans_cost(points, part);
        return {std::move(part), std::move(diag)};
    }
    }
    throw validation_error("cluster_digraph: unknown method");
}

} // namespace dispectral
