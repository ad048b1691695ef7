#include "dispectral/baselines.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace dispectral {

namespace {

using Cplx = std::complex<double>;

// Sorts and sums duplicate coordinates (H and L accumulate contributions
// from both edge directions).
SparseComplex from_accumulated(index_t n, std::vector<Triplet<Cplx>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Triplet<Cplx>> merged;
    merged.reserve(t.size());
    for (const auto& e : t) {
        if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
            merged.back().value += e.value;
        else
            merged.push_back(e);
    }
    return SparseComplex::from_triplets(n, n, std::move(merged));
}

} // namespace

Partition svd_cluster(const SparseReal& a, int k, std::uint64_t seed,
                      const SolverOptions& solver) {
    if (a.n_rows() != a.n_cols()) throw validation_error("svd_cluster: matrix must be square");
    SolverOptions opts = solver;
    opts.seed = CounterRng::hash_combine(seed, 0x57d1);
    SvdTriplets svd = top_svd(a, k, opts);
    Eigen::MatrixXd points(a.n_rows(), 2 * k);
    points.leftCols(k) = svd.left;
    points.rightCols(k) = svd.right;
    return kmeans_fit(points, k, 10, CounterRng::hash_combine(seed, 0x57d2));
}

SimpleHermMatrices build_simpleherm(const SparseReal& a, int k) {
    if (a.n_rows() != a.n_cols())
        throw validation_error("build_simpleherm: matrix must be square");
    if (k < 1) throw validation_error("build_simpleherm: k must be >= 1");
    const index_t n = a.n_rows();
    SimpleHermMatrices out;
    out.omega_order = static_cast<int>(std::ceil(2.0 * 3.14159265358979323846 * k));
    const Cplx omega = std::polar(1.0, 2.0 * 3.14159265358979323846 / out.omega_order);

    const auto& rp = a.row_ptr();
    const auto& cols = a.col_indices();
    const auto& vals = a.values();

    std::vector<Triplet<Cplx>> h_entries;
    h_entries.reserve(2 * vals.size());
    for (index_t x = 0; x < n; ++x)
        for (index_t p = rp[x]; p < rp[x + 1]; ++p) {
            h_entries.push_back({x, cols[p], omega * vals[p]});
            h_entries.push_back({cols[p], x, std::conj(omega) * vals[p]});
        }
    out.h = from_accumulated(n, std::move(h_entries));

    // Total degree = out-edges + in-edges (counts, weights pass through H only).
    std::vector<double> degree(n, 0.0);
    for (index_t x = 0; x < n; ++x)
        for (index_t p = rp[x]; p < rp[x + 1]; ++p) {
            degree[x] += 1.0;
            degree[cols[p]] += 1.0;
        }
    std::vector<double> inv_sqrt(n, 0.0);
    for (index_t x = 0; x < n; ++x)
        if (degree[x] > 0.0) inv_sqrt[x] = 1.0 / std::sqrt(degree[x]);

    std::vector<Triplet<Cplx>> l_entries;
    l_entries.reserve(out.h.nnz() + n);
    for (index_t x = 0; x < n; ++x) l_entries.push_back({x, x, Cplx(1.0, 0.0)});
    const auto& hrp = out.h.row_ptr();
    const auto& hcols = out.h.col_indices();
    const auto& hvals = out.h.values();
    for (index_t x = 0; x < n; ++x)
        for (index_t p = hrp[x]; p < hrp[x + 1]; ++p)
            l_entries.push_back({x, hcols[p], -hvals[p] * inv_sqrt[x] * inv_sqrt[hcols[p]]});
    out.laplacian = from_accumulated(n, std::move(l_entries));
    return out;
}

HermitianEmbedding simpleherm_embedding(const SparseReal& a, int k,
                                        const SolverOptions& solver) {
    SimpleHermMatrices mats = build_simpleherm(a, k);
    EigenPairs pairs = hermitian_extreme(mats.laplacian, Extreme::smallest, 1, solver);
    HermitianEmbedding out;
    out.omega_order = mats.omega_order;
    out.eigenvalue = pairs.values[0].real();
    out.points.resize(a.n_rows(), 2);
    out.points.col(0) = pairs.right.col(0).real();
    out.points.col(1) = pairs.right.col(0).imag();
    return out;
}

Partition simpleherm_cluster(const SparseReal& a, int k, std::uint64_t seed,
                             const SolverOptions& solver, bool normalize_rows) {
    SolverOptions opts = solver;
    opts.seed = CounterRng::hash_combine(seed, 0x4e31);
    HermitianEmbedding emb = simpleherm_embedding(a, k, opts);
    Eigen::MatrixXd points = emb.points;
    if (normalize_rows) {
        for (index_t i = 0; i < points.rows(); ++i) {
            double nrm = points.row(i).norm();
            if (nrm > 0.0) points.row(i) /= nrm;
        }
    }
    return kmeans_fit(points, k, 10, CounterRng::hash_combine(seed, 0x4e32));
}

} // namespace dispectral
