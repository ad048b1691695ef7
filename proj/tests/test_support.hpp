#pragma once

#include "dispectral/csr_matrix.hpp"
#include "dispectral/model.hpp"
#include "dispectral/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dispectral::testing {

// Random sparse matrix with iid entry presence `density` and weights in
// [0.2, 1.2]; the positive weights keep the Perron root simple.
inline SparseReal random_sparse(index_t n, double density, CounterRng& rng) {
    std::vector<Triplet<double>> entries;
    for (index_t x = 0; x < n; ++x)
        for (index_t y = 0; y < n; ++y)
            if (rng.uniform01() < density) entries.push_back({x, y, rng.uniform(0.2, 1.2)});
    return SparseReal::from_triplets(n, n, std::move(entries));
}

// Reference sampler: per-entry Bernoulli on the exact edge probabilities.
// Distributional oracle for the blockwise sampler.
inline SparseReal naive_bernoulli_sample(const SbmModel& spec, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Triplet<double>> entries;
    for (index_t x = 0; x < spec.n; ++x)
        for (index_t y = 0; y < spec.n; ++y)
            if (rng.uniform01() < spec.edge_probability(x, y)) entries.push_back({x, y, 1.0});
    return SparseReal::from_triplets(spec.n, spec.n, std::move(entries));
}

// Regularized upper incomplete gamma Q(a, x) (series / continued fraction),
// enough for chi-square p-values.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

// Chi-square goodness-of-fit p-value for observed counts against expected
// frequencies; bins with expected < 5 must be merged by the caller.
inline double chi_square_pvalue(const std::vector<double>& observed,
                                const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    double df = static_cast<double>(observed.size()) - 1.0;
    return gamma_q(df / 2.0, stat / 2.0);
}

} // namespace dispectral::testing
