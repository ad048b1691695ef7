#include "dispectral/csr_matrix.hpp"
#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace dispectral;

TEST_CASE("counter rng streams are deterministic and independent") {
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool differs = false;
    CounterRng a2(42);
    for (int i = 0; i < 100; ++i) differs |= (a2.next_u64() != c.next_u64());
    CHECK(differs);
    CHECK(CounterRng::hash_combine(1, 2) != CounterRng::hash_combine(2, 1));
    CHECK(CounterRng::hash_combine(1, 2) == CounterRng::hash_combine(1, 2));
}

TEST_CASE("uniform_below stays in range and covers values") {
    CounterRng rng(7);
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 10000; ++i) {
        auto v = rng.uniform_below(10);
        REQUIRE(v < 10);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
}

TEST_CASE("poisson sampler matches mean and variance across regimes") {
    CounterRng rng(11);
    for (double lambda : {0.5, 4.0, 60.0, 4000.0}) {
        const int n = 40000;
        double mean = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = rng.poisson(lambda);
            mean += v;
            m2 += v * v;
        }
        mean /= n;
        double var = m2 / n - mean * mean;
        double se = std::sqrt(lambda / n);
        CHECK(std::fabs(mean - lambda) < 5 * se);
        CHECK(std::fabs(var - lambda) < 0.1 * lambda + 5 * lambda * std::sqrt(2.0 / n));
    }
}

TEST_CASE("binomial sampler matches mean and variance") {
    CounterRng rng(13);
    const std::uint64_t trials = 5000;
    const double p = 0.0021;
    const int n = 30000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = static_cast<double>(rng.binomial(trials, p));
        mean += v;
        m2 += v * v;
    }
    mean /= n;
    double var = m2 / n - mean * mean;
    double expect_mean = trials * p;
    double expect_var = trials * p * (1 - p);
    CHECK(std::fabs(mean - expect_mean) < 5 * std::sqrt(expect_var / n));
    CHECK(std::fabs(var - expect_var) / expect_var < 0.1);
    CHECK(rng.binomial(10, 0.0) == 0);
    CHECK(rng.binomial(10, 1.0) == 10);
}

TEST_CASE("csr construction enforces the invariants") {
    auto m = SparseReal::from_triplets(3, 3, {{2, 1, 4.0}, {0, 2, 1.0}, {0, 0, 2.0}, {1, 1, 0.0}});
    CHECK(m.nnz() == 3); // explicit zero dropped
    // strictly increasing columns within each row
    const auto& rp = m.row_ptr();
    const auto& cols = m.col_indices();
    for (index_t r = 0; r < m.n_rows(); ++r)
        for (index_t p = rp[r] + 1; p < rp[r + 1]; ++p) CHECK(cols[p - 1] < cols[p]);
    CHECK(m.entry(0, 0) == 2.0);
    CHECK(m.entry(0, 2) == 1.0);
    CHECK(m.entry(1, 1) == 0.0);
    CHECK_THROWS_AS(SparseReal::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}),
                    validation_error);
    CHECK_THROWS_AS(SparseReal::from_triplets(2, 2, {{0, 5, 1.0}}), validation_error);
}

TEST_CASE("transpose round-trips entrywise") {
    CounterRng rng(3);
    std::vector<Triplet<double>> t;
    for (int i = 0; i < 40; ++i)
        t.push_back({static_cast<index_t>(rng.uniform_below(12)),
                     static_cast<index_t>(rng.uniform_below(9)), rng.uniform01() + 0.1});
    std::sort(t.begin(), t.end(), [](auto& a, auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    t.erase(std::unique(t.begin(), t.end(),
                        [](auto& a, auto& b) { return a.row == b.row && a.col == b.col; }),
            t.end());
    auto m = SparseReal::from_triplets(12, 9, t);
    CHECK(m.transposed().transposed().entrywise_equal(m));

    // matvec against the dense form
    Eigen::VectorXd x(9);
    for (int i = 0; i < 9; ++i) x[i] = rng.normal();
    Eigen::VectorXd y, yt;
    m.multiply(x, y);
    CHECK((y - m.to_dense() * x).norm() < 1e-13);
    Eigen::VectorXd z(12);
    for (int i = 0; i < 12; ++i) z[i] = rng.normal();
    m.multiply_transpose(z, yt);
    CHECK((yt - m.to_dense().transpose() * z).norm() < 1e-13);

    TransposeView view(m);
    Eigen::VectorXd yv;
    view.multiply(z, yv);
    CHECK((yv - yt).norm() == 0.0);
}

TEST_CASE("edge list io round-trips bit-exactly") {
    CounterRng rng(9);
    std::vector<Triplet<double>> t;
    for (index_t x = 0; x < 6; ++x)
        for (index_t y = 0; y < 6; ++y)
            if (rng.uniform01() < 0.4) t.push_back({x, y, rng.normal() * 1e-3});
    auto m = SparseReal::from_triplets(6, 6, t);
    auto path = std::filesystem::temp_directory_path() / "dispectral_edges_test.tsv";
    write_edgelist(path.string(), m);
    auto back = read_edgelist(path.string());
    CHECK(back.entrywise_equal(m));
    std::filesystem::remove(path);

    auto mpath = std::filesystem::temp_directory_path() / "dispectral_members_test.txt";
    std::vector<int> labels{0, 1, 1, 0, 2};
    write_memberships(mpath.string(), labels);
    CHECK(read_memberships(mpath.string()) == labels);
    std::filesystem::remove(mpath);
}
