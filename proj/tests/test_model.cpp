#include "dispectral/model.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dispectral;
using namespace dispectral::testing;

TEST_CASE("pathwise connectivity matrices") {
    SUBCASE("two blocks") {
        auto m = pathwise_spec(2, 10.0, 0.9, 20);
        Eigen::MatrixXd expect(2, 2);
        expect << 5.0, 9.0, 1.0, 5.0;
        CHECK((m.F - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("eta = 1/2 is symmetric") {
        auto m = pathwise_spec(4, 7.0, 0.5, 40);
        CHECK((m.F - m.F.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("three blocks, direct substitution") {
        auto m = pathwise_spec(3, 6.0, 0.8, 30);
        Eigen::MatrixXd expect(3, 3);
        expect << 3.0, 4.8, 0.0, 1.2, 3.0, 4.8, 0.0, 1.2, 3.0;
        CHECK((m.F - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("divisibility is enforced") {
        CHECK_THROWS_AS(pathwise_spec(3, 6.0, 0.8, 31), validation_error);
    }
    SUBCASE("clusters are contiguous equal ranges") {
        auto m = pathwise_spec(4, 5.0, 0.7, 16);
        for (index_t x = 0; x < 16; ++x) CHECK(m.sigma_left[x] == x / 4);
        CHECK(m.sigma_left == m.sigma_right);
    }
}

TEST_CASE("sampling edge cases") {
    SUBCASE("zero probability gives the empty matrix") {
        DenseModel m{Eigen::MatrixXd::Zero(5, 5), Eigen::MatrixXd::Ones(5, 5)};
        CHECK(sample(ModelSpec(m), 1).nnz() == 0);
    }
    SUBCASE("probability one gives the full deterministic matrix") {
        Eigen::MatrixXd w(3, 3);
        for (index_t x = 0; x < 3; ++x)
            for (index_t y = 0; y < 3; ++y) w(x, y) = static_cast<double>(x + y + 2);
        DenseModel m{Eigen::MatrixXd::Ones(3, 3), w};
        auto a = sample(ModelSpec(m), 5);
        CHECK(a.nnz() == 9);
        for (index_t x = 0; x < 3; ++x)
            for (index_t y = 0; y < 3; ++y) CHECK(a.entry(x, y) == w(x, y));
    }
    SUBCASE("invalid probability is rejected") {
        Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 1.5);
        DenseModel m{p, Eigen::MatrixXd::Ones(2, 2)};
        CHECK_THROWS_AS(sample(ModelSpec(m), 1), validation_error);
    }
}

TEST_CASE("sbm edge count concentrates on the exact expectation") {
    auto spec = pathwise_spec(2, 10.0, 0.9, 2000);
    double expect = expected_edge_count(ModelSpec(spec));
    // blocks of 1000x1000 at probabilities {5,9,1,5}/2000
    CHECK(expect == doctest::Approx(10000.0).epsilon(1e-12));
    auto a = sample(ModelSpec(spec), 2024);
    CHECK(std::fabs(static_cast<double>(a.nnz()) - expect) <= 4.0 * std::sqrt(expect));
}

TEST_CASE("sampler determinism") {
    auto spec = pathwise_spec(2, 8.0, 0.8, 400);
    auto a = sample(ModelSpec(spec), 99);
    auto b = sample(ModelSpec(spec), 99);
    auto c = sample(ModelSpec(spec), 100);
    CHECK(a.entrywise_equal(b));
    CHECK_FALSE(a.entrywise_equal(c));
}

TEST_CASE("dense sampler is unbiased per entry") {
    Eigen::MatrixXd p(4, 4);
    CounterRng setup(5);
    for (index_t x = 0; x < 4; ++x)
        for (index_t y = 0; y < 4; ++y) p(x, y) = setup.uniform(0.05, 0.95);
    DenseModel m{p, Eigen::MatrixXd::Ones(4, 4)};
    const int n_samples = 10000;
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(4, 4);
    for (int s = 0; s < n_samples; ++s) {
        auto a = sample(ModelSpec(m), 7000 + s);
        for (index_t x = 0; x < 4; ++x)
            for (index_t y = 0; y < 4; ++y)
                if (a.entry(x, y) != 0.0) freq(x, y) += 1.0;
    }
    freq /= n_samples;
    for (index_t x = 0; x < 4; ++x)
        for (index_t y = 0; y < 4; ++y) {
            double tol = 4.0 * std::sqrt(p(x, y) * (1 - p(x, y)) / n_samples);
            CHECK(std::fabs(freq(x, y) - p(x, y)) <= tol);
        }
}

TEST_CASE("blockwise sampler agrees in distribution with naive Bernoulli") {
    // 3x3-block model; per-block edge counts are Binomial(cells, F_ij/n).
    SbmModel spec;
    spec.n = 30;
    spec.F.resize(3, 3);
    spec.F << 6.0, 2.0, 1.0, 3.0, 5.0, 2.0, 1.0, 2.0, 7.0;
    spec.sigma_left.resize(30);
    for (index_t x = 0; x < 30; ++x) spec.sigma_left[x] = static_cast<int>(x / 10);
    spec.sigma_right = spec.sigma_left;

    const int n_samples = 600;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double p = spec.F(i, j) / 30.0;
            std::vector<double> pmf(101, 0.0); // Binomial(100, p)
            double logp = std::log(p), logq = std::log1p(-p);
            for (int c = 0; c <= 100; ++c)
                pmf[c] = std::exp(std::lgamma(101.0) - std::lgamma(c + 1.0) -
                                  std::lgamma(101.0 - c) + c * logp + (100 - c) * logq);
            std::vector<double> counts(101, 0.0);
            for (int s = 0; s < n_samples; ++s) {
                auto a = sample(ModelSpec(spec), 31000 + s);
                int edges = 0;
                const auto& rp = a.row_ptr();
                const auto& cols = a.col_indices();
                for (index_t x = 0; x < 30; ++x) {
                    if (spec.sigma_left[x] != i) continue;
                    for (index_t e = rp[x]; e < rp[x + 1]; ++e)
                        if (spec.sigma_right[cols[e]] == j) ++edges;
                }
                counts[std::min(edges, 100)] += 1.0;
            }
            // merge bins until every expected count is >= 5
            std::vector<double> obs, exp_counts;
            double acc_o = 0.0, acc_e = 0.0;
            for (int c = 0; c <= 100; ++c) {
                acc_o += counts[c];
                acc_e += pmf[c] * n_samples;
                if (acc_e >= 5.0) {
                    obs.push_back(acc_o);
                    exp_counts.push_back(acc_e);
                    acc_o = acc_e = 0.0;
                }
            }
            if (!exp_counts.empty()) {
                obs.back() += acc_o;
                exp_counts.back() += acc_e;
            }
            if (obs.size() < 2) continue;
            CHECK(chi_square_pvalue(obs, exp_counts) > 0.001);
        }
}

TEST_CASE("q and k accessors match the dense definitions") {
    CounterRng rng(17);
    SbmModel spec;
    spec.n = 50;
    spec.F.resize(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) spec.F(i, j) = rng.uniform(0.5, 8.0);
    spec.sigma_left.resize(50);
    spec.sigma_right.resize(50);
    for (index_t x = 0; x < 50; ++x) {
        spec.sigma_left[x] = static_cast<int>(rng.uniform_below(3));
        spec.sigma_right[x] = static_cast<int>(rng.uniform_below(3));
    }
    auto q = materialize_q(ModelSpec(spec));
    auto k = materialize_k(ModelSpec(spec));
    for (index_t x = 0; x < 50; ++x)
        for (index_t y = 0; y < 50; ++y) {
            double expect = spec.F(spec.sigma_left[x], spec.sigma_right[y]) / 50.0;
            CHECK(q(x, y) == doctest::Approx(expect).epsilon(1e-14));
            CHECK(k(x, y) == doctest::Approx(expect).epsilon(1e-14)); // unweighted: K = Q
        }
}

TEST_CASE("sbm summary identities") {
    SUBCASE("balanced two blocks") {
        auto spec = pathwise_spec(2, 10.0, 0.9, 100);
        auto s = sbm_summary(spec);
        CHECK(s.p.sum() == doctest::Approx(1.0));
        CHECK(s.q.sum() == doctest::Approx(1.0));
        CHECK(s.Pi.sum() == doctest::Approx(1.0));
        Eigen::MatrixXd half = Eigen::MatrixXd::Identity(2, 2) * 0.5;
        CHECK((s.Pi - half).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.modularity - spec.F / 2.0).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("two blocks with proportions 2/3, 1/3") {
        SbmModel spec;
        spec.n = 90;
        spec.F.resize(2, 2);
        spec.F << 6.0, 4.0, 5.0, 3.0;
        spec.sigma_left.assign(90, 1);
        for (index_t x = 0; x < 60; ++x) spec.sigma_left[x] = 0;
        spec.sigma_right = spec.sigma_left;
        auto s = sbm_summary(spec);
        Eigen::MatrixXd expect(2, 2);
        expect << 4.0, 4.0 / 3.0, 10.0 / 3.0, 1.0;
        CHECK((s.modularity - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("asymmetric memberships: Pi counts intersections, rows sum to q") {
        CounterRng rng(23);
        SbmModel spec;
        spec.n = 40;
        spec.F = Eigen::MatrixXd::Constant(3, 3, 2.0);
        spec.sigma_left.resize(40);
        spec.sigma_right.resize(40);
        for (index_t x = 0; x < 40; ++x) {
            spec.sigma_left[x] = static_cast<int>(rng.uniform_below(3));
            spec.sigma_right[x] = static_cast<int>(rng.uniform_below(3));
        }
        auto s = sbm_summary(spec);
        // brute-force intersection counts
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int count = 0;
                for (index_t x = 0; x < 40; ++x)
                    if (spec.sigma_left[x] == j && spec.sigma_right[x] == i) ++count;
                CHECK(s.Pi(i, j) == doctest::Approx(count / 40.0));
            }
        for (int i = 0; i < 3; ++i)
            CHECK(s.Pi.row(i).sum() == doctest::Approx(s.q[i]));
    }
}
