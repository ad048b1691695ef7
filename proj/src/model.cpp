#include "dispectral/model.hpp"

#include "dispectral/rng.hpp"

#include <cmath>
#include <unordered_set>

namespace dispectral {

namespace {

void validate_dense(const DenseModel& m) {
    if (m.P.rows() != m.P.cols()) throw validation_error("DenseModel: P must be square");
    if (m.W.rows() != m.P.rows() || m.W.cols() != m.P.cols())
        throw validation_error("DenseModel: W must match P");
    for (index_t x = 0; x < m.P.rows(); ++x)
        for (index_t y = 0; y < m.P.cols(); ++y)
            if (!(m.P(x, y) >= 0.0 && m.P(x, y) <= 1.0))
                throw validation_error("DenseModel: probability outside [0,1]");
}

void validate_sbm(const SbmModel& m) {
    if (m.n <= 0) throw validation_error("SbmModel: n must be positive");
    if (m.F.rows() != m.F.cols() || m.F.rows() == 0)
        throw validation_error("SbmModel: F must be square and nonempty");
    if (m.sigma_left.size() != static_cast<std::size_t>(m.n) ||
        m.sigma_right.size() != static_cast<std::size_t>(m.n))
        throw validation_error("SbmModel: membership length must equal n");
    const int r = m.r();
    double fmax = 0.0;
    for (index_t i = 0; i < r; ++i)
        for (index_t j = 0; j < r; ++j) {
            if (!(m.F(i, j) >= 0.0)) throw validation_error("SbmModel: F entries must be >= 0");
            fmax = std::max(fmax, m.F(i, j));
        }
    if (fmax > static_cast<double>(m.n))
        throw validation_error("SbmModel: max(F)/n exceeds 1");
    for (int s : m.sigma_left)
        if (s < 0 || s >= r) throw validation_error("SbmModel: left membership out of range");
    for (int s : m.sigma_right)
        if (s < 0 || s >= r) throw validation_error("SbmModel: right membership out of range");
}

std::vector<std::vector<index_t>> cluster_members(const std::vector<int>& sigma, int r) {
    std::vector<std::vector<index_t>> members(r);
    for (std::size_t x = 0; x < sigma.size(); ++x)
        members[sigma[x]].push_back(static_cast<index_t>(x));
    return members;
}

} // namespace

void validate(const ModelSpec& spec) {
    std::visit([](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>)
            validate_dense(m);
        else
            validate_sbm(m);
    }, spec);
}

SbmSummary sbm_summary(const SbmModel& spec) {
    validate(ModelSpec(spec));
    const int r = spec.r();
    SbmSummary s;
    s.p = Eigen::VectorXd::Zero(r);
    s.q = Eigen::VectorXd::Zero(r);
    s.Pi = Eigen::MatrixXd::Zero(r, r);
    const double inv_n = 1.0 / static_cast<double>(spec.n);
    for (index_t x = 0; x < spec.n; ++x) {
        s.p[spec.sigma_left[x]] += inv_n;
        s.q[spec.sigma_right[x]] += inv_n;
        s.Pi(spec.sigma_right[x], spec.sigma_left[x]) += inv_n;
    }
    s.modularity = spec.F * s.Pi;
    return s;
}

SbmModel pathwise_spec(int r_blocks, double s, double eta, index_t n) {
    if (r_blocks < 1) throw validation_error("pathwise_spec: r_blocks must be >= 1");
    if (!(s > 0.0)) throw validation_error("pathwise_spec: s must be positive");
    if (n % r_blocks != 0)
        throw validation_error("pathwise_spec: n must be divisible by r_blocks");
    SbmModel m;
    m.n = n;
    m.F = Eigen::MatrixXd::Zero(r_blocks, r_blocks);
    for (int i = 0; i < r_blocks; ++i) {
        m.F(i, i) = s / 2.0;
        if (i + 1 < r_blocks) {
            m.F(i, i + 1) = s * eta;
            m.F(i + 1, i) = s * (1.0 - eta);
        }
    }
    // Contiguous index ranges per cluster, matching the block colorplots.
    const index_t block = n / r_blocks;
    m.sigma_left.resize(n);
    for (index_t x = 0; x < n; ++x)
        m.sigma_left[x] = static_cast<int>(std::min<index_t>(x / block, r_blocks - 1));
    m.sigma_right = m.sigma_left;
    validate(ModelSpec(m));
    return m;
}

namespace {

SparseReal sample_dense(const DenseModel& m, std::uint64_t seed) {
    CounterRng rng(seed);
    const index_t n = m.n();
    std::vector<Triplet<double>> entries;
    for (index_t x = 0; x < n; ++x)
        for (index_t y = 0; y < n; ++y)
            if (rng.uniform01() < m.P(x, y)) entries.push_back({x, y, m.W(x, y)});
    return SparseReal::from_triplets(n, n, std::move(entries));
}

SparseReal sample_sbm(const SbmModel& m, std::uint64_t seed) {
    CounterRng rng(seed);
    const int r = m.r();
    auto left = cluster_members(m.sigma_left, r);
    auto right = cluster_members(m.sigma_right, r);
    std::vector<Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(expected_edge_count(ModelSpec(m)) * 1.2) + 16);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const auto& rows = left[i];
            const auto& cols = right[j];
            const std::uint64_t cells =
                static_cast<std::uint64_t>(rows.size()) * cols.size();
            if (cells == 0) continue;
            const double p = m.F(i, j) / static_cast<double>(m.n);
            std::uint64_t count = rng.binomial(cells, p);
            std::unordered_set<std::uint64_t> placed;
            placed.reserve(count * 2);
            while (placed.size() < count)
                placed.insert(rng.uniform_below(cells));
            for (std::uint64_t pos : placed) {
                index_t x = rows[pos / cols.size()];
                index_t y = cols[pos % cols.size()];
                entries.push_back({x, y, 1.0});
            }
        }
    }
    return SparseReal::from_triplets(m.n, m.n, std::move(entries));
}

} // namespace

SparseReal sample(const ModelSpec& spec, std::uint64_t seed) {
    validate(spec);
    if (const auto* dense = std::get_if<DenseModel>(&spec)) return sample_dense(*dense, seed);
    return sample_sbm(std::get<SbmModel>(spec), seed);
}

namespace {

Eigen::MatrixXd materialize(const ModelSpec& spec, bool second_moment) {
    index_t n = std::visit([](const auto& m) -> index_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseModel>)
            return m.n();
        else
            return m.n;
    }, spec);
    if (n > 2000) throw validation_error("materialize: n exceeds the dense guard (2000)");
    Eigen::MatrixXd out(n, n);
    std::visit([&](const auto& m) {
        for (index_t x = 0; x < n; ++x)
            for (index_t y = 0; y < n; ++y)
                out(x, y) = second_moment ? m.k_entry(x, y) : m.q_entry(x, y);
    }, spec);
    return out;
}

} // namespace

Eigen::MatrixXd materialize_q(const ModelSpec& spec) { return materialize(spec, false); }
Eigen::MatrixXd materialize_k(const ModelSpec& spec) { return materialize(spec, true); }

double expected_edge_count(const ModelSpec& spec) {
    if (const auto* dense = std::get_if<DenseModel>(&spec)) return dense->P.sum();
    const auto& m = std::get<SbmModel>(spec);
    const int r = m.r();
    Eigen::VectorXd nl = Eigen::VectorXd::Zero(r), nr = Eigen::VectorXd::Zero(r);
    for (int s : m.sigma_left) nl[s] += 1.0;
    for (int s : m.sigma_right) nr[s] += 1.0;
    double total = 0.0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            total += nl[i] * nr[j] * m.F(i, j) / static_cast<double>(m.n);
    return total;
}

} // namespace dispectral
