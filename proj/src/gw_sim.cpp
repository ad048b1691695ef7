#include "dispectral/gw_sim.hpp"

#include "dispectral/errors.hpp"
#include "dispectral/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dispectral {

GwConfig gw_config_from_sbm(const SbmModel& spec, int depth, long n_samples, int root_type) {
    if (spec.sigma_left != spec.sigma_right)
        throw validation_error("gw_config_from_sbm: requires sigma_left == sigma_right");
    if (root_type < 0 || root_type >= spec.r())
        throw validation_error("gw_config_from_sbm: root_type out of range");
    SbmSummary summary = sbm_summary(spec);
    EigenPairs sys = dense_eigen_oracle(summary.modularity);
    GwConfig cfg;
    cfg.m = summary.modularity;
    const int r = spec.r();
    cfg.f.resize(r, r);
    cfg.nu.resize(r);
    double scale = std::abs(sys.values[0]);
    for (int i = 0; i < r; ++i) {
        if (std::abs(sys.values[i].imag()) > 1e-10 * scale)
            throw numerical_error("gw_config_from_sbm: complex modularity eigenvalue");
        cfg.nu[i] = sys.values[i].real();
        cfg.f.col(i) = sys.right.col(i).real();
        cfg.f.col(i).normalize();
    }
    cfg.depth = depth;
    cfg.n_samples = n_samples;
    cfg.root_type = root_type;
    return cfg;
}

GwRunResult simulate_martingale(const GwConfig& cfg, int eigen_index, std::uint64_t seed) {
    const int r = static_cast<int>(cfg.m.rows());
    if (cfg.m.cols() != r || cfg.f.rows() != r || cfg.nu.size() != cfg.f.cols())
        throw validation_error("simulate_martingale: inconsistent config shapes");
    if (eigen_index < 0 || eigen_index >= cfg.nu.size())
        throw validation_error("simulate_martingale: eigen_index out of range");
    if (cfg.root_type < 0 || cfg.root_type >= r)
        throw validation_error("simulate_martingale: root_type out of range");
    if (cfg.depth < 1) throw validation_error("simulate_martingale: depth must be >= 1");
    if (cfg.nu[eigen_index] == 0.0)
        throw validation_error("simulate_martingale: |nu_i| must be positive");
    if ((cfg.m.array() < 0.0).any())
        throw validation_error("simulate_martingale: offspring means must be >= 0");

    const double nu = cfg.nu[eigen_index];
    const Eigen::VectorXd f = cfg.f.col(eigen_index);

    GwRunResult out;
    out.samples.reserve(cfg.n_samples);
    for (long s = 0; s < cfg.n_samples; ++s) {
        CounterRng rng = CounterRng::derived(seed, static_cast<std::uint64_t>(s));
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(r);
        counts[cfg.root_type] = 1.0;
        MartingaleSample sample;
        sample.values.reserve(cfg.depth + 1);
        sample.values.push_back(f[cfg.root_type]);
        double scale = 1.0;
        for (int t = 1; t <= cfg.depth; ++t) {
            Eigen::VectorXd lambda = cfg.m.transpose() * counts;
            if (lambda.sum() > cfg.population_cap) {
                sample.overflowed = true;
                break;
            }
            for (int k = 0; k < r; ++k) counts[k] = rng.poisson(lambda[k]);
            scale /= nu;
            sample.values.push_back(scale * f.dot(counts));
        }
        if (sample.overflowed) {
            ++out.overflow_count;
            continue;
        }
        sample.extinct = counts.sum() == 0.0;
        out.samples.push_back(std::move(sample));
    }
    return out;
}

MomentReport moment_check(const std::vector<double>& end_values, double target_mean,
                          double target_variance) {
    if (end_values.size() < 1000)
        throw validation_error("moment_check: need at least 10^3 valid samples");
    const double n = static_cast<double>(end_values.size());
    MomentReport rep;
    rep.n_valid = static_cast<long>(end_values.size());

    double mean = 0.0;
    for (double v : end_values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    long zeros = 0;
    for (double v : end_values) {
        double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
        if (v == 0.0) ++zeros;
    }
    m2 /= n;
    m4 /= n;
    double var = m2 * n / (n - 1.0);

    rep.emp_mean = mean;
    rep.emp_var = var;
    rep.atom_fraction = static_cast<double>(zeros) / n;
    rep.se_mean = std::sqrt(var / n);
    // SE of the sample variance from the fourth central moment.
    rep.se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    rep.z_mean = rep.se_mean > 0.0 ? (mean - target_mean) / rep.se_mean : 0.0;
    rep.z_var = rep.se_var > 0.0 ? (var - target_variance) / rep.se_var : 0.0;

    // KS distance against N(target_mean, target_variance).
    std::vector<double> sorted = end_values;
    std::sort(sorted.begin(), sorted.end());
    double sd = std::sqrt(std::max(target_variance, 1e-300));
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double z = (sorted[i] - target_mean) / sd;
        double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(std::abs(cdf - lo), std::abs(cdf - hi)));
    }
    rep.ks_to_normal = ks;
    return rep;
}

} // namespace dispectral
