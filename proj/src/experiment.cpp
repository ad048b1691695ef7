#include "dispectral/experiment.hpp"

#include "dispectral/clustering.hpp"
#include "dispectral/csv.hpp"
#include "dispectral/errors.hpp"
#include "dispectral/gw_sim.hpp"
#include "dispectral/pipeline.hpp"
#include "dispectral/rng.hpp"
#include "dispectral/svg_plot.hpp"
#include "dispectral/theory.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace dispectral {

namespace {

struct GridPoint {
    double s = 0.0;
    double d_target = std::nan("");
    double eta = std::nan("");
};

struct ExperimentPlan {
    std::vector<GridPoint> points;
    int runs = 1;
    int k = 1;
    std::vector<Method> methods;
};

const std::vector<std::string> kExperimentHeader = {
    "run_id", "n",       "r_blocks", "s",       "eta",     "d_target",
    "method", "seed",    "r0_used",  "aov",     "lambda1", "lambda2",
    "lambda3", "lambda4", "runtime_ms", "error"};

ExperimentPlan build_plan(const ExperimentConfig& cfg) {
    ExperimentPlan plan;
    plan.runs = cfg.runs_per_point;
    plan.methods = cfg.methods;
    plan.k = cfg.k > 0 ? cfg.k : cfg.r_blocks;
    if (cfg.kind == "custom-F") {
        plan.points.push_back({});
        return plan;
    }
    std::vector<std::pair<double, double>> densities; // (s, d)
    if (!cfg.d_targets.empty()) {
        for (double d : cfg.d_targets)
            densities.push_back({calibrate_s(cfg.r_blocks, d), d});
    } else if (!cfg.s_values.empty()) {
        for (double s : cfg.s_values)
            densities.push_back({s, pathwise_mean_degree(cfg.r_blocks, s)});
    } else {
        throw validation_error("run_experiment: need d_targets or s_values");
    }
    for (const auto& [s, d] : densities)
        for (double eta : cfg.eta_grid) plan.points.push_back({s, d, eta});
    return plan;
}

SbmModel point_model(const ExperimentConfig& cfg, const GridPoint& pt) {
    if (cfg.kind == "custom-F") {
        SbmModel m;
        m.n = cfg.n;
        m.F = cfg.F;
        // same contiguous layout the model config loader uses
        std::vector<int> sigma(cfg.n);
        index_t start = 0;
        double psum = cfg.p.sum();
        for (int i = 0; i < cfg.r_blocks; ++i) {
            index_t size = i + 1 == cfg.r_blocks
                               ? cfg.n - start
                               : static_cast<index_t>(std::llround(cfg.p[i] / psum * cfg.n));
            for (index_t x = start; x < std::min(start + size, cfg.n); ++x) sigma[x] = i;
            start += size;
        }
        m.sigma_left = sigma;
        m.sigma_right = sigma;
        return m;
    }
    return pathwise_spec(cfg.r_blocks, pt.s, pt.eta, cfg.n);
}

std::vector<std::vector<std::string>> run_task(const ExperimentConfig& cfg,
                                               const ExperimentPlan& plan, std::size_t task) {
    const std::size_t point_idx = task / plan.runs;
    const GridPoint& pt = plan.points[point_idx];
    const std::uint64_t graph_seed = CounterRng::hash_combine(cfg.master_seed, task);

    SbmModel spec = point_model(cfg, pt);
    SparseReal a = sample(ModelSpec(spec), graph_seed);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
        Method method = plan.methods[mi];
        std::uint64_t method_seed = CounterRng::hash_combine(graph_seed, mi);
        auto t0 = std::chrono::steady_clock::now();
        double aov = std::nan("");
        index_t r0_used = 0;
        Eigen::VectorXcd lambdas;
        std::string error;
        try {
            auto [part, diag] = cluster_digraph(a, plan.k, method, method_seed);
            aov = adjusted_overlap(spec.sigma_left, part.labels);
            r0_used = diag.r0_used;
            lambdas = diag.eigenvalues;
        } catch (const std::exception& e) {
            error = e.what();
        }
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        std::vector<std::string> row;
        row.push_back(std::to_string(task));
        row.push_back(std::to_string(cfg.n));
        row.push_back(std::to_string(cfg.r_blocks));
        row.push_back(std::isnan(pt.s) ? "" : format_double(pt.s));
        row.push_back(std::isnan(pt.eta) ? "" : format_double(pt.eta));
        row.push_back(std::isnan(pt.d_target) ? "" : format_double(pt.d_target));
        row.push_back(method_name(method));
        row.push_back(std::to_string(method_seed));
        row.push_back(std::to_string(r0_used));
        row.push_back(std::isnan(aov) ? "" : format_double(aov));
        for (int l = 0; l < 4; ++l)
            row.push_back(l < lambdas.size() ? format_double(std::abs(lambdas[l])) : "");
        row.push_back(format_double(ms));
        row.push_back(error);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t prepare_resume(const ExperimentConfig& cfg, std::size_t n_methods) {
    if (!std::filesystem::exists(cfg.out_csv)) return 0;
    CsvTable existing = read_csv(cfg.out_csv);
    if (existing.header != kExperimentHeader)
        throw validation_error("run_experiment: resume file has a different schema");
    // Keep whole tasks only; a torn tail (partial task or truncated line)
    // is recomputed.
    std::size_t complete = 0;
    for (const auto& row : existing.rows) {
        if (row.size() != kExperimentHeader.size()) break;
        ++complete;
    }
    std::size_t keep = (complete / n_methods) * n_methods;
    CsvWriter rewrite(cfg.out_csv, false);
    rewrite.write_row(kExperimentHeader);
    for (std::size_t i = 0; i < keep; ++i) rewrite.write_row(existing.rows[i]);
    return keep / n_methods;
}

void write_summary(const ExperimentConfig& cfg) {
    if (cfg.summary_json.empty()) return;
    CsvTable table = read_csv(cfg.out_csv);
    int c_s = table.column("s"), c_eta = table.column("eta"), c_d = table.column("d_target");
    int c_method = table.column("method"), c_aov = table.column("aov");
    int c_err = table.column("error");

    struct Acc {
        std::vector<double> aovs;
        long errors = 0;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Acc> acc;
    for (const auto& row : table.rows) {
        auto key = std::make_tuple(row[c_s], row[c_eta], row[c_method]);
        Acc& a = acc[key];
        if (!row[c_err].empty() || row[c_aov].empty())
            ++a.errors;
        else
            a.aovs.push_back(std::strtod(row[c_aov].c_str(), nullptr));
        (void)c_d;
    }
    nlohmann::ordered_json out;
    out["n"] = cfg.n;
    out["r_blocks"] = cfg.r_blocks;
    out["runs_per_point"] = cfg.runs_per_point;
    out["points"] = nlohmann::ordered_json::array();
    for (const auto& [key, a] : acc) {
        nlohmann::ordered_json pt;
        pt["s"] = std::get<0>(key);
        pt["eta"] = std::get<1>(key);
        pt["method"] = std::get<2>(key);
        double mean = 0.0;
        for (double v : a.aovs) mean += v;
        mean = a.aovs.empty() ? std::nan("") : mean / a.aovs.size();
        double var = 0.0;
        for (double v : a.aovs) var += (v - mean) * (v - mean);
        double se = a.aovs.size() > 1
                        ? std::sqrt(var / (a.aovs.size() - 1.0) / a.aovs.size())
                        : 0.0;
        pt["mean_aov"] = mean;
        pt["se_aov"] = se;
        pt["runs"] = a.aovs.size();
        pt["errors"] = a.errors;
        out["points"].push_back(pt);
    }
    std::ofstream js(cfg.summary_json);
    if (!js) throw validation_error("run_experiment: cannot open " + cfg.summary_json);
    js << out.dump(2) << '\n';
}

} // namespace

void run_experiment(const ExperimentConfig& cfg, int threads, bool resume) {
    ExperimentPlan plan = build_plan(cfg);
    const std::size_t n_tasks = plan.points.size() * plan.runs;

    std::size_t start_task = 0;
    if (resume) start_task = prepare_resume(cfg, plan.methods.size());
    CsvWriter writer(cfg.out_csv, /*append=*/resume);
    if (!resume) writer.write_row(kExperimentHeader);

    if (threads <= 1) {
        for (std::size_t t = start_task; t < n_tasks; ++t)
            for (const auto& row : run_task(cfg, plan, t)) writer.write_row(row);
    } else {
        // Workers pull tasks from a shared counter; the writer drains
        // results strictly in task order so output bytes stay deterministic.
        std::atomic<std::size_t> next{start_task};
        std::map<std::size_t, std::vector<std::vector<std::string>>> done;
        std::mutex mu;
        std::condition_variable cv;
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t t = next.fetch_add(1);
                    if (t >= n_tasks) return;
                    auto rows = run_task(cfg, plan, t);
                    std::lock_guard<std::mutex> lock(mu);
                    done[t] = std::move(rows);
                    cv.notify_all();
                }
            });
        std::size_t watermark = start_task;
        std::unique_lock<std::mutex> lock(mu);
        while (watermark < n_tasks) {
            cv.wait(lock, [&] { return done.count(watermark) > 0; });
            auto rows = std::move(done[watermark]);
            done.erase(watermark);
            lock.unlock();
            for (const auto& row : rows) writer.write_row(row);
            ++watermark;
            lock.lock();
        }
        lock.unlock();
        for (auto& th : pool) th.join();
    }
    writer.flush();
    write_summary(cfg);
}

void run_overlap_validation(double s, const std::vector<double>& eta_grid, index_t n,
                            int runs, std::uint64_t master_seed, const std::string& out_csv) {
    CsvWriter writer(out_csv);
    writer.write_row({"eta", "run", "seed", "r0_predicted",
                      "ov_u1_phi1", "ov_u1_phi2", "ov_u2_phi1", "ov_u2_phi2",
                      "ov_v1_xi1", "ov_v1_xi2", "ov_v2_xi1", "ov_v2_xi2",
                      "a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22"});
    SolverOptions solver;
    solver.tol = 1e-6; // bulk-level accuracy is all the second pair can offer
    for (std::size_t pi = 0; pi < eta_grid.size(); ++pi) {
        double eta = eta_grid[pi];
        SbmModel spec = pathwise_spec(2, s, eta, n);
        ExpectedSpectrum es = expected_spectrum(ModelSpec(spec));
        OverlapPrediction pred = overlap_prediction(ModelSpec(spec));
        for (int run = 0; run < runs; ++run) {
            std::uint64_t seed =
                CounterRng::hash_combine(master_seed, pi * static_cast<std::size_t>(runs) + run);
            SparseReal a = sample(ModelSpec(spec), seed);
            SolverOptions so = solver;
            so.seed = CounterRng::hash_combine(seed, 0xeb01);
            EigenPairs pairs = top_eigenpairs(a, 2, so);
            std::vector<std::string> row{format_double(eta), std::to_string(run),
                                         std::to_string(seed), std::to_string(es.r0)};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    row.push_back(format_double(
                        std::abs(pairs.right.col(i).dot(es.phi.col(j)))));
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    row.push_back(format_double(
                        std::abs(pairs.left.col(i).dot(es.xi.col(j)))));
            auto pred_cell = [&](const Eigen::MatrixXd& m, int i, int j) {
                return (!pred.empty && i < m.rows() && j < m.cols())
                           ? format_double(m(i, j))
                           : std::string();
            };
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) row.push_back(pred_cell(pred.a, i, j));
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) row.push_back(pred_cell(pred.b, i, j));
            writer.write_row(row);
        }
    }
}

void run_fluctuation_histograms(const SbmModel& spec, int samples, std::uint64_t seed,
                                const std::string& out_csv, const std::string& svg_path) {
    LimitMoments moments = limit_moments(spec);
    ExpectedSpectrum es = expected_spectrum(ModelSpec(spec));
    SbmSummary summary = sbm_summary(spec);
    const index_t r0 = moments.mean.rows();
    const int r = spec.r();
    const double sqrt_n = std::sqrt(static_cast<double>(spec.n));

    std::vector<std::vector<std::vector<double>>> values(
        r0, std::vector<std::vector<double>>(r)); // [i][cluster] -> entries
    for (int sidx = 0; sidx < samples; ++sidx) {
        SparseReal a = sample(ModelSpec(spec), CounterRng::hash_combine(seed, sidx));
        SolverOptions so;
        so.tol = 1e-8;
        so.seed = CounterRng::hash_combine(seed, 0xf100 + sidx);
        EigenPairs pairs = top_eigenpairs(a, r0, so);
        for (index_t i = 0; i < r0; ++i) {
            if (std::abs(pairs.values[i].imag()) > 0.05 * std::abs(pairs.values[0]))
                throw numerical_error(
                    "run_fluctuation_histograms: unexpected complex outlier");
            Eigen::VectorXd u = pairs.right.col(i).real();
            u.normalize();
            // Align against the expected eigenvector so signs are comparable
            // across samples.
            double align = (es.phi.col(i).real().transpose() * u).value();
            if (align < 0.0) u = -u;
            for (index_t x = 0; x < spec.n; ++x)
                values[i][spec.sigma_left[x]].push_back(sqrt_n * u[x]);
        }
    }

    CsvWriter writer(out_csv);
    writer.write_row({"kind", "series", "lo", "hi", "count", "density", "x"});
    constexpr int kBins = 80;
    for (index_t i = 0; i < r0; ++i) {
        double lo = 1e300, hi = -1e300;
        long total = 0;
        for (int c = 0; c < r; ++c) {
            for (double v : values[i][c]) { lo = std::min(lo, v); hi = std::max(hi, v); }
            total += static_cast<long>(values[i][c].size());
        }
        if (!(lo < hi)) { lo = -1.0; hi = 1.0; }
        double width = (hi - lo) / kBins;
        std::string series = "u" + std::to_string(i + 1);
        std::vector<long> combined(kBins, 0);
        for (int c = 0; c < r; ++c) {
            std::vector<long> bins(kBins, 0);
            for (double v : values[i][c]) {
                int b = std::min(kBins - 1, static_cast<int>((v - lo) / width));
                ++bins[b];
                ++combined[b];
            }
            for (int b = 0; b < kBins; ++b)
                writer.write_row({"bin", series + "_c" + std::to_string(c + 1),
                                  format_double(lo + b * width),
                                  format_double(lo + (b + 1) * width), std::to_string(bins[b]),
                                  format_double(bins[b] / (total * width)), ""});
        }
        for (int b = 0; b < kBins; ++b)
            writer.write_row({"bin", series, format_double(lo + b * width),
                              format_double(lo + (b + 1) * width), std::to_string(combined[b]),
                              format_double(combined[b] / (total * width)), ""});
        // Gaussian mixture density overlay.
        for (int g = 0; g <= 200; ++g) {
            double x = lo + (hi - lo) * g / 200.0;
            double density = 0.0;
            for (int c = 0; c < r; ++c) {
                double var = std::max(moments.variance(i, c), 1e-300);
                double z = x - moments.mean(i, c);
                density += summary.p[c] *
                           std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * 3.141592653589793 * var);
            }
            writer.write_row({"curve", "gm" + std::to_string(i + 1), "", "", "",
                              format_double(density), format_double(x)});
        }
    }
    writer.flush();
    if (!svg_path.empty()) plot(out_csv, PlotKind::histogram, svg_path);
}

void write_threshold_map_csv(const std::vector<int>& r_list, int eta_count,
                             const std::string& out_csv) {
    if (eta_count < 2) throw validation_error("write_threshold_map_csv: need >= 2 eta points");
    CsvWriter writer(out_csv);
    writer.write_row({"r", "eta", "rhs"});
    for (int r : r_list)
        for (int i = 0; i < eta_count; ++i) {
            double eta = 0.5 + 0.5 * i / (eta_count - 1);
            ThresholdCheck check = pathwise_detection_threshold(r, 1.0, eta);
            writer.write_row({std::to_string(r), format_double(eta),
                              check.rhs_infinite ? "inf" : format_double(check.rhs)});
        }
}

} // namespace dispectral
