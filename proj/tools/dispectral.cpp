#include "dispectral/baselines.hpp"
#include "dispectral/config.hpp"
#include "dispectral/csv.hpp"
#include "dispectral/errors.hpp"
#include "dispectral/experiment.hpp"
#include "dispectral/gw_sim.hpp"
#include "dispectral/pipeline.hpp"
#include "dispectral/svg_plot.hpp"
#include "dispectral/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace dispectral;
using nlohmann::ordered_json;

std::vector<double> parse_grid(const std::string& text) {
    // Either "a,b,c" or "lo:hi:count".
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double lo, hi;
        int count;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
            throw validation_error("bad grid spec: " + text);
        for (int i = 0; i < count; ++i)
            grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        return grid;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    if (grid.empty()) throw validation_error("bad grid spec: " + text);
    return grid;
}

ordered_json complex_array(const Eigen::VectorXcd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back({{"re", v[i].real()}, {"im", v[i].imag()}});
    return arr;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

void emit(const ordered_json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dispectral: spectral clustering of sparse directed graphs"};
    app.require_subcommand(1);
    std::function<void()> action;

    // ---- sample ----
    auto* sample_cmd = app.add_subcommand("sample", "sample a graph from a model config");
    {
        auto model_path = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        auto labels_path = std::make_shared<std::string>();
        auto labels_right_path = std::make_shared<std::string>();
        auto seed = std::make_shared<std::uint64_t>(1);
        sample_cmd->add_option("--model", *model_path, "model config JSON")->required();
        sample_cmd->add_option("--out", *out_path, "output edge list")->required();
        sample_cmd->add_option("--labels-out", *labels_path, "left membership file");
        sample_cmd->add_option("--labels-right-out", *labels_right_path,
                               "right membership file");
        sample_cmd->add_option("--seed", *seed, "sampler seed");
        sample_cmd->callback([=, &action] {
            action = [=] {
                ModelSpec spec = model_from_json_file(*model_path);
                SparseReal a = sample(spec, *seed);
                write_edgelist(*out_path, a);
                if (!labels_path->empty() || !labels_right_path->empty()) {
                    const auto* sbm = std::get_if<SbmModel>(&spec);
                    if (!sbm)
                        throw validation_error("labels are only defined for SBM models");
                    if (!labels_path->empty()) write_memberships(*labels_path, sbm->sigma_left);
                    if (!labels_right_path->empty())
                        write_memberships(*labels_right_path, sbm->sigma_right);
                }
            };
        });
    }

    // ---- spectrum ----
    auto* spectrum_cmd =
        app.add_subcommand("spectrum", "top eigenvalues of a graph, CSV for plotting");
    {
        auto input = std::make_shared<std::string>();
        auto model_path = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        auto k = std::make_shared<index_t>(8);
        auto tol = std::make_shared<double>(1e-8);
        auto seed = std::make_shared<std::uint64_t>(1);
        spectrum_cmd->add_option("--input", *input, "edge list")->required();
        spectrum_cmd->add_option("--out", *out_path, "output CSV")->required();
        spectrum_cmd->add_option("--k", *k, "number of eigenvalues");
        spectrum_cmd->add_option("--tol", *tol, "residual tolerance");
        spectrum_cmd->add_option("--seed", *seed, "solver seed");
        spectrum_cmd->add_option("--model", *model_path,
                                 "model config: adds mu / vartheta rows for the scatter plot");
        spectrum_cmd->callback([=, &action] {
            action = [=] {
                SparseReal a = read_edgelist(*input);
                SolverOptions opts;
                opts.tol = *tol;
                opts.seed = *seed;
                SpectrumScan scan = top_eigenvalues(a, *k, opts);
                CsvWriter writer(*out_path);
                writer.write_row({"type", "re", "im", "extra"});
                for (index_t i = 0; i < scan.values.size(); ++i)
                    writer.write_row({"lambda", format_double(scan.values[i].real()),
                                      format_double(scan.values[i].imag()),
                                      format_double(scan.residuals[i])});
                if (!model_path->empty()) {
                    ExpectedSpectrum es = expected_spectrum(model_from_json_file(*model_path));
                    for (index_t i = 0; i < es.mu.size(); ++i)
                        writer.write_row({"mu", format_double(es.mu[i].real()),
                                          format_double(es.mu[i].imag()), ""});
                    writer.write_row(
                        {"vartheta", format_double(es.theta_threshold), "0", ""});
                }
            };
        });
    }

    // ---- predict ----
    auto* predict_cmd =
        app.add_subcommand("predict", "analytic spectrum and overlap predictions");
    {
        auto model_path = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        auto threshold_csv = std::make_shared<std::string>();
        auto r_list = std::make_shared<std::string>("2,4,8,16,32");
        auto eta_points = std::make_shared<int>(101);
        predict_cmd->add_option("--model", *model_path, "model config JSON")->required();
        predict_cmd->add_option("--out", *out_path, "output JSON (stdout when omitted)");
        predict_cmd->add_option("--threshold-csv", *threshold_csv,
                                "also write the pathwise threshold map CSV here");
        predict_cmd->add_option("--r-list", *r_list, "threshold map block counts");
        predict_cmd->add_option("--eta-points", *eta_points, "threshold map grid size");
        predict_cmd->callback([=, &action] {
            action = [=] {
                ModelSpec spec = model_from_json_file(*model_path);
                ExpectedSpectrum es = expected_spectrum(spec);
                OverlapPrediction pred = overlap_prediction(spec);
                ordered_json j;
                j["mu"] = complex_array(es.mu);
                j["rho"] = es.rho;
                j["vartheta"] = es.theta_threshold;
                j["r0"] = es.r0;
                if (es.r0 >= 1) j["tau"] = es.tau;
                j["overlap_prediction_empty"] = pred.empty;
                if (!pred.empty) {
                    j["a"] = matrix_json(pred.a);
                    j["b"] = matrix_json(pred.b);
                    ordered_json rr = ordered_json::array(), ll = ordered_json::array();
                    for (Eigen::Index i = 0; i < pred.R.size(); ++i) rr.push_back(pred.R[i]);
                    for (Eigen::Index i = 0; i < pred.L.size(); ++i) ll.push_back(pred.L[i]);
                    j["R"] = rr;
                    j["L"] = ll;
                }
                emit(j, *out_path);
                if (!threshold_csv->empty()) {
                    std::vector<int> rs;
                    for (double v : parse_grid(*r_list)) rs.push_back(static_cast<int>(v));
                    write_threshold_map_csv(rs, *eta_points, *threshold_csv);
                }
            };
        });
    }

    // ---- cluster ----
    auto* cluster_cmd = app.add_subcommand("cluster", "cluster a graph");
    {
        auto input = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        auto diag_path = std::make_shared<std::string>();
        auto method = std::make_shared<std::string>("gmm");
        auto r0_text = std::make_shared<std::string>("auto");
        auto k = std::make_shared<int>(2);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto normalize = std::make_shared<bool>(false);
        cluster_cmd->add_option("--input", *input, "edge list")->required();
        cluster_cmd->add_option("--k", *k, "number of clusters")->required();
        cluster_cmd->add_option("--r0", *r0_text, "retained eigenpairs or 'auto'");
        cluster_cmd->add_option("--method", *method, "gmm | kmeans | svd | simpleherm");
        cluster_cmd->add_option("--seed", *seed, "pipeline seed");
        cluster_cmd->add_option("--out", *out_path, "labels file")->required();
        cluster_cmd->add_option("--diagnostics", *diag_path, "diagnostics JSON");
        cluster_cmd->add_flag("--normalize-embedding", *normalize,
                              "project the simpleherm 2-D embedding to the unit circle");
        cluster_cmd->callback([=, &action] {
            action = [=] {
                SparseReal a = read_edgelist(*input);
                ClusterOptions opts;
                if (*r0_text != "auto") opts.r0 = std::stol(*r0_text);
                opts.normalize_embedding = *normalize;
                auto [part, diag] =
                    cluster_digraph(a, *k, method_from_string(*method), *seed, opts);
                write_memberships(*out_path, part.labels);
                if (!diag_path->empty()) {
                    ordered_json j;
                    j["method"] = *method;
                    j["r0_used"] = diag.r0_used;
                    j["eigenvalues"] = complex_array(diag.eigenvalues);
                    ordered_json res = ordered_json::array();
                    for (Eigen::Index i = 0; i < diag.residuals.size(); ++i)
                        res.push_back(diag.residuals[i]);
                    j["residuals"] = res;
                    j["fit_score"] = diag.fit_score;
                    j["realification_map"] = diag.realification_map;
                    emit(j, *diag_path);
                }
            };
        });
    }

    // ---- experiment ----
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo sweep from a config file");
    {
        auto config_path = std::make_shared<std::string>();
        auto threads = std::make_shared<int>(
            std::max(1u, std::thread::hardware_concurrency()));
        auto resume = std::make_shared<bool>(false);
        auto seed = std::make_shared<std::int64_t>(-1);
        auto out_csv = std::make_shared<std::string>();
        auto summary = std::make_shared<std::string>();
        exp_cmd->add_option("--config", *config_path, "experiment config JSON")->required();
        exp_cmd->add_option("--threads", *threads, "worker threads");
        exp_cmd->add_flag("--resume", *resume, "continue an interrupted sweep");
        exp_cmd->add_option("--seed", *seed, "override master_seed");
        exp_cmd->add_option("--out", *out_csv, "override out_csv");
        exp_cmd->add_option("--summary", *summary, "override summary_json");
        exp_cmd->callback([=, &action] {
            action = [=] {
                ExperimentConfig cfg = experiment_config_from_json(*config_path);
                if (*seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(*seed);
                if (!out_csv->empty()) cfg.out_csv = *out_csv;
                if (!summary->empty()) cfg.summary_json = *summary;
                run_experiment(cfg, *threads, *resume);
            };
        });
    }

    // ---- overlap-validate ----
    auto* ov_cmd = app.add_subcommand("overlap-validate",
                                      "measured vs predicted eigenvector overlaps (two-block)");
    {
        auto s = std::make_shared<double>(10.0);
        auto grid = std::make_shared<std::string>("0.5:1.0:26");
        auto n = std::make_shared<index_t>(2000);
        auto runs = std::make_shared<int>(20);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out_path = std::make_shared<std::string>();
        ov_cmd->add_option("--s", *s, "density parameter");
        ov_cmd->add_option("--eta-grid", *grid, "list a,b,c or lo:hi:count");
        ov_cmd->add_option("--n", *n, "graph size");
        ov_cmd->add_option("--runs", *runs, "samples per grid point");
        ov_cmd->add_option("--seed", *seed, "master seed");
        ov_cmd->add_option("--out", *out_path, "output CSV")->required();
        ov_cmd->callback([=, &action] {
            action = [=] {
                run_overlap_validation(*s, parse_grid(*grid), *n, *runs, *seed, *out_path);
            };
        });
    }

    // ---- fluctuations ----
    auto* fl_cmd = app.add_subcommand(
        "fluctuations", "eigenvector entry histograms with Gaussian mixture overlays");
    {
        auto model_path = std::make_shared<std::string>();
        auto samples = std::make_shared<int>(10);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out_path = std::make_shared<std::string>();
        auto svg_path = std::make_shared<std::string>();
        fl_cmd->add_option("--model", *model_path, "SBM model config")->required();
        fl_cmd->add_option("--samples", *samples, "number of sampled graphs");
        fl_cmd->add_option("--seed", *seed, "master seed");
        fl_cmd->add_option("--out", *out_path, "histogram CSV")->required();
        fl_cmd->add_option("--svg", *svg_path, "rendered SVG");
        fl_cmd->callback([=, &action] {
            action = [=] {
                ModelSpec spec = model_from_json_file(*model_path);
                const auto* sbm = std::get_if<SbmModel>(&spec);
                if (!sbm) throw validation_error("fluctuations: SBM model required");
                run_fluctuation_histograms(*sbm, *samples, *seed, *out_path, *svg_path);
            };
        });
    }

    // ---- gw-sim ----
    auto* gw_cmd = app.add_subcommand(
        "gw-sim", "multitype Galton-Watson martingale simulation");
    {
        auto model_path = std::make_shared<std::string>();
        auto eigen_index = std::make_shared<int>(1);
        auto root_type = std::make_shared<int>(1);
        auto depth = std::make_shared<int>(12);
        auto samples = std::make_shared<long>(100000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out_path = std::make_shared<std::string>();
        auto check = std::make_shared<bool>(false);
        gw_cmd->add_option("--model", *model_path, "SBM model config")->required();
        gw_cmd->add_option("--eigen-index", *eigen_index, "eigenvalue index (1-based)");
        gw_cmd->add_option("--root-type", *root_type, "root type (1-based)");
        gw_cmd->add_option("--depth", *depth, "martingale depth");
        gw_cmd->add_option("--samples", *samples, "number of trees");
        gw_cmd->add_option("--seed", *seed, "master seed");
        gw_cmd->add_option("--out", *out_path, "CSV of end values")->required();
        gw_cmd->add_flag("--check", *check, "print the moment report against limit_moments");
        gw_cmd->callback([=, &action] {
            action = [=] {
                ModelSpec spec = model_from_json_file(*model_path);
                const auto* sbm = std::get_if<SbmModel>(&spec);
                if (!sbm) throw validation_error("gw-sim: SBM model required");
                GwConfig cfg = gw_config_from_sbm(*sbm, *depth, *samples, *root_type - 1);
                GwRunResult res = simulate_martingale(cfg, *eigen_index - 1, *seed);
                CsvWriter writer(*out_path);
                writer.write_row({"sample", "value", "extinct"});
                for (std::size_t i = 0; i < res.samples.size(); ++i)
                    writer.write_row({std::to_string(i),
                                      format_double(res.samples[i].values.back()),
                                      res.samples[i].extinct ? "1" : "0"});
                std::cerr << "samples=" << res.samples.size()
                          << " overflowed=" << res.overflow_count << '\n';
                if (*check) {
                    LimitMoments moments = limit_moments(*sbm);
                    int i = *eigen_index - 1, j = *root_type - 1;
                    if (i >= moments.mean.rows())
                        throw validation_error("gw-sim: eigen-index beyond r0");
                    std::vector<double> normalized;
                    normalized.reserve(res.samples.size());
                    for (const auto& s : res.samples)
                        normalized.push_back(s.values.back() / moments.gamma[i]);
                    MomentReport rep =
                        moment_check(normalized, moments.mean(i, j), moments.variance(i, j));
                    ordered_json out;
                    out["n_valid"] = rep.n_valid;
                    out["overflowed"] = res.overflow_count;
                    out["target_mean"] = moments.mean(i, j);
                    out["target_variance"] = moments.variance(i, j);
                    out["emp_mean"] = rep.emp_mean;
                    out["emp_var"] = rep.emp_var;
                    out["z_mean"] = rep.z_mean;
                    out["z_var"] = rep.z_var;
                    out["atom_fraction"] = rep.atom_fraction;
                    out["ks_to_normal"] = rep.ks_to_normal;
                    std::cout << out.dump(2) << '\n';
                }
            };
        });
    }

    // ---- plot ----
    auto* plot_cmd = app.add_subcommand("plot", "render a harness CSV to SVG");
    {
        auto input = std::make_shared<std::string>();
        auto kind = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        plot_cmd->add_option("--input", *input, "CSV file")->required();
        plot_cmd
            ->add_option("--kind", *kind,
                         "overlap-curves | spectrum-scatter | threshold-map | histogram")
            ->required();
        plot_cmd->add_option("--out", *out_path, "output SVG")->required();
        plot_cmd->callback([=, &action] {
            action = [=] { plot(*input, plot_kind_from_string(*kind), *out_path); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (action) action();
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
