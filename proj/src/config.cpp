#include "dispectral/config.hpp"

#include "dispectral/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace dispectral {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw validation_error(what + ": malformed JSON");
    return j;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw validation_error(what + ": expected an array of rows");
    const auto rows = j.size();
    const auto cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw validation_error(what + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

std::vector<int> contiguous_memberships(const Eigen::VectorXd& p, index_t n) {
    const int r = static_cast<int>(p.size());
    double psum = p.sum();
    if (!(psum > 0.0)) throw validation_error("custom-F: proportions must be positive");
    std::vector<int> sigma(n);
    index_t start = 0;
    for (int i = 0; i < r; ++i) {
        index_t size = i + 1 == r
                           ? n - start
                           : static_cast<index_t>(std::llround(p[i] / psum * n));
        for (index_t x = start; x < std::min(start + size, n); ++x) sigma[x] = i;
        start += size;
    }
    if (start < n)
        for (index_t x = start; x < n; ++x) sigma[x] = r - 1;
    return sigma;
}

ModelSpec model_from_json(const json& j) {
    if (!j.contains("kind")) throw validation_error("model config: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pathwise" || kind == "two-block") {
        int r_blocks = kind == "two-block" ? 2 : j.at("r_blocks").get<int>();
        return ModelSpec(pathwise_spec(r_blocks, j.at("s").get<double>(),
                                       j.at("eta").get<double>(),
                                       j.at("n").get<index_t>()));
    }
    if (kind == "custom-F") {
        SbmModel m;
        m.n = j.at("n").get<index_t>();
        m.F = matrix_from_json(j.at("F"), "custom-F: F");
        if (m.F.rows() != m.F.cols()) throw validation_error("custom-F: F must be square");
        Eigen::VectorXd p(m.F.rows());
        const auto& jp = j.at("p");
        if (static_cast<index_t>(jp.size()) != m.F.rows())
            throw validation_error("custom-F: p must have r entries");
        for (index_t i = 0; i < p.size(); ++i) p[i] = jp[i].get<double>();
        m.sigma_left = contiguous_memberships(p, m.n);
        m.sigma_right = m.sigma_left;
        validate(ModelSpec(m));
        return ModelSpec(m);
    }
    if (kind == "dense") {
        DenseModel m;
        m.P = matrix_from_json(j.at("P"), "dense: P");
        m.W = j.contains("W") ? matrix_from_json(j.at("W"), "dense: W")
                              : Eigen::MatrixXd::Ones(m.P.rows(), m.P.cols());
        validate(ModelSpec(m));
        return ModelSpec(m);
    }
    throw validation_error("model config: unknown kind \"" + kind + "\"");
}

} // namespace

ModelSpec model_from_json_text(const std::string& text) {
    return model_from_json(parse_or_throw(text, "model config"));
}

ModelSpec model_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("model config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json_text(text);
}

ExperimentConfig experiment_config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("experiment config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = parse_or_throw(text, "experiment config");

    ExperimentConfig cfg;
    const json& jm = j.at("model");
    cfg.kind = jm.value("kind", std::string("pathwise"));
    if (cfg.kind == "two-block") cfg.r_blocks = 2;
    else if (jm.contains("r_blocks")) cfg.r_blocks = jm.at("r_blocks").get<int>();
    cfg.n = jm.at("n").get<index_t>();

    if (jm.contains("eta_grid")) {
        for (const auto& v : jm.at("eta_grid")) cfg.eta_grid.push_back(v.get<double>());
    } else if (jm.contains("sweep")) {
        const json& sw = jm.at("sweep");
        double lo = sw.at("eta_min").get<double>();
        double hi = sw.at("eta_max").get<double>();
        int count = sw.at("eta_count").get<int>();
        if (count < 1) throw validation_error("experiment config: eta_count must be >= 1");
        for (int i = 0; i < count; ++i)
            cfg.eta_grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
    if (jm.contains("d_targets"))
        for (const auto& v : jm.at("d_targets")) cfg.d_targets.push_back(v.get<double>());
    if (jm.contains("s_values"))
        for (const auto& v : jm.at("s_values")) cfg.s_values.push_back(v.get<double>());
    if (cfg.kind == "custom-F") {
        cfg.F = matrix_from_json(jm.at("F"), "custom-F: F");
        cfg.r_blocks = static_cast<int>(cfg.F.rows());
        cfg.p.resize(cfg.F.rows());
        for (index_t i = 0; i < cfg.p.size(); ++i) cfg.p[i] = jm.at("p")[i].get<double>();
    } else if (cfg.eta_grid.empty()) {
        throw validation_error("experiment config: eta grid required for pathwise models");
    }
    for (double eta : cfg.eta_grid)
        if (!(eta >= 0.5 && eta <= 1.0))
            throw validation_error("experiment config: eta grid must lie in [1/2, 1]");

    if (!j.contains("methods") || j.at("methods").empty())
        throw validation_error("experiment config: at least one method required");
    for (const auto& m : j.at("methods"))
        cfg.methods.push_back(method_from_string(m.get<std::string>()));
    cfg.runs_per_point = j.value("runs_per_point", 20);
    if (cfg.runs_per_point < 1)
        throw validation_error("experiment config: runs_per_point must be >= 1");
    cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(1));
    cfg.k = j.value("k", 0);
    cfg.out_csv = j.value("out_csv", std::string("results.csv"));
    cfg.summary_json = j.value("summary_json", std::string());
    return cfg;
}

} // namespace dispectral
