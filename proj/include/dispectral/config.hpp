#pragma once

#include "dispectral/model.hpp"
#include "dispectral/pipeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dispectral {

// Model config (JSON):
//   {"kind":"pathwise",  "r_blocks":2, "s":10.0, "eta":0.9, "n":2000}
//   {"kind":"two-block", "s":10.0, "eta":0.9, "n":2000}
//   {"kind":"custom-F",  "F":[[...],...], "p":[...], "n":5000}
//   {"kind":"dense",     "P":[[...],...], "W":[[...],...]}   (W optional)
// custom-F assigns contiguous clusters sized by the proportions p, with
// identical left and right memberships.
ModelSpec model_from_json_file(const std::string& path);
ModelSpec model_from_json_text(const std::string& text);

// Experiment config (JSON), nested keys mirroring the field names:
// {
//   "model": {"kind":"pathwise", "r_blocks":6, "n":2500,
//             "sweep": {"eta_min":0.5, "eta_max":1.0, "eta_count":50},
//             "d_targets": [2,3,4]},          // or "s_values": [...]
//   "methods": ["gmm","kmeans","svd","simpleherm"],
//   "runs_per_point": 20,
//   "master_seed": 1,
//   "k": 6,                                    // default: r_blocks
//   "out_csv": "results.csv",
//   "summary_json": "summary.json"
// }
struct ExperimentConfig {
    std::string kind = "pathwise"; // pathwise | two-block | custom-F
    int r_blocks = 2;
    index_t n = 2500;
    std::vector<double> eta_grid;
    std::vector<double> d_targets; // calibrated to s via calibrate_s
    std::vector<double> s_values;  // used directly when d_targets is empty
    Eigen::MatrixXd F;             // custom-F only
    Eigen::VectorXd p;             // custom-F only
    std::vector<Method> methods;
    int runs_per_point = 20;
    std::uint64_t master_seed = 1;
    int k = 0; // 0: use r_blocks
    std::string out_csv = "results.csv";
    std::string summary_json;
};

ExperimentConfig experiment_config_from_json(const std::string& path);

} // namespace dispectral
