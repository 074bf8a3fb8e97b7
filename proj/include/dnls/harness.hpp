#ifndef DNLS_HARNESS_HPP
#define DNLS_HARNESS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "dnls/energies.hpp"
#include "dnls/evolution.hpp"

namespace dnls {

using ojson = nlohmann::ordered_json;

// One JSON document drives a run; flags only pick the file, the experiment
// kind, the output directory and the thread count.
struct ExperimentConfig {
    ojson raw;
    std::string experiment;  // conservation | increment | nscan

    Grid grid;
    ModelSpec model;
    SolverConfig solver;

    // data recipe
    std::string recipe = "rough";  // rough | gaussian | sech
    std::uint64_t seed = 1;
    double target_l2_fraction = 0.9;  // of sqrt(2 pi)
    double data_s = 0.6;
    int cutoff_mode = 0;  // 0: full band
    double center = 0.0, width = 1.0;

    double i_s = 0.6;
    std::vector<double> N_list;

    // conservation
    std::vector<double> dt_list;

    // increment
    int inc_data_K = 12;
    double inc_N = 2.3;
    double inc_dt = 1e-4;
    int inc_checks = 21;
    int inc_stride = 5;
    int inc_calib_fields = 10;
    std::int64_t inc_sampled = 0;  // > 0: estimate Lambda_8 by importance sampling

    // nscan
    std::int64_t nscan_lambda_cap = 200000000;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const ojson& j);
std::uint64_t config_hash(const ojson& j);

struct Report {
    std::string name;
    ojson meta;
    std::vector<ojson> rows;
    std::vector<std::string> summary;
    bool pass = true;
};

// Writes <name>.jsonl (one object per row, each carrying schema_version),
// <name>.csv (header + rows) and summary.txt. Byte-stable for a fixed
// config and seed.
void emit(const Report& r, const std::string& outdir);

Field build_data(const ExperimentConfig& cfg);

Report run_conservation(const ExperimentConfig& cfg);
Report run_increment_check(const ExperimentConfig& cfg);
Report run_n_scan(const ExperimentConfig& cfg);

// 0 = pass, 2 = experiment criteria failed (runtime errors surface as exceptions)
int run_experiment(const ExperimentConfig& cfg, const std::string& outdir);

// ordinary least squares y = a + b x; returns {b, rms residual}
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dnls

#endif
