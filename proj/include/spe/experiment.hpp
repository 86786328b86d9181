#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spe/resource.hpp"

namespace spe {

// One experiment = one algorithm on one Hamiltonian, swept over parameter
// points, noise rates and seeds. Every run is fully determined by
// (config, seed).
struct ExperimentConfig {
    std::string hamiltonian_path;
    std::string ansatz_path;  // vqe only

    // Input state cos(theta)|basis_a> + sin(theta)|basis_b>; theta either
    // explicit or calibrated to target_p0.
    std::string basis_a;
    std::string basis_b;
    std::optional<double> theta;
    std::optional<double> target_p0;

    std::string algorithm = "lt22";  // lt22 | gaussian_filter | gaussian_fit | vqe
    std::string backend = "exact";   // exact | shots

    std::vector<std::int64_t> d_list;     // lt22 mode counts
    std::vector<double> epsilon_list;     // gaussian accuracy targets [Hartree]
    std::optional<double> eta;            // overlap lower bound; default 0.5 p0 (lt22) / 0.7 p0 (gaussian)
    std::optional<double> delta_gap;      // gap lower bound [Hartree]; default gap_true^(4/5)
    double delta_fail = 0.1;
    double vartheta = 1e-12;
    std::optional<double> n_sigma;        // gaussian_fit window; default 4 delta / sigma
    std::optional<std::int64_t> n_sample; // override suggested sample counts
    std::optional<double> tau;            // default pi / (4 ||H||)
    std::optional<double> e_rough;        // default: lt22 with d=100, 1e4 samples
    int gaussian_modes = 1000;
    int lt22_n_batch = 1;  // odd; > 1 splits the records into batch signals

    int trotter_steps = 50;
    std::vector<double> p_phys_list{0.0};
    std::string channel = "zflip";  // zflip | depolarizing
    std::vector<std::uint64_t> seeds{1};

    // vqe
    std::int64_t shots_per_term = 0;
    std::int64_t total_shot_budget = 0;
    int max_iterations = 200;

    std::string timing_path;
    std::string out_dir;
    bool persist_artifacts = true;
    int jobs = 1;

    void validate() const;  // throws naming the offending field
    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;  // defaults filled in, for provenance
};

struct ResultRow {
    std::string algorithm;
    std::string backend;
    std::int64_t d = 0;
    double epsilon = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
    std::int64_t n_sample = 0;
    std::uint64_t seed = 0;
    double p_phys = 0.0;
    std::string channel;
    int trotter_steps = 0;
    double energy = 0.0;
    double abs_error = 0.0;
    ResourceLedger resources;
    std::string status;  // ok | failed
    std::string detail;
    std::string artifact_prefix;  // persisted records / signal files
};

std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string csv_header();

struct Report {
    std::string csv;
    std::string summary;
    bool all_ok = true;
};

// CSV plus a per-algorithm summary with log-log regression slopes of
// |dE| against T_total and T_max.
Report emit_report(const std::vector<ResultRow>& rows);

// OLS slope of log10(y) vs log10(x), skipping non-positive pairs.
std::optional<double> loglog_slope(const std::vector<double>& x,
                                   const std::vector<double>& y);

}  // namespace spe
