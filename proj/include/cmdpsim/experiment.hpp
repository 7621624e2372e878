#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cmdpsim {

// A replication sweep over iteration counts and horizons for one model,
// policy set and budget. Outputs land in output_dir as CSV files; every byte
// of output is a pure function of the config and master seed.
struct ExperimentConfig {
    std::string model_path;
    std::string policy_path;
    std::string output_dir = ".";
    std::string algorithms = "both"; // "ftal", "auer" or "both"
    double cost_budget = 0.0;
    std::vector<int> n_schedule;
    std::vector<int> h_schedule;
    std::vector<double> epsilons;
    std::optional<double> delta; // defaults to 1/N where needed
    int replications = 1;
    std::uint64_t seed = 0;
    bool write_traces = true;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentSummary {
    int runs = 0;
    int failures = 0;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);

} // namespace cmdpsim
