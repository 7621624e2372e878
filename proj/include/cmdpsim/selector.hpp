#pragma once

#include <cstdint>
#include <vector>

#include "cmdpsim/model.hpp"

namespace cmdpsim {

enum class Algorithm { kFtal, kAuer };

const char* algorithm_name(Algorithm algo);

// Running state of a selection run. Cost means fold in one sample per policy
// per iteration; value means fold in one sample per simulated policy, with
// tau counting those simulations. A value mean is meaningful only once its
// tau is positive (it starts as NaN).
struct SelectorState {
    int n = 1; // iteration about to run, 1-based
    std::vector<double> cost_mean;
    std::vector<double> value_mean;
    std::vector<std::int64_t> tau;
    std::vector<int> feasible_now; // ascending policy indices
    int chosen = -1;
    bool infeasible_now = false;
};

SelectorState make_selector_state(int num_policies);

struct IterationRecord {
    int n = 0;
    std::vector<int> feasible;
    int chosen = -1;
    double chosen_value_mean = 0.0; // after this iteration's updates
    bool infeasible = false;
};

// Full record of one run; reproducible from (model, policies, budget,
// num_iterations, horizon, seed).
struct RunTrace {
    Algorithm algo = Algorithm::kFtal;
    std::uint64_t seed = 0;
    int num_policies = 0;
    double cost_budget = 0.0;
    int num_iterations = 0;
    int horizon = 0;
    std::vector<IterationRecord> iterations;
    SelectorState final_state;
};

// ((count_after - 1) * prev_mean + sample) / count_after; the first sample
// replaces the initialization outright.
double update_running_mean(double prev_mean, std::int64_t count_after, double sample);

// Policies whose current cost mean is at most the budget, boundary inclusive.
std::vector<int> estimate_feasible_set(const SelectorState& state, double cost_budget);

// Awake leader by value mean. Empty awake set falls back to policy 0; an
// awake policy with tau = 0 is taken first; ties go to the lowest index.
int ftal_select(const SelectorState& state);

// Awake policy maximizing value mean + sqrt(8 ln n / tau). Fallback and
// untried-first rules match ftal_select. At n = 1 every awake policy is
// untried, so the ln 1 = 0 bonus is never evaluated there.
int auer_select(const SelectorState& state);

// One iteration: cost sample for every policy, feasible-set estimate,
// selection, then a value sample for every awake policy (incrementing its
// tau), skipped entirely when the awake set is empty.
void ftal_iteration(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                    double cost_budget, int horizon, std::uint64_t seed);

// Same cost and estimation steps, but only the selected policy is value
// simulated.
void auer_iteration(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                    double cost_budget, int horizon, std::uint64_t seed);

RunTrace run(Algorithm algo, const CmdpModel& model, const PolicySet& set, double cost_budget,
             int num_iterations, int horizon, std::uint64_t seed);

// True when the feasible-set estimate was empty at every one of the final
// `window` iterations.
bool insolvability_check(const RunTrace& trace, int window);

} // namespace cmdpsim
