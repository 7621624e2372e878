#include "cmdpsim/selector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cmdpsim/errors.hpp"

namespace cmdpsim {

const char* algorithm_name(Algorithm algo) {
    return algo == Algorithm::kFtal ? "ftal" : "auer";
}

SelectorState make_selector_state(int num_policies) {
    if (num_policies <= 0) throw std::invalid_argument("need at least one policy");
    SelectorState state;
    state.cost_mean.assign(num_policies, 0.0);
    state.value_mean.assign(num_policies, std::numeric_limits<double>::quiet_NaN());
    state.tau.assign(num_policies, 0);
    return state;
}

double update_running_mean(double prev_mean, std::int64_t count_after, double sample) {
    if (count_after < 1) throw std::invalid_argument("count_after must be at least 1");
    if (count_after == 1) return sample;
    const double count = static_cast<double>(count_after);
    return ((count - 1.0) * prev_mean + sample) / count;
}

std::vector<int> estimate_feasible_set(const SelectorState& state, double cost_budget) {
    std::vector<int> feasible;
    for (int p = 0; p < static_cast<int>(state.cost_mean.size()); ++p) {
        if (state.cost_mean[p] <= cost_budget) feasible.push_back(p);
    }
    return feasible;
}

int ftal_select(const SelectorState& state) {
    if (state.feasible_now.empty()) return 0;
    for (int p : state.feasible_now) {
        if (state.tau[p] == 0) return p;
    }
    int best = state.feasible_now.front();
    for (int p : state.feasible_now) {
        if (state.value_mean[p] > state.value_mean[best]) best = p;
    }
    return best;
}

int auer_select(const SelectorState& state) {
    if (state.feasible_now.empty()) return 0;
    for (int p : state.feasible_now) {
        if (state.tau[p] == 0) return p;
    }
    const double log_n = std::log(static_cast<double>(state.n));
    int best = -1;
    double best_index = -std::numeric_limits<double>::infinity();
    for (int p : state.feasible_now) {
        const double bonus = std::sqrt(8.0 * log_n / static_cast<double>(state.tau[p]));
        const double index = state.value_mean[p] + bonus;
        if (index > best_index) {
            best_index = index;
            best = p;
        }
    }
    return best;
}

namespace {

void fold_cost_samples(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                       double cost_budget, int horizon, std::uint64_t seed) {
    const int n = state.n;
    for (int p = 0; p < set.size(); ++p) {
        RngStream stream(seed, StreamPurpose::kCostSim, static_cast<std::uint64_t>(p),
                         static_cast<std::uint64_t>(n));
        const RolloutSample sample = rollout(model, set.policies[p], horizon, stream);
        state.cost_mean[p] = update_running_mean(state.cost_mean[p], n, sample.cost_sum);
    }
    state.feasible_now = estimate_feasible_set(state, cost_budget);
    state.infeasible_now = state.feasible_now.empty();
}

void fold_value_sample(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                       int policy, int horizon, std::uint64_t seed) {
    RngStream stream(seed, StreamPurpose::kValueSim, static_cast<std::uint64_t>(policy),
                     static_cast<std::uint64_t>(state.n));
    const RolloutSample sample = rollout(model, set.policies[policy], horizon, stream);
    state.value_mean[policy] =
        update_running_mean(state.value_mean[policy], state.tau[policy] + 1, sample.value_sum);
    state.tau[policy] += 1;
}

} // namespace

void ftal_iteration(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                    double cost_budget, int horizon, std::uint64_t seed) {
    fold_cost_samples(state, model, set, cost_budget, horizon, seed);
    state.chosen = ftal_select(state);
    for (int p : state.feasible_now) fold_value_sample(state, model, set, p, horizon, seed);
    state.n += 1;
}

void auer_iteration(SelectorState& state, const CmdpModel& model, const PolicySet& set,
                    double cost_budget, int horizon, std::uint64_t seed) {
    fold_cost_samples(state, model, set, cost_budget, horizon, seed);
    state.chosen = auer_select(state);
    if (!state.infeasible_now) fold_value_sample(state, model, set, state.chosen, horizon, seed);
    state.n += 1;
}

RunTrace run(Algorithm algo, const CmdpModel& model, const PolicySet& set, double cost_budget,
             int num_iterations, int horizon, std::uint64_t seed) {
    if (num_iterations < 1) throw std::invalid_argument("need at least one iteration");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    const ValidationReport model_report = validate_model(model);
    if (!model_report.ok()) throw ValidationError("invalid model: " + model_report.joined());
    const ValidationReport set_report = validate_policy_set(model, set);
    if (!set_report.ok()) throw ValidationError("invalid policy set: " + set_report.joined());

    RunTrace trace;
    trace.algo = algo;
    trace.seed = seed;
    trace.num_policies = set.size();
    trace.cost_budget = cost_budget;
    trace.num_iterations = num_iterations;
    trace.horizon = horizon;
    trace.iterations.reserve(num_iterations);

    SelectorState state = make_selector_state(set.size());
    for (int n = 1; n <= num_iterations; ++n) {
        if (algo == Algorithm::kFtal) {
            ftal_iteration(state, model, set, cost_budget, horizon, seed);
        } else {
            auer_iteration(state, model, set, cost_budget, horizon, seed);
        }
        IterationRecord record;
        record.n = n;
        record.feasible = state.feasible_now;
        record.chosen = state.chosen;
        record.chosen_value_mean = state.value_mean[state.chosen];
        record.infeasible = state.infeasible_now;
        trace.iterations.push_back(std::move(record));
    }
    trace.final_state = std::move(state);
    return trace;
}

bool insolvability_check(const RunTrace& trace, int window) {
    const int n = static_cast<int>(trace.iterations.size());
    if (window < 1 || window > n)
        throw std::invalid_argument("window must lie in [1, num_iterations]");
    for (int i = n - window; i < n; ++i) {
        if (!trace.iterations[i].infeasible) return false;
    }
    return true;
}

} // namespace cmdpsim
