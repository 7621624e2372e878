#pragma once

#include <span>
#include <vector>

#include "cmdpsim/model.hpp"

namespace cmdpsim {

// Markov chain induced by fixing one policy: a row-stochastic transition
// matrix plus per-state expected one-period reward and cost, with segment
// lengths supplying the probabilities and expectation weights.
struct PolicyChain {
    int num_states = 0;
    std::vector<double> transition; // row-major |X| x |X|
    std::vector<double> expected_reward;
    std::vector<double> expected_cost;

    double at(int from, int to) const {
        return transition[static_cast<size_t>(from) * num_states + to];
    }
};

PolicyChain build_chain(const CmdpModel& model, const Policy& policy);

// Infinite-horizon discounted expectations: solves v = r + discount * P v by
// a direct method, refined to a max-norm residual of at most 1e-12.
std::vector<double> exact_value(const PolicyChain& chain, double gamma);
std::vector<double> exact_cost(const PolicyChain& chain, double beta);

// Finite-horizon expectations by backward recursion from zero; the exact mean
// of a truncated rollout at that horizon.
std::vector<double> exact_finite_value(const PolicyChain& chain, double gamma, int horizon);
std::vector<double> exact_finite_cost(const PolicyChain& chain, double beta, int horizon);

// Ground-truth evaluations of every policy at the model's initial state.
struct OracleReport {
    std::vector<int> horizons;
    std::vector<double> value; // infinite-horizon value per policy
    std::vector<double> cost;  // infinite-horizon cost per policy
    std::vector<std::vector<double>> value_h; // [horizon index][policy]
    std::vector<std::vector<double>> cost_h;

    int num_policies() const { return static_cast<int>(value.size()); }
};

OracleReport oracle_report(const CmdpModel& model, const PolicySet& set,
                           std::span<const int> horizons);

// Policies whose true cost is at most budget + epsilon; epsilon may be
// negative. Indices ascend.
std::vector<int> exact_feasible_set(std::span<const double> costs, double budget,
                                    double epsilon);

struct FeasibleOptimal {
    bool solvable = false;    // false when no policy meets the budget
    std::vector<int> optimal; // all maximizers of the value among feasible policies
    double value = 0.0;
};

FeasibleOptimal feasible_optimal(std::span<const double> values, std::span<const double> costs,
                                 double budget);

} // namespace cmdpsim
