#pragma once

#include <string>
#include <vector>

#include "cmdpsim/rng.hpp"

namespace cmdpsim {

// One piece of the disturbance partition of an action: for any draw w in
// [lo, hi) the system moves to next_state and collects the given one-period
// reward and cost. Segment lengths double as transition probabilities.
struct DisturbanceSegment {
    double lo = 0.0;
    double hi = 0.0;
    int next_state = 0;
    double reward = 0.0;
    double cost = 0.0;

    double length() const { return hi - lo; }
};

// Dynamics of one admissible action in one state; the segments form an
// ordered partition of [0,1).
struct ActionDynamics {
    int action = 0;
    std::vector<DisturbanceSegment> segments;
};

// Finite constrained MDP with discounted reward and cost streams. The
// disturbance is uniform on [0,1); rewards, costs and transitions are
// piecewise constant in the disturbance.
struct CmdpModel {
    int num_states = 0;
    std::vector<std::vector<ActionDynamics>> dynamics; // dynamics[x] lists A(x)
    double gamma = 0.0; // reward discount, in (0,1)
    double beta = 0.0;  // cost discount, in (0,1)
    double r_max = 0.0; // supremum of one-period reward
    double c_max = 0.0; // supremum of one-period cost
    int initial_state = 0;

    int num_actions(int state) const { return static_cast<int>(dynamics[state].size()); }
    const ActionDynamics* find_action(int state, int action) const;
};

// Deterministic stationary policy: one admissible action per state.
struct Policy {
    std::vector<int> action_of; // state -> action id

    bool operator==(const Policy&) const = default;
};

// Indexed finite collection of distinct policies.
struct PolicySet {
    std::vector<Policy> policies;

    int size() const { return static_cast<int>(policies.size()); }
};

// Single truncated rollout: discounted reward and cost sums over `horizon`
// steps from the model's initial state.
struct RolloutSample {
    double value_sum = 0.0;
    double cost_sum = 0.0;
    int horizon = 0;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string joined() const;
};

ValidationReport validate_model(const CmdpModel& model);
ValidationReport validate_policy(const CmdpModel& model, const Policy& policy);
ValidationReport validate_policy_set(const CmdpModel& model, const PolicySet& set);

// Rescales rewards by (1-gamma)/r_max and costs by (1-beta)/c_max so that
// every rollout sum of any policy lands in [0,1]. Zero r_max or c_max leaves
// the corresponding side untouched.
CmdpModel normalize_model(const CmdpModel& model);

struct StepResult {
    int next_state = 0;
    double reward = 0.0;
    double cost = 0.0;
};

// Looks up the unique segment of (state, action) containing w. Deterministic;
// throws on an inadmissible action or w outside [0,1).
StepResult step(const CmdpModel& model, int state, int action, double w);

// Simulates `horizon` steps under `policy` from the initial state, consuming
// exactly `horizon` draws from the stream.
RolloutSample rollout(const CmdpModel& model, const Policy& policy, int horizon,
                      RngStream& stream);

} // namespace cmdpsim
