#pragma once

#include <cstdint>

#include "cmdpsim/model.hpp"

namespace cmdpsim {

// Recipe for a random normalized instance. With force_feasible set, rejection
// sampling continues until some policy meets the budget; with distinct_values
// set, until all policy values at the initial state are pairwise at least
// `margin` apart. Generation is deterministic in the seed.
struct InstanceSpec {
    int num_states = 1;
    int actions_per_state = 1;
    int segments_per_action = 1;
    double gamma = 0.9;
    double beta = 0.9;
    double r_max = 1.0;
    double c_max = 1.0;
    int num_policies = 1;
    std::uint64_t seed = 0;
    bool force_feasible = false;
    double cost_budget = 0.0; // used by force_feasible
    bool distinct_values = false;
    double margin = 0.0;
    int max_attempts = 1000;
};

struct GeneratedInstance {
    CmdpModel model;
    PolicySet policies;
    int attempts = 0;
};

GeneratedInstance generate_instance(const InstanceSpec& spec);

} // namespace cmdpsim
