#pragma once

#include <string>
#include <vector>

#include "cmdpsim/model.hpp"
#include "cmdpsim/oracle.hpp"
#include "cmdpsim/selector.hpp"

namespace cmdpsim {

// Model and policy-set files are JSON documents; the schemas are described in
// the README. Loaders validate every invariant and throw ValidationError with
// the violation text on failure.
CmdpModel load_model(const std::string& path);
void save_model(const CmdpModel& model, const std::string& path);

PolicySet load_policy_set(const std::string& path, const CmdpModel& model);
void save_policy_set(const PolicySet& set, const std::string& path);

// Shortest round-trip decimal form of a double; stable across runs.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& text);

// Feasible-set membership rendered as a 0/1 string, policy 0 first.
std::string feasible_mask(const std::vector<int>& feasible, int num_policies);

// Row-per-iteration trace: n, feasible mask, chosen policy, chosen policy's
// value mean after the iteration, infeasible flag.
void write_trace_csv(const RunTrace& trace, const std::string& path);

// Row per policy: index, infinite-horizon value and cost, then finite-horizon
// value and cost per requested horizon.
void write_oracle_csv(const OracleReport& report, const std::string& path);

} // namespace cmdpsim
