#include "cmdpsim/model.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cmdpsim {

namespace {

std::string describe(int state, int action) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(state %d, action %d)", state, action);
    return buf;
}

} // namespace

const ActionDynamics* CmdpModel::find_action(int state, int action) const {
    for (const ActionDynamics& table : dynamics[state]) {
        if (table.action == action) return &table;
    }
    return nullptr;
}

std::string ValidationReport::joined() const {
    std::ostringstream out;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) out << "; ";
        out << violations[i];
    }
    return out.str();
}

ValidationReport validate_model(const CmdpModel& model) {
    ValidationReport report;
    auto fail = [&report](const std::string& message) { report.violations.push_back(message); };

    if (model.num_states <= 0) {
        fail("num_states must be positive");
        return report;
    }
    if (static_cast<int>(model.dynamics.size()) != model.num_states)
        fail("dynamics must list every state");
    if (!(model.gamma > 0.0 && model.gamma < 1.0)) fail("gamma must lie in (0,1)");
    if (!(model.beta > 0.0 && model.beta < 1.0)) fail("beta must lie in (0,1)");
    if (!(model.r_max >= 0.0)) fail("r_max must be nonnegative");
    if (!(model.c_max >= 0.0)) fail("c_max must be nonnegative");
    if (model.initial_state < 0 || model.initial_state >= model.num_states)
        fail("initial_state out of range");

    for (int x = 0; x < static_cast<int>(model.dynamics.size()); ++x) {
        const auto& tables = model.dynamics[x];
        if (tables.empty()) {
            fail("state " + std::to_string(x) + " has no admissible action");
            continue;
        }
        std::set<int> seen;
        for (const ActionDynamics& table : tables) {
            if (!seen.insert(table.action).second)
                fail("state " + std::to_string(x) + " lists action " +
                     std::to_string(table.action) + " twice");
            const std::string where = describe(x, table.action);
            if (table.segments.empty()) {
                fail("segments do not partition [0,1) for " + where);
                continue;
            }
            bool partition_ok = table.segments.front().lo == 0.0 &&
                                table.segments.back().hi == 1.0;
            for (size_t k = 0; k < table.segments.size(); ++k) {
                const DisturbanceSegment& seg = table.segments[k];
                if (!(seg.lo < seg.hi)) partition_ok = false;
                if (k + 1 < table.segments.size() &&
                    seg.hi != table.segments[k + 1].lo)
                    partition_ok = false;
                if (seg.next_state < 0 || seg.next_state >= model.num_states)
                    fail("next_state out of range for " + where);
                if (!(seg.reward >= 0.0 && seg.reward <= model.r_max))
                    fail("reward outside [0, r_max] for " + where);
                if (!(seg.cost >= 0.0 && seg.cost <= model.c_max))
                    fail("cost outside [0, c_max] for " + where);
            }
            if (!partition_ok) fail("segments do not partition [0,1) for " + where);
        }
    }
    return report;
}

ValidationReport validate_policy(const CmdpModel& model, const Policy& policy) {
    ValidationReport report;
    if (static_cast<int>(policy.action_of.size()) != model.num_states) {
        report.violations.push_back("policy must map every state");
        return report;
    }
    for (int x = 0; x < model.num_states; ++x) {
        if (model.find_action(x, policy.action_of[x]) == nullptr)
            report.violations.push_back("action not in A(x) at state " + std::to_string(x));
    }
    return report;
}

ValidationReport validate_policy_set(const CmdpModel& model, const PolicySet& set) {
    ValidationReport report;
    if (set.policies.empty()) {
        report.violations.push_back("policy set is empty");
        return report;
    }
    for (int i = 0; i < set.size(); ++i) {
        ValidationReport one = validate_policy(model, set.policies[i]);
        for (const std::string& violation : one.violations)
            report.violations.push_back("policy " + std::to_string(i) + ": " + violation);
        for (int j = i + 1; j < set.size(); ++j) {
            if (set.policies[i] == set.policies[j])
                report.violations.push_back("policies " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are duplicates");
        }
    }
    return report;
}

CmdpModel normalize_model(const CmdpModel& model) {
    CmdpModel out = model;
    const bool scale_rewards = model.r_max > 0.0;
    const bool scale_costs = model.c_max > 0.0;
    const double reward_scale = scale_rewards ? (1.0 - model.gamma) / model.r_max : 1.0;
    const double cost_scale = scale_costs ? (1.0 - model.beta) / model.c_max : 1.0;
    if (scale_rewards) out.r_max = 1.0 - model.gamma;
    if (scale_costs) out.c_max = 1.0 - model.beta;
    for (auto& tables : out.dynamics) {
        for (ActionDynamics& table : tables) {
            for (DisturbanceSegment& seg : table.segments) {
                if (scale_rewards) seg.reward = std::min(seg.reward * reward_scale, out.r_max);
                if (scale_costs) seg.cost = std::min(seg.cost * cost_scale, out.c_max);
            }
        }
    }
    return out;
}

StepResult step(const CmdpModel& model, int state, int action, double w) {
    if (state < 0 || state >= model.num_states)
        throw std::out_of_range("state out of range");
    if (!(w >= 0.0 && w < 1.0)) throw std::invalid_argument("disturbance must lie in [0,1)");
    const ActionDynamics* table = model.find_action(state, action);
    if (table == nullptr) throw std::invalid_argument("action not in A(x)");
    for (const DisturbanceSegment& seg : table->segments) {
        if (w < seg.hi) return {seg.next_state, seg.reward, seg.cost};
    }
    // Unreachable on a validated model; the last segment ends at 1.0.
    const DisturbanceSegment& last = table->segments.back();
    return {last.next_state, last.reward, last.cost};
}

RolloutSample rollout(const CmdpModel& model, const Policy& policy, int horizon,
                      RngStream& stream) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    RolloutSample out;
    out.horizon = horizon;
    int state = model.initial_state;
    double gamma_pow = 1.0;
    double beta_pow = 1.0;
    for (int t = 0; t < horizon; ++t) {
        const double w = stream.next_uniform();
        const ActionDynamics* table = model.find_action(state, policy.action_of[state]);
        if (table == nullptr) throw std::invalid_argument("action not in A(x)");
        const DisturbanceSegment* hit = &table->segments.back();
        for (const DisturbanceSegment& seg : table->segments) {
            if (w < seg.hi) {
                hit = &seg;
                break;
            }
        }
        out.value_sum += gamma_pow * hit->reward;
        out.cost_sum += beta_pow * hit->cost;
        gamma_pow *= model.gamma;
        beta_pow *= model.beta;
        state = hit->next_state;
    }
    return out;
}

} // namespace cmdpsim
