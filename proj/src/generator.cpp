#include "cmdpsim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmdpsim/errors.hpp"
#include "cmdpsim/oracle.hpp"

namespace cmdpsim {

namespace {

// Strictly increasing interior cut points for one stick-breaking partition.
std::vector<double> draw_cuts(RngStream& stream, int segments) {
    std::vector<double> cuts(segments - 1);
    while (true) {
        for (double& c : cuts) c = stream.next_uniform();
        std::sort(cuts.begin(), cuts.end());
        bool strict = true;
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (cuts[k] == cuts[k + 1]) strict = false;
        }
        if (!cuts.empty() && cuts.front() == 0.0) strict = false;
        if (strict) return cuts;
    }
}

CmdpModel draw_model(const InstanceSpec& spec, int attempt) {
    CmdpModel model;
    model.num_states = spec.num_states;
    model.gamma = spec.gamma;
    model.beta = spec.beta;
    model.r_max = spec.r_max;
    model.c_max = spec.c_max;
    model.initial_state = 0;
    RngStream stream(spec.seed, StreamPurpose::kInstanceGen,
                     static_cast<std::uint64_t>(attempt), 0);
    for (int x = 0; x < spec.num_states; ++x) {
        std::vector<ActionDynamics> tables;
        for (int a = 0; a < spec.actions_per_state; ++a) {
            ActionDynamics table;
            table.action = a;
            const std::vector<double> cuts = draw_cuts(stream, spec.segments_per_action);
            double lo = 0.0;
            for (int k = 0; k < spec.segments_per_action; ++k) {
                DisturbanceSegment seg;
                seg.lo = lo;
                seg.hi = k + 1 < spec.segments_per_action ? cuts[k] : 1.0;
                seg.next_state =
                    static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(spec.num_states));
                seg.reward = stream.next_uniform() * spec.r_max;
                seg.cost = stream.next_uniform() * spec.c_max;
                table.segments.push_back(seg);
                lo = seg.hi;
            }
            tables.push_back(std::move(table));
        }
        model.dynamics.push_back(std::move(tables));
    }
    return normalize_model(model);
}

PolicySet draw_policies(const InstanceSpec& spec, int attempt) {
    PolicySet set;
    RngStream stream(spec.seed, StreamPurpose::kPolicyGen, static_cast<std::uint64_t>(attempt),
                     0);
    int rejections = 0;
    while (set.size() < spec.num_policies) {
        Policy policy;
        policy.action_of.resize(spec.num_states);
        for (int x = 0; x < spec.num_states; ++x)
            policy.action_of[x] = static_cast<int>(
                stream.next_u64() % static_cast<std::uint64_t>(spec.actions_per_state));
        const bool duplicate =
            std::find(set.policies.begin(), set.policies.end(), policy) != set.policies.end();
        if (duplicate) {
            if (++rejections > 1000 * spec.num_policies)
                throw GenerationError(
                    "cannot draw enough distinct policies; shrink num_policies or grow the model");
            continue;
        }
        set.policies.push_back(std::move(policy));
    }
    return set;
}

bool meets_flags(const InstanceSpec& spec, const CmdpModel& model, const PolicySet& set) {
    if (!spec.force_feasible && !spec.distinct_values) return true;
    std::vector<double> values;
    std::vector<double> costs;
    const int x0 = model.initial_state;
    for (const Policy& policy : set.policies) {
        const PolicyChain chain = build_chain(model, policy);
        values.push_back(exact_value(chain, model.gamma)[x0]);
        costs.push_back(exact_cost(chain, model.beta)[x0]);
    }
    if (spec.force_feasible) {
        const double lowest = *std::min_element(costs.begin(), costs.end());
        if (!(lowest <= spec.cost_budget)) return false;
    }
    if (spec.distinct_values) {
        for (size_t i = 0; i < values.size(); ++i) {
            for (size_t j = i + 1; j < values.size(); ++j) {
                if (std::fabs(values[i] - values[j]) < spec.margin) return false;
            }
        }
    }
    return true;
}

} // namespace

GeneratedInstance generate_instance(const InstanceSpec& spec) {
    if (spec.num_states < 1 || spec.actions_per_state < 1 || spec.segments_per_action < 1 ||
        spec.num_policies < 1)
        throw std::invalid_argument("instance spec counts must be positive");
    if (spec.margin < 0.0) throw std::invalid_argument("margin must be nonnegative");
    if (spec.force_feasible && !(spec.cost_budget > 0.0))
        throw std::invalid_argument("force_feasible needs a positive cost_budget");

    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        GeneratedInstance out;
        out.model = draw_model(spec, attempt);
        out.policies = draw_policies(spec, attempt);
        out.attempts = attempt + 1;
        const ValidationReport report = validate_model(out.model);
        if (!report.ok()) throw std::runtime_error("generator bug: " + report.joined());
        if (meets_flags(spec, out.model, out.policies)) return out;
    }
    throw GenerationError("no instance met the requested flags within " +
                          std::to_string(spec.max_attempts) +
                          " attempts; relax margin, budget or sizes");
}

} // namespace cmdpsim
