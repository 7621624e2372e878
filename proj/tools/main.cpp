#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmdpsim/bounds.hpp"
#include "cmdpsim/errors.hpp"
#include "cmdpsim/experiment.hpp"
#include "cmdpsim/generator.hpp"
#include "cmdpsim/io.hpp"
#include "cmdpsim/oracle.hpp"
#include "cmdpsim/selector.hpp"

namespace {

using namespace cmdpsim;

void print_quantity(const char* name, double value) {
    std::cout << name << ' ' << format_double(value) << '\n';
}

int cmd_check(const std::string& model_path, const std::string& policy_path) {
    const CmdpModel model = load_model(model_path);
    std::cout << "model ok: " << model.num_states << " states\n";
    if (!policy_path.empty()) {
        const PolicySet set = load_policy_set(policy_path, model);
        std::cout << "policy set ok: " << set.size() << " policies\n";
    }
    return 0;
}

int cmd_generate(const InstanceSpec& spec, const std::string& out_model,
                 const std::string& out_policies) {
    const GeneratedInstance instance = generate_instance(spec);
    save_model(instance.model, out_model);
    save_policy_set(instance.policies, out_policies);
    std::cout << "generated after " << instance.attempts << " attempt(s): " << out_model
              << ", " << out_policies << '\n';
    return 0;
}

int cmd_oracle(const std::string& model_path, const std::string& policy_path,
               double cost_budget, const std::vector<int>& horizons,
               const std::vector<double>& epsilons, const std::string& out_csv) {
    const CmdpModel model = load_model(model_path);
    const PolicySet set = load_policy_set(policy_path, model);
    const OracleReport report = oracle_report(model, set, horizons);
    write_oracle_csv(report, out_csv);
    std::cout << "wrote " << out_csv << '\n';
    for (double eps : epsilons) {
        const std::vector<int> feasible = exact_feasible_set(report.cost, cost_budget, eps);
        std::cout << "feasible(eps=" << format_double(eps) << ") = "
                  << feasible_mask(feasible, set.size()) << '\n';
    }
    const FeasibleOptimal best = feasible_optimal(report.value, report.cost, cost_budget);
    if (!best.solvable) {
        std::cout << "infeasible problem: no policy meets the budget\n";
    } else {
        std::cout << "optimal value " << format_double(best.value) << " at policy";
        for (int p : best.optimal) std::cout << ' ' << p;
        std::cout << '\n';
    }
    return 0;
}

int cmd_run(const std::string& algo_name, const std::string& model_path,
            const std::string& policy_path, double cost_budget, int num_iterations,
            int horizon, std::uint64_t seed, const std::string& out_csv) {
    if (algo_name != "ftal" && algo_name != "auer")
        throw ValidationError("algo must be ftal or auer");
    const Algorithm algo = algo_name == "ftal" ? Algorithm::kFtal : Algorithm::kAuer;
    const CmdpModel model = load_model(model_path);
    const PolicySet set = load_policy_set(policy_path, model);
    const RunTrace trace = run(algo, model, set, cost_budget, num_iterations, horizon, seed);
    write_trace_csv(trace, out_csv);
    const IterationRecord& last = trace.iterations.back();
    std::cout << "wrote " << out_csv << '\n';
    std::cout << "final chosen policy " << last.chosen << " (feasible mask "
              << feasible_mask(last.feasible, set.size()) << ")\n";
    return 0;
}

int cmd_bounds(int num_policies, double epsilon, double alpha_h, std::int64_t num_iterations,
               std::optional<double> r_h, std::optional<double> delta,
               const std::vector<double>& values, const std::vector<int>& feasible) {
    const SandwichBound sandwich = sandwich_bound(num_policies, epsilon, alpha_h, num_iterations);
    print_quantity("sandwich_bound_raw", sandwich.raw);
    print_quantity("sandwich_bound", sandwich.value);
    print_quantity("sandwich_rate_constant", sandwich_rate_constant(epsilon, alpha_h));
    if (r_h && !values.empty() && !feasible.empty()) {
        const TruncationConstants constants{alpha_h, *r_h};
        const SelectionBound selection =
            selection_bound(values, feasible, epsilon, constants, num_iterations);
        print_quantity("selection_bound", selection.value);
        print_quantity("selection_bound_first_factor", selection.first_factor);
        print_quantity("selection_bound_second_factor", selection.second_factor);
    }
    if (!values.empty()) {
        const double d = delta ? *delta : 1.0 / static_cast<double>(num_iterations);
        const GapStructure gaps = gap_structure(values, 0.0, d);
        if (gaps.min_positive_gap)
            print_quantity("min_positive_gap", *gaps.min_positive_gap);
        else
            std::cout << "min_positive_gap none\n";
        const RegretRhs ftal_rhs = expected_regret_rhs(gaps, num_iterations, RateModel::kOneOverN);
        const RegretRhs auer_rhs = expected_regret_rhs(gaps, num_iterations, RateModel::kLogOverN);
        print_quantity("ftal_regret_rhs", ftal_rhs.value);
        print_quantity("auer_regret_rhs", auer_rhs.value);
        if (ftal_rhs.flagged_terms > 0)
            std::cout << "flagged_terms " << ftal_rhs.flagged_terms << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation-based policy selection for constrained MDPs"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "validate model and policy files");
    std::string check_model;
    std::string check_policies;
    check->add_option("--model", check_model, "model file")->required();
    check->add_option("--policies", check_policies, "policy-set file");

    // generate
    auto* generate = app.add_subcommand("generate", "draw a random normalized instance");
    InstanceSpec spec;
    std::string out_model = "model.json";
    std::string out_policies = "policies.json";
    generate->add_option("--states", spec.num_states, "number of states")->required();
    generate->add_option("--actions", spec.actions_per_state, "actions per state")->required();
    generate->add_option("--segments", spec.segments_per_action, "segments per action")
        ->required();
    generate->add_option("--gamma", spec.gamma, "reward discount");
    generate->add_option("--beta", spec.beta, "cost discount");
    generate->add_option("--r-max", spec.r_max, "reward bound before normalization");
    generate->add_option("--c-max", spec.c_max, "cost bound before normalization");
    generate->add_option("--num-policies", spec.num_policies, "policy set size")->required();
    generate->add_option("--seed", spec.seed, "generation seed");
    generate->add_flag("--force-feasible", spec.force_feasible,
                       "reject instances with no policy within the budget");
    generate->add_option("--budget", spec.cost_budget, "budget used by --force-feasible");
    generate->add_flag("--distinct-values", spec.distinct_values,
                       "reject instances with close policy values");
    generate->add_option("--margin", spec.margin, "pairwise value margin");
    generate->add_option("--max-attempts", spec.max_attempts, "rejection cap");
    generate->add_option("--out-model", out_model, "model output path");
    generate->add_option("--out-policies", out_policies, "policy-set output path");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact policy evaluations and feasible sets");
    std::string oracle_model;
    std::string oracle_policies;
    double oracle_budget = 0.0;
    std::vector<int> oracle_horizons;
    std::vector<double> oracle_epsilons;
    std::string oracle_out = "oracle.csv";
    oracle->add_option("--model", oracle_model, "model file")->required();
    oracle->add_option("--policies", oracle_policies, "policy-set file")->required();
    oracle->add_option("--budget", oracle_budget, "cost budget")->required();
    oracle->add_option("--H", oracle_horizons, "finite horizons to evaluate");
    oracle->add_option("--epsilon", oracle_epsilons, "feasibility slacks to report");
    oracle->add_option("--out", oracle_out, "CSV output path");

    // run
    auto* run_cmd = app.add_subcommand("run", "one selection run, trace to CSV");
    std::string run_algo = "ftal";
    std::string run_model;
    std::string run_policies;
    double run_budget = 0.0;
    int run_iters = 1;
    int run_horizon = 1;
    std::uint64_t run_seed = 0;
    std::string run_out = "trace.csv";
    run_cmd->add_option("--algo", run_algo, "ftal or auer")->required();
    run_cmd->add_option("--model", run_model, "model file")->required();
    run_cmd->add_option("--policies", run_policies, "policy-set file")->required();
    run_cmd->add_option("--budget", run_budget, "cost budget")->required();
    run_cmd->add_option("--N", run_iters, "number of iterations")->required();
    run_cmd->add_option("--H", run_horizon, "rollout horizon")->required();
    run_cmd->add_option("--seed", run_seed, "run seed");
    run_cmd->add_option("--out", run_out, "trace output path");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "replication sweep from a config file");
    std::string config_path;
    int override_reps = 0;
    std::uint64_t override_seed = 0;
    std::string override_out;
    std::string override_algo;
    bool no_traces = false;
    experiment->add_option("--config", config_path, "experiment config file")->required();
    auto* reps_opt =
        experiment->add_option("--replications", override_reps, "override replication count");
    auto* seed_opt = experiment->add_option("--seed", override_seed, "override master seed");
    auto* out_opt = experiment->add_option("--output-dir", override_out, "override output dir");
    auto* algo_opt =
        experiment->add_option("--algorithm", override_algo, "override algorithm selection");
    experiment->add_flag("--no-traces", no_traces, "skip per-replication trace files");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "closed-form bound quantities");
    int bounds_policies = 0;
    double bounds_epsilon = 0.0;
    double bounds_alpha = 0.0;
    std::int64_t bounds_iters = 1;
    std::optional<double> bounds_rh;
    std::optional<double> bounds_delta;
    std::vector<double> bounds_values;
    std::vector<int> bounds_feasible;
    bounds->add_option("--policies", bounds_policies, "policy set size")->required();
    bounds->add_option("--epsilon", bounds_epsilon, "feasibility slack")->required();
    bounds->add_option("--alphaH", bounds_alpha, "cost truncation constant")->required();
    bounds->add_option("--N", bounds_iters, "number of iterations")->required();
    double rh_value = 0.0;
    auto* rh_opt = bounds->add_option("--rH", rh_value, "reward truncation constant");
    double delta_value = 0.0;
    auto* delta_opt = bounds->add_option("--delta", delta_value, "regret-bound delta");
    bounds->add_option("--values", bounds_values, "per-policy finite-horizon values");
    bounds->add_option("--feasible", bounds_feasible, "feasible-set estimate indices");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (check->parsed()) return cmd_check(check_model, check_policies);
        if (generate->parsed()) return cmd_generate(spec, out_model, out_policies);
        if (oracle->parsed())
            return cmd_oracle(oracle_model, oracle_policies, oracle_budget, oracle_horizons,
                              oracle_epsilons, oracle_out);
        if (run_cmd->parsed())
            return cmd_run(run_algo, run_model, run_policies, run_budget, run_iters,
                           run_horizon, run_seed, run_out);
        if (experiment->parsed()) {
            ExperimentConfig config = load_experiment_config(config_path);
            if (reps_opt->count() > 0) config.replications = override_reps;
            if (seed_opt->count() > 0) config.seed = override_seed;
            if (out_opt->count() > 0) config.output_dir = override_out;
            if (algo_opt->count() > 0) config.algorithms = override_algo;
            if (no_traces) config.write_traces = false;
            const ExperimentSummary summary = run_experiment(config);
            std::cout << summary.runs << " runs, " << summary.failures << " failures\n";
            return summary.failures == 0 ? 0 : 2;
        }
        if (bounds->parsed()) {
            if (rh_opt->count() > 0) bounds_rh = rh_value;
            if (delta_opt->count() > 0) bounds_delta = delta_value;
            return cmd_bounds(bounds_policies, bounds_epsilon, bounds_alpha, bounds_iters,
                              bounds_rh, bounds_delta, bounds_values, bounds_feasible);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
