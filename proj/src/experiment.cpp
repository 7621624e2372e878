#include "cmdpsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cmdpsim/bounds.hpp"
#include "cmdpsim/errors.hpp"
#include "cmdpsim/io.hpp"
#include "cmdpsim/oracle.hpp"
#include "cmdpsim/selector.hpp"

namespace cmdpsim {

using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<Algorithm> parse_algorithms(const std::string& name) {
    if (name == "ftal") return {Algorithm::kFtal};
    if (name == "auer") return {Algorithm::kAuer};
    if (name == "both") return {Algorithm::kFtal, Algorithm::kAuer};
    throw ValidationError("unknown algorithm selection: " + name);
}

bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

struct CellStats {
    // Per replication, in replication order.
    std::vector<double> regrets;
    std::vector<double> avg_best;
    std::vector<double> avg_chosen;
    std::vector<bool> selection_hit;
    std::vector<double> selection_bounds;
};

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return kNan;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return kNan;
    const double mean = mean_of(xs);
    double sq = 0.0;
    for (double x : xs) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / (static_cast<double>(xs.size()) - 1.0) /
                     static_cast<double>(xs.size()));
}

std::string trace_filename(Algorithm algo, int horizon, int n, int rep) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "trace_%s_H%d_N%d_r%d.csv", algorithm_name(algo), horizon,
                  n, rep);
    return buf;
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    ExperimentConfig config;
    try {
        config.model_path = doc.at("model").get<std::string>();
        config.policy_path = doc.at("policies").get<std::string>();
        config.cost_budget = doc.at("cost_budget").get<double>();
        config.n_schedule = doc.at("N").get<std::vector<int>>();
        config.h_schedule = doc.at("H").get<std::vector<int>>();
        config.epsilons = doc.value("epsilon", std::vector<double>{});
        config.replications = doc.value("replications", 1);
        config.seed = doc.value("seed", static_cast<std::uint64_t>(0));
        config.algorithms = doc.value("algorithm", std::string("both"));
        config.output_dir = doc.value("output_dir", std::string("."));
        config.write_traces = doc.value("write_traces", true);
        if (doc.contains("delta")) config.delta = doc.at("delta").get<double>();
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return config;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    if (config.n_schedule.empty() || config.h_schedule.empty())
        throw ValidationError("N and H schedules must be nonempty");
    if (config.replications < 1) throw ValidationError("replications must be at least 1");
    if (!(config.cost_budget > 0.0)) throw ValidationError("cost_budget must be positive");
    const std::vector<Algorithm> algos = parse_algorithms(config.algorithms);

    const CmdpModel model = load_model(config.model_path);
    const PolicySet policies = load_policy_set(config.policy_path, model);
    std::filesystem::create_directories(config.output_dir);
    const auto out_path = [&config](const std::string& name) {
        return (std::filesystem::path(config.output_dir) / name).string();
    };

    const OracleReport oracle = oracle_report(model, policies, config.h_schedule);
    write_oracle_csv(oracle, out_path("oracle.csv"));
    const FeasibleOptimal optimum =
        feasible_optimal(oracle.value, oracle.cost, config.cost_budget);

    bool values_distinct = true;
    for (size_t i = 0; i < oracle.value.size() && values_distinct; ++i) {
        for (size_t j = i + 1; j < oracle.value.size(); ++j) {
            if (oracle.value[i] == oracle.value[j]) {
                values_distinct = false;
                break;
            }
        }
    }

    ExperimentSummary summary;
    std::ostringstream sandwich_rows;
    std::ostringstream regret_rows;
    std::ostringstream selection_rows;
    std::ostringstream fits_rows;
    std::ostringstream bound_rows;

    for (size_t h_index = 0; h_index < config.h_schedule.size(); ++h_index) {
        const int horizon = config.h_schedule[h_index];
        const TruncationConstants constants = truncation_constants(model, horizon);
        const std::vector<double>& values_h = oracle.value_h[h_index];
        const GapStructure gaps = gap_structure(values_h, 0.0, 0.0);

        // regret curves per algorithm, in N order, for the rate fits
        std::vector<std::vector<std::pair<double, double>>> curves(algos.size());

        for (int n_iters : config.n_schedule) {
            // Closed-form quantities for this cell; delta defaults to 1/N.
            const double delta =
                config.delta ? *config.delta : 1.0 / static_cast<double>(n_iters);
            const GapStructure rhs_gaps = gap_structure(values_h, 0.0, delta);
            const RegretRhs ftal_rhs = expected_regret_rhs(rhs_gaps, n_iters,
                                                           RateModel::kOneOverN);
            const RegretRhs auer_rhs = expected_regret_rhs(rhs_gaps, n_iters,
                                                           RateModel::kLogOverN);
            for (double eps : config.epsilons) {
                const double bound =
                    eps > constants.alpha_h
                        ? sandwich_bound(policies.size(), eps, constants.alpha_h, n_iters).value
                        : kNan;
                bound_rows << n_iters << ',' << horizon << ',' << format_double(eps) << ','
                           << format_double(delta) << ',' << config.replications << ','
                           << format_double(constants.alpha_h) << ','
                           << format_double(constants.r_h) << ',' << format_double(bound)
                           << ',' << format_double(ftal_rhs.value) << ','
                           << format_double(auer_rhs.value) << ',' << ftal_rhs.flagged_terms
                           << '\n';
            }

            std::vector<CellStats> stats(algos.size());
            std::vector<int> sandwich_success(config.epsilons.size(), 0);
            std::vector<std::vector<int>> inner_sets;
            std::vector<std::vector<int>> outer_sets;
            for (double eps : config.epsilons) {
                inner_sets.push_back(exact_feasible_set(oracle.cost, config.cost_budget, -eps));
                outer_sets.push_back(exact_feasible_set(oracle.cost, config.cost_budget, eps));
            }

            for (int rep = 1; rep <= config.replications; ++rep) {
                const std::uint64_t run_seed =
                    derive_seed(config.seed, static_cast<std::uint64_t>(n_iters),
                                static_cast<std::uint64_t>(horizon),
                                static_cast<std::uint64_t>(rep));
                for (size_t a = 0; a < algos.size(); ++a) {
                    summary.runs += 1;
                    try {
                        const RunTrace trace = run(algos[a], model, policies,
                                                   config.cost_budget, n_iters, horizon,
                                                   run_seed);
                        if (config.write_traces)
                            write_trace_csv(
                                trace, out_path(trace_filename(algos[a], horizon, n_iters, rep)));

                        CellStats& cell = stats[a];
                        // Undefined metrics (every iteration starved) simply
                        // drop out of the averages.
                        if (const auto metric = regret_metric(trace, values_h)) {
                            cell.regrets.push_back(metric->regret);
                            cell.avg_best.push_back(metric->avg_best);
                            cell.avg_chosen.push_back(metric->avg_chosen);
                        }
                        const int final_choice = trace.iterations.back().chosen;
                        const bool hit = optimum.solvable &&
                                         std::find(optimum.optimal.begin(),
                                                   optimum.optimal.end(),
                                                   final_choice) != optimum.optimal.end();
                        cell.selection_hit.push_back(hit);
                        const std::vector<int>& estimate =
                            trace.final_state.feasible_now;
                        // Selection bound uses the first epsilon the bound
                        // is defined for.
                        if (values_distinct && !estimate.empty()) {
                            for (double eps : config.epsilons) {
                                if (eps > constants.alpha_h) {
                                    cell.selection_bounds.push_back(
                                        selection_bound(oracle.value, estimate, eps,
                                                        constants, n_iters)
                                            .value);
                                    break;
                                }
                            }
                        }
                        // The feasible-set estimate only depends on the cost
                        // streams, which the paired algorithms share.
                        if (a == 0) {
                            for (size_t e = 0; e < config.epsilons.size(); ++e) {
                                if (is_subset(inner_sets[e], estimate) &&
                                    is_subset(estimate, outer_sets[e]))
                                    sandwich_success[e] += 1;
                            }
                        }
                    } catch (const std::exception&) {
                        summary.failures += 1;
                    }
                }
            }

            for (size_t e = 0; e < config.epsilons.size(); ++e) {
                const double eps = config.epsilons[e];
                const double freq = static_cast<double>(sandwich_success[e]) /
                                    static_cast<double>(config.replications);
                double bound = kNan;
                if (eps > constants.alpha_h)
                    bound = sandwich_bound(policies.size(), eps, constants.alpha_h, n_iters)
                                .value;
                const double freq_se =
                    std::sqrt(freq * (1.0 - freq) / static_cast<double>(config.replications));
                sandwich_rows << format_double(eps) << ',' << n_iters << ',' << horizon << ','
                              << format_double(freq) << ',' << format_double(bound) << ','
                              << format_double(freq_se) << '\n';
            }

            for (size_t a = 0; a < algos.size(); ++a) {
                const CellStats& cell = stats[a];
                const double regret_mean = mean_of(cell.regrets);
                regret_rows << algorithm_name(algos[a]) << ',' << n_iters << ',' << horizon
                            << ',' << format_double(mean_of(cell.avg_best)) << ','
                            << format_double(mean_of(cell.avg_chosen)) << ','
                            << format_double(regret_mean) << ','
                            << format_double(stderr_of(cell.regrets)) << '\n';
                if (!cell.regrets.empty())
                    curves[a].emplace_back(static_cast<double>(n_iters), regret_mean);

                int hits = 0;
                for (bool hit : cell.selection_hit) hits += hit ? 1 : 0;
                const double hit_freq = cell.selection_hit.empty()
                                            ? kNan
                                            : static_cast<double>(hits) /
                                                  static_cast<double>(cell.selection_hit.size());
                const double hit_se =
                    cell.selection_hit.empty()
                        ? kNan
                        : std::sqrt(hit_freq * (1.0 - hit_freq) /
                                    static_cast<double>(cell.selection_hit.size()));
                double bound_min = kNan;
                if (!cell.selection_bounds.empty())
                    bound_min = *std::min_element(cell.selection_bounds.begin(),
                                                  cell.selection_bounds.end());
                selection_rows << algorithm_name(algos[a]) << ',' << n_iters << ',' << horizon
                               << ',' << format_double(hit_freq) << ','
                               << format_double(hit_se) << ',' << format_double(bound_min)
                               << ',' << format_double(mean_of(cell.selection_bounds)) << '\n';
            }
        }

        for (size_t a = 0; a < algos.size(); ++a) {
            for (RateModel rate : {RateModel::kOneOverN, RateModel::kLogOverN}) {
                const char* rate_name = rate == RateModel::kOneOverN ? "1/N" : "lnN/N";
                std::string status = "ok";
                RateFit fit;
                if (!gaps.min_positive_gap) {
                    status = "skipped_no_gap";
                } else {
                    int admissible = 0;
                    for (const auto& [n, regret] : curves[a]) {
                        if (n >= 1.0 / *gaps.min_positive_gap) admissible += 1;
                    }
                    if (admissible < 5) {
                        status = "skipped_insufficient_points";
                    } else {
                        fit = *rate_check(curves[a], rate, gaps.min_positive_gap);
                    }
                }
                fits_rows << algorithm_name(algos[a]) << ',' << rate_name << ',' << horizon
                          << ',';
                if (status == "ok")
                    fits_rows << format_double(fit.coefficient) << ','
                              << format_double(fit.residual) << ',' << (fit.violation ? 1 : 0);
                else
                    fits_rows << "nan,nan,0";
                fits_rows << ',' << status << '\n';
            }
        }
    }

    write_text_file(out_path("sandwich.csv"),
                    "epsilon,N,H,frequency,bound,stderr\n" + sandwich_rows.str());
    write_text_file(out_path("regret.csv"),
                    "algo,N,H,avg_best,avg_chosen,regret,stderr\n" + regret_rows.str());
    write_text_file(out_path("selection.csv"),
                    "algo,N,H,frequency,stderr,bound_min,bound_mean\n" + selection_rows.str());
    write_text_file(out_path("fits.csv"), "algo,model,H,C,residual,violation,status\n" +
                                              fits_rows.str());
    write_text_file(
        out_path("bounds.csv"),
        "N,H,epsilon,delta,replications,alpha_H,r_H,sandwich_bound,ftal_rhs,auer_rhs,"
        "flagged_terms\n" +
            bound_rows.str());
    return summary;
}

} // namespace cmdpsim
