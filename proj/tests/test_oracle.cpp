#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "cmdpsim/generator.hpp"
#include "cmdpsim/oracle.hpp"
#include "test_helpers.hpp"

using namespace cmdpsim;
using namespace cmdpsim::testing;

TEST_CASE("build_chain turns segment lengths into transition rows") {
    const CmdpModel model = two_state_model();
    const PolicyChain chain = build_chain(model, constant_policy(2));
    CHECK(chain.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(chain.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(chain.at(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(chain.at(1, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(chain.expected_reward[0] == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(chain.expected_cost[0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("build_chain on deterministic dynamics gives a 0/1 row") {
    const CmdpModel model = self_loop_model(0.3, 0.1, 0.9, 0.9);
    const PolicyChain chain = build_chain(model, constant_policy(1));
    CHECK(chain.at(0, 0) == 1.0);
}

TEST_CASE("chain rows are stochastic on generated instances") {
    InstanceSpec spec;
    spec.num_states = 6;
    spec.actions_per_state = 3;
    spec.segments_per_action = 4;
    spec.num_policies = 4;
    spec.seed = 17;
    const GeneratedInstance instance = generate_instance(spec);
    for (const Policy& policy : instance.policies.policies) {
        const PolicyChain chain = build_chain(instance.model, policy);
        for (int x = 0; x < chain.num_states; ++x) {
            double row = 0.0;
            for (int y = 0; y < chain.num_states; ++y) row += chain.at(x, y);
            CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("chain rows match step frequencies over a million draws") {
    RngStream source(5150, StreamPurpose::kInstanceGen, 0, 0);
    const CmdpModel model =
        normalize_model(random_raw_model(4, 2, 3, 0.9, 0.8, 1.0, 1.0, source));
    REQUIRE(validate_model(model).ok());
    const Policy policy = constant_policy(4, 1);
    const PolicyChain chain = build_chain(model, policy);
    const int draws = 1000000;
    for (int x = 0; x < 4; ++x) {
        std::array<int, 4> counts{};
        RngStream stream(60, StreamPurpose::kCostSim, static_cast<std::uint64_t>(x), 0);
        for (int i = 0; i < draws; ++i)
            counts[static_cast<size_t>(
                step(model, x, policy.action_of[x], stream.next_uniform()).next_state)] += 1;
        for (int y = 0; y < 4; ++y) {
            const double p = chain.at(x, y);
            const double freq = static_cast<double>(counts[y]) / draws;
            const double band = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / draws);
            CHECK(std::fabs(freq - p) <= band + 1e-9);
        }
    }
}

TEST_CASE("exact_value solves the self-loop geometric series") {
    const CmdpModel model = self_loop_model(0.3, 0.1, 0.4, 0.9);
    const PolicyChain chain = build_chain(model, constant_policy(1));
    const std::vector<double> values = exact_value(chain, 0.4);
    CHECK(values[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact_value of a zero-reward chain is zero") {
    const CmdpModel model = self_loop_model(0.0, 0.1, 0.4, 0.9);
    const PolicyChain chain = build_chain(model, constant_policy(1));
    CHECK(exact_value(chain, 0.4)[0] == 0.0);
}

TEST_CASE("exact_value agrees with a deep finite-horizon recursion") {
    RngStream source(404, StreamPurpose::kInstanceGen, 0, 0);
    const CmdpModel model =
        normalize_model(random_raw_model(4, 3, 3, 0.9, 0.85, 2.0, 2.0, source));
    const Policy policy = constant_policy(4, 2);
    const PolicyChain chain = build_chain(model, policy);
    const std::vector<double> infinite = exact_value(chain, model.gamma);
    const std::vector<double> truncated = exact_finite_value(chain, model.gamma, 2000);
    for (int x = 0; x < 4; ++x)
        CHECK(std::fabs(infinite[x] - truncated[x]) <= 1e-9);
    const std::vector<double> infinite_cost = exact_cost(chain, model.beta);
    const std::vector<double> truncated_cost = exact_finite_cost(chain, model.beta, 2000);
    for (int x = 0; x < 4; ++x)
        CHECK(std::fabs(infinite_cost[x] - truncated_cost[x]) <= 1e-9);
}

TEST_CASE("exact_finite_value at horizon zero vanishes") {
    const CmdpModel model = two_state_model();
    const PolicyChain chain = build_chain(model, constant_policy(2));
    for (double v : exact_finite_value(chain, model.gamma, 0)) CHECK(v == 0.0);
}

TEST_CASE("exact_finite_value of a two-step self-loop") {
    const CmdpModel model = self_loop_model(0.3, 0.1, 0.4, 0.9);
    const PolicyChain chain = build_chain(model, constant_policy(1));
    CHECK(exact_finite_value(chain, 0.4, 2)[0] == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("rollout means agree with the exact finite-horizon value") {
    InstanceSpec spec;
    spec.num_states = 5;
    spec.actions_per_state = 2;
    spec.segments_per_action = 3;
    spec.num_policies = 2;
    spec.seed = 99;
    const GeneratedInstance instance = generate_instance(spec);
    const Policy& policy = instance.policies.policies[0];
    const PolicyChain chain = build_chain(instance.model, policy);
    const int horizon = 10;
    const double exact =
        exact_finite_value(chain, instance.model.gamma, horizon)[instance.model.initial_state];
    const int samples = 100000;
    double sum = 0.0;
    for (int r = 1; r <= samples; ++r) {
        RngStream stream(2718, StreamPurpose::kValueSim, 0, static_cast<std::uint64_t>(r));
        sum += rollout(instance.model, policy, horizon, stream).value_sum;
    }
    const double mean = sum / samples;
    // 99.9% two-sided Hoeffding band for [0,1] samples.
    const double band = std::sqrt(std::log(2.0 / 0.001) / (2.0 * samples));
    CHECK(std::fabs(mean - exact) <= band);
}

TEST_CASE("exact_feasible_set handles slack extremes and boundaries") {
    const std::vector<double> costs = {0.2, 0.5, 0.8};
    CHECK(exact_feasible_set(costs, 0.5, 10.0) == std::vector<int>{0, 1, 2});
    CHECK(exact_feasible_set(costs, 0.1, 0.0).empty());
    CHECK(exact_feasible_set(costs, 0.5, 0.0) == std::vector<int>{0, 1});
    CHECK(exact_feasible_set(costs, 0.5, -0.4).empty());
    CHECK_THROWS(exact_feasible_set(costs, 0.0, 0.1));
}

TEST_CASE("feasible sets grow with the slack") {
    RngStream source(8, StreamPurpose::kInstanceGen, 0, 0);
    std::vector<double> costs(10);
    for (double& c : costs) c = source.next_uniform();
    std::vector<int> previous;
    for (double eps : {-0.5, -0.2, 0.0, 0.1, 0.3, 0.6}) {
        const std::vector<int> current = exact_feasible_set(costs, 0.4, eps);
        CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
        previous = current;
    }
}

TEST_CASE("feasible_optimal picks the best policy within budget") {
    const std::vector<double> values = {0.9, 0.6, 0.8};
    const std::vector<double> costs = {0.7, 0.2, 0.3};
    const FeasibleOptimal best = feasible_optimal(values, costs, 0.5);
    REQUIRE(best.solvable);
    CHECK(best.optimal == std::vector<int>{2});
    CHECK(best.value == 0.8);
}

TEST_CASE("feasible_optimal returns every tied maximizer") {
    const std::vector<double> values = {0.8, 0.8, 0.5};
    const std::vector<double> costs = {0.1, 0.2, 0.3};
    const FeasibleOptimal best = feasible_optimal(values, costs, 0.5);
    CHECK(best.optimal == std::vector<int>{0, 1});
}

TEST_CASE("feasible_optimal marks an unmeetable budget") {
    const std::vector<double> values = {0.8};
    const std::vector<double> costs = {0.9};
    CHECK(!feasible_optimal(values, costs, 0.5).solvable);
}

TEST_CASE("feasible_optimal matches an exhaustive scan") {
    InstanceSpec spec;
    spec.num_states = 4;
    spec.actions_per_state = 3;
    spec.segments_per_action = 2;
    spec.num_policies = 12;
    spec.seed = 1234;
    const GeneratedInstance instance = generate_instance(spec);
    const OracleReport report = oracle_report(instance.model, instance.policies, {});
    const double budget = 0.5;
    const FeasibleOptimal best = feasible_optimal(report.value, report.cost, budget);

    // Brute force over all policies.
    std::vector<int> expected;
    double best_value = -1.0;
    for (int p = 0; p < instance.policies.size(); ++p) {
        if (report.cost[p] > budget) continue;
        if (report.value[p] > best_value) {
            best_value = report.value[p];
            expected = {p};
        } else if (report.value[p] == best_value) {
            expected.push_back(p);
        }
    }
    if (expected.empty()) {
        CHECK(!best.solvable);
    } else {
        REQUIRE(best.solvable);
        CHECK(best.optimal == expected);
        CHECK(best.value == best_value);
    }
}

TEST_CASE("finite-horizon gaps respect the discount-tail bounds") {
    InstanceSpec spec;
    spec.num_states = 5;
    spec.actions_per_state = 2;
    spec.segments_per_action = 3;
    spec.gamma = 0.9;
    spec.beta = 0.8;
    spec.num_policies = 5;
    spec.seed = 60;
    const GeneratedInstance instance = generate_instance(spec);
    for (const Policy& policy : instance.policies.policies) {
        const PolicyChain chain = build_chain(instance.model, policy);
        const std::vector<double> value = exact_value(chain, instance.model.gamma);
        const std::vector<double> cost = exact_cost(chain, instance.model.beta);
        for (int h = 1; h <= 100; ++h) {
            const std::vector<double> value_h =
                exact_finite_value(chain, instance.model.gamma, h);
            const std::vector<double> cost_h = exact_finite_cost(chain, instance.model.beta, h);
            const double r_h = std::pow(instance.model.gamma, h) * instance.model.r_max /
                               (1.0 - instance.model.gamma);
            const double alpha_h = std::pow(instance.model.beta, h) * instance.model.c_max /
                                   (1.0 - instance.model.beta);
            for (int x = 0; x < instance.model.num_states; ++x) {
                CHECK(std::fabs(value[x] - value_h[x]) <= r_h + 1e-9);
                CHECK(std::fabs(cost[x] - cost_h[x]) <= alpha_h + 1e-9);
            }
        }
    }
}
