#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cmdpsim/model.hpp"
#include "cmdpsim/selector.hpp"

namespace cmdpsim {

// Horizon-truncation error bounds: alpha_h = beta^H C_max / (1-beta) for
// costs and r_h = gamma^H R_max / (1-gamma) for rewards.
struct TruncationConstants {
    double alpha_h = 0.0;
    double r_h = 0.0;
};

TruncationConstants truncation_constants(const CmdpModel& model, int horizon);

// Lower bound on the probability that the estimated feasible set is
// sandwiched between the true (-epsilon)- and epsilon-feasible sets:
// 1 - 2 |Pi| exp(-2 (epsilon - alpha_h)^2 N). Requires epsilon > alpha_h.
struct SandwichBound {
    double raw = 0.0;
    double value = 0.0; // raw clamped to [0,1]
};

SandwichBound sandwich_bound(int num_policies, double epsilon, double alpha_h,
                             std::int64_t num_iterations);

// Per-iteration decay constant of the sandwich failure probability,
// exp(-2 (epsilon - alpha_h)^2).
double sandwich_rate_constant(double epsilon, double alpha_h);

// Lower bound on the probability that the final selection of the
// all-awake-simulating algorithm is the best truly-feasible policy, given the
// realized feasible-set estimate. Requires pairwise distinct oracle values.
// Gap terms with half-gap at most r_h carry no information; they are counted
// as certain failures and reported in `vacuous`.
struct SelectionBound {
    double first_factor = 0.0;  // sandwich factor, clamped to [0,1]
    double second_factor = 0.0; // selection factor, clamped to [0,1]
    double raw = 0.0;           // product of the unclamped factors
    double value = 0.0;
    int optimal = -1; // value maximizer within the feasible-set estimate
    std::vector<int> vacuous;
};

SelectionBound selection_bound(std::span<const double> oracle_values,
                               std::span<const int> feasible_set, double epsilon,
                               const TruncationConstants& constants,
                               std::int64_t num_iterations);

// Policies ranked by descending finite-horizon value (ties by index), all
// pairwise gaps, and the y-threshold rank maps derived from them.
struct GapStructure {
    std::vector<int> order;           // rank -> policy index
    std::vector<double> sorted_values; // value at each rank
    double y = 0.0;
    double delta = 0.0;
    std::vector<int> i_y; // per rank j: lowest rank i <= j with gap(i,j) <= y
    std::vector<int> j_y; // per rank i: highest rank j >= i with gap(i,j) <= y
    std::optional<double> min_positive_gap;

    int size() const { return static_cast<int>(order.size()); }
    double gap(int rank_i, int rank_j) const {
        return sorted_values[rank_i] - sorted_values[rank_j];
    }
};

GapStructure gap_structure(std::span<const double> values, double y, double delta);

// Average best-awake value, average chosen value and their difference over a
// trace, with iterations whose awake set was empty left out of both sums.
struct RegretMetric {
    double avg_best = 0.0;
    double avg_chosen = 0.0;
    double regret = 0.0;
    int counted = 0; // iterations contributing to the averages
};

std::optional<RegretMetric> regret_metric(const RunTrace& trace,
                                          std::span<const double> values_h);

enum class RateModel { kOneOverN, kLogOverN };

// Least-squares fit of regret(N) ~ C * g(N) on the N range where the rate
// statements apply (N >= 1 / min positive gap). Violation is flagged when any
// admissible point exceeds twice the fitted curve. Returns nullopt when no
// positive gap exists; throws when fewer than five admissible points remain.
struct RateFit {
    double coefficient = 0.0;
    double residual = 0.0; // root mean squared misfit over the admissible points
    bool violation = false;
    int points_used = 0;
};

std::optional<RateFit> rate_check(std::span<const std::pair<double, double>> curve,
                                  RateModel model,
                                  std::optional<double> min_positive_gap);

// Closed-form right-hand side of the expected-regret bounds, with the hidden
// order constant taken as 1 (kOneOverN) or ln N (kLogOverN). Adjacent-rank
// gaps that fall outside the ranking are guarded by delta and counted in
// flagged_terms. Expects a structure built with y = 0.
struct RegretRhs {
    double value = 0.0;
    int flagged_terms = 0;
};

RegretRhs expected_regret_rhs(const GapStructure& gaps, std::int64_t num_iterations,
                               RateModel model);

} // namespace cmdpsim
