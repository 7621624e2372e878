#include "cmdpsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cmdpsim {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

} // namespace

TruncationConstants truncation_constants(const CmdpModel& model, int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    TruncationConstants out;
    out.alpha_h = std::pow(model.beta, horizon) * model.c_max / (1.0 - model.beta);
    out.r_h = std::pow(model.gamma, horizon) * model.r_max / (1.0 - model.gamma);
    return out;
}

SandwichBound sandwich_bound(int num_policies, double epsilon, double alpha_h,
                             std::int64_t num_iterations) {
    if (num_policies < 1) throw std::invalid_argument("need at least one policy");
    if (num_iterations < 1) throw std::invalid_argument("need at least one iteration");
    if (!(epsilon > alpha_h)) throw std::invalid_argument("epsilon must exceed alpha_h");
    const double margin = epsilon - alpha_h;
    const double raw =
        1.0 - 2.0 * num_policies *
                  std::exp(-2.0 * margin * margin * static_cast<double>(num_iterations));
    return {raw, clamp01(raw)};
}

double sandwich_rate_constant(double epsilon, double alpha_h) {
    if (!(epsilon > alpha_h)) throw std::invalid_argument("epsilon must exceed alpha_h");
    const double margin = epsilon - alpha_h;
    return std::exp(-2.0 * margin * margin);
}

SelectionBound selection_bound(std::span<const double> oracle_values,
                               std::span<const int> feasible_set, double epsilon,
                               const TruncationConstants& constants,
                               std::int64_t num_iterations) {
    if (feasible_set.empty())
        throw std::invalid_argument("feasible-set estimate must be nonempty");
    for (size_t i = 0; i < oracle_values.size(); ++i) {
        for (size_t j = i + 1; j < oracle_values.size(); ++j) {
            if (oracle_values[i] == oracle_values[j])
                throw std::invalid_argument("oracle values collide for policies " +
                                            std::to_string(i) + " and " + std::to_string(j));
        }
    }

    SelectionBound out;
    const SandwichBound sandwich =
        sandwich_bound(static_cast<int>(oracle_values.size()), epsilon, constants.alpha_h,
                       num_iterations);

    int best = feasible_set.front();
    for (int p : feasible_set) {
        if (oracle_values[p] > oracle_values[best]) best = p;
    }
    out.optimal = best;

    double miss_sum = 0.0;
    for (int p : feasible_set) {
        if (p == best) continue;
        const double half_gap = (oracle_values[best] - oracle_values[p]) / 2.0;
        if (half_gap <= constants.r_h) {
            // No exponential control over this policy; count it as a certain miss.
            out.vacuous.push_back(p);
            miss_sum += 1.0;
            continue;
        }
        const double margin = half_gap - constants.r_h;
        miss_sum += std::min(
            1.0, 2.0 * std::exp(-2.0 * margin * margin * static_cast<double>(num_iterations)));
    }
    const double selection_raw = 1.0 - miss_sum;
    out.first_factor = sandwich.value;
    out.second_factor = clamp01(selection_raw);
    out.raw = sandwich.raw * selection_raw;
    out.value = out.first_factor * out.second_factor;
    return out;
}

GapStructure gap_structure(std::span<const double> values, double y, double delta) {
    if (values.empty()) throw std::invalid_argument("need at least one value");
    if (y < 0.0) throw std::invalid_argument("y must be nonnegative");
    GapStructure out;
    out.y = y;
    out.delta = delta;
    const int count = static_cast<int>(values.size());
    out.order.resize(count);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&values](int a, int b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    out.sorted_values.resize(count);
    for (int rank = 0; rank < count; ++rank) out.sorted_values[rank] = values[out.order[rank]];

    out.i_y.resize(count);
    out.j_y.resize(count);
    for (int j = 0; j < count; ++j) {
        int lowest = j;
        for (int i = j; i >= 0; --i) {
            if (out.gap(i, j) <= y) lowest = i;
            else break;
        }
        out.i_y[j] = lowest;
    }
    for (int i = 0; i < count; ++i) {
        int highest = i;
        for (int j = i; j < count; ++j) {
            if (out.gap(i, j) <= y) highest = j;
            else break;
        }
        out.j_y[i] = highest;
    }

    for (int rank = 0; rank + 1 < count; ++rank) {
        const double gap = out.sorted_values[rank] - out.sorted_values[rank + 1];
        if (gap > 0.0 && (!out.min_positive_gap || gap < *out.min_positive_gap))
            out.min_positive_gap = gap;
    }
    return out;
}

std::optional<RegretMetric> regret_metric(const RunTrace& trace,
                                          std::span<const double> values_h) {
    RegretMetric metric;
    double best_sum = 0.0;
    double chosen_sum = 0.0;
    for (const IterationRecord& record : trace.iterations) {
        if (record.infeasible) continue;
        double best = values_h[record.feasible.front()];
        for (int p : record.feasible) best = std::max(best, values_h[p]);
        best_sum += best;
        chosen_sum += values_h[record.chosen];
        metric.counted += 1;
    }
    if (metric.counted == 0) return std::nullopt;
    metric.avg_best = best_sum / metric.counted;
    metric.avg_chosen = chosen_sum / metric.counted;
    metric.regret = metric.avg_best - metric.avg_chosen;
    return metric;
}

namespace {

double rate_shape(RateModel model, double n) {
    return model == RateModel::kOneOverN ? 1.0 / n : std::log(n) / n;
}

} // namespace

std::optional<RateFit> rate_check(std::span<const std::pair<double, double>> curve,
                                  RateModel model,
                                  std::optional<double> min_positive_gap) {
    if (!min_positive_gap) return std::nullopt;
    const double threshold = 1.0 / *min_positive_gap;
    std::vector<std::pair<double, double>> admissible;
    for (const auto& [n, regret] : curve) {
        if (n >= threshold) admissible.emplace_back(n, regret);
    }
    if (admissible.size() < 5)
        throw std::invalid_argument("need at least five sampled N beyond the min-gap threshold");

    double cross = 0.0;
    double shape_sq = 0.0;
    for (const auto& [n, regret] : admissible) {
        const double g = rate_shape(model, n);
        cross += regret * g;
        shape_sq += g * g;
    }
    RateFit fit;
    fit.points_used = static_cast<int>(admissible.size());
    fit.coefficient = cross / shape_sq;
    double sq_err = 0.0;
    for (const auto& [n, regret] : admissible) {
        const double predicted = fit.coefficient * rate_shape(model, n);
        sq_err += (regret - predicted) * (regret - predicted);
        if (regret > 2.0 * predicted) fit.violation = true;
    }
    fit.residual = std::sqrt(sq_err / admissible.size());
    return fit;
}

RegretRhs expected_regret_rhs(const GapStructure& gaps, std::int64_t num_iterations,
                               RateModel model) {
    if (num_iterations < 1) throw std::invalid_argument("need at least one iteration");
    const int count = gaps.size();
    const double n = static_cast<double>(num_iterations);
    const double order_constant = model == RateModel::kOneOverN ? 1.0 : std::log(n);
    const double delta = gaps.delta;

    RegretRhs out;
    out.value = 2.0 * delta;
    // Ranks strictly below the top tie group.
    for (int j = gaps.j_y[0] + 1; j < count; ++j) {
        const int boundary = gaps.i_y[j];
        double gap = delta;
        if (boundary >= 1) {
            gap = std::max(delta, gaps.gap(boundary - 1, boundary));
        } else {
            out.flagged_terms += 1;
        }
        out.value += order_constant / (n * (gap > 0.0 ? gap : delta));
    }
    // Ranks above the bottom of the ranking.
    for (int i = 0; i < gaps.j_y[count - 1]; ++i) {
        const int boundary = gaps.j_y[i];
        double gap = delta;
        if (boundary + 1 < count) {
            gap = std::max(delta, gaps.gap(boundary, boundary + 1));
        } else {
            out.flagged_terms += 1;
        }
        out.value += order_constant / (n * (gap > 0.0 ? gap : delta));
    }
    return out;
}

} // namespace cmdpsim
