#include "cmdpsim/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace cmdpsim {

namespace {

constexpr double kResidualTolerance = 1e-12;

// Dense LU with partial pivoting; factors in place, returns the pivot rows.
std::vector<int> lu_factor(std::vector<double>& a, int n) {
    std::vector<int> pivot(n);
    for (int col = 0; col < n; ++col) {
        int best = col;
        double best_abs = std::fabs(a[static_cast<size_t>(col) * n + col]);
        for (int row = col + 1; row < n; ++row) {
            const double v = std::fabs(a[static_cast<size_t>(row) * n + col]);
            if (v > best_abs) {
                best = row;
                best_abs = v;
            }
        }
        if (best_abs == 0.0) throw std::runtime_error("singular linear system");
        pivot[col] = best;
        if (best != col) {
            for (int k = 0; k < n; ++k)
                std::swap(a[static_cast<size_t>(col) * n + k],
                          a[static_cast<size_t>(best) * n + k]);
        }
        const double diag = a[static_cast<size_t>(col) * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double factor = a[static_cast<size_t>(row) * n + col] / diag;
            a[static_cast<size_t>(row) * n + col] = factor;
            for (int k = col + 1; k < n; ++k)
                a[static_cast<size_t>(row) * n + k] -=
                    factor * a[static_cast<size_t>(col) * n + k];
        }
    }
    return pivot;
}

void lu_solve(const std::vector<double>& lu, const std::vector<int>& pivot, int n,
              std::vector<double>& b) {
    for (int col = 0; col < n; ++col) {
        if (pivot[col] != col) std::swap(b[col], b[pivot[col]]);
        for (int row = col + 1; row < n; ++row)
            b[row] -= lu[static_cast<size_t>(row) * n + col] * b[col];
    }
    for (int row = n - 1; row >= 0; --row) {
        for (int col = row + 1; col < n; ++col)
            b[row] -= lu[static_cast<size_t>(row) * n + col] * b[col];
        b[row] /= lu[static_cast<size_t>(row) * n + row];
    }
}

// Solves (I - discount * P) v = r with iterative refinement until the
// max-norm residual drops below kResidualTolerance.
std::vector<double> solve_discounted(const PolicyChain& chain,
                                     const std::vector<double>& one_period, double discount) {
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");
    const int n = chain.num_states;
    std::vector<double> system(static_cast<size_t>(n) * n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const double p = chain.at(row, col);
            system[static_cast<size_t>(row) * n + col] =
                (row == col ? 1.0 : 0.0) - discount * p;
        }
    }
    std::vector<double> lu = system;
    const std::vector<int> pivot = lu_factor(lu, n);

    std::vector<double> solution = one_period;
    lu_solve(lu, pivot, n, solution);

    std::vector<double> residual(n);
    for (int attempt = 0; attempt < 4; ++attempt) {
        double residual_norm = 0.0;
        for (int row = 0; row < n; ++row) {
            double acc = one_period[row];
            for (int col = 0; col < n; ++col)
                acc -= system[static_cast<size_t>(row) * n + col] * solution[col];
            residual[row] = acc;
            residual_norm = std::max(residual_norm, std::fabs(acc));
        }
        if (residual_norm <= kResidualTolerance) return solution;
        lu_solve(lu, pivot, n, residual);
        for (int row = 0; row < n; ++row) solution[row] += residual[row];
    }
    throw std::runtime_error("linear solve failed to reach residual tolerance");
}

std::vector<double> backward_recursion(const PolicyChain& chain,
                                       const std::vector<double>& one_period, double discount,
                                       int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    const int n = chain.num_states;
    std::vector<double> current(n, 0.0);
    std::vector<double> next(n, 0.0);
    for (int k = 0; k < horizon; ++k) {
        for (int row = 0; row < n; ++row) {
            double acc = 0.0;
            for (int col = 0; col < n; ++col) acc += chain.at(row, col) * current[col];
            next[row] = one_period[row] + discount * acc;
        }
        current.swap(next);
    }
    return current;
}

} // namespace

PolicyChain build_chain(const CmdpModel& model, const Policy& policy) {
    PolicyChain chain;
    chain.num_states = model.num_states;
    chain.transition.assign(static_cast<size_t>(model.num_states) * model.num_states, 0.0);
    chain.expected_reward.assign(model.num_states, 0.0);
    chain.expected_cost.assign(model.num_states, 0.0);
    for (int x = 0; x < model.num_states; ++x) {
        const ActionDynamics* table = model.find_action(x, policy.action_of[x]);
        if (table == nullptr) throw std::invalid_argument("action not in A(x)");
        for (const DisturbanceSegment& seg : table->segments) {
            const double p = seg.length();
            chain.transition[static_cast<size_t>(x) * model.num_states + seg.next_state] += p;
            chain.expected_reward[x] += p * seg.reward;
            chain.expected_cost[x] += p * seg.cost;
        }
    }
    return chain;
}

std::vector<double> exact_value(const PolicyChain& chain, double gamma) {
    return solve_discounted(chain, chain.expected_reward, gamma);
}

std::vector<double> exact_cost(const PolicyChain& chain, double beta) {
    return solve_discounted(chain, chain.expected_cost, beta);
}

std::vector<double> exact_finite_value(const PolicyChain& chain, double gamma, int horizon) {
    return backward_recursion(chain, chain.expected_reward, gamma, horizon);
}

std::vector<double> exact_finite_cost(const PolicyChain& chain, double beta, int horizon) {
    return backward_recursion(chain, chain.expected_cost, beta, horizon);
}

OracleReport oracle_report(const CmdpModel& model, const PolicySet& set,
                           std::span<const int> horizons) {
    OracleReport report;
    report.horizons.assign(horizons.begin(), horizons.end());
    report.value_h.assign(horizons.size(), {});
    report.cost_h.assign(horizons.size(), {});
    const int x0 = model.initial_state;
    for (const Policy& policy : set.policies) {
        const PolicyChain chain = build_chain(model, policy);
        report.value.push_back(exact_value(chain, model.gamma)[x0]);
        report.cost.push_back(exact_cost(chain, model.beta)[x0]);
        for (size_t h = 0; h < horizons.size(); ++h) {
            report.value_h[h].push_back(exact_finite_value(chain, model.gamma, horizons[h])[x0]);
            report.cost_h[h].push_back(exact_finite_cost(chain, model.beta, horizons[h])[x0]);
        }
    }
    return report;
}

std::vector<int> exact_feasible_set(std::span<const double> costs, double budget,
                                    double epsilon) {
    if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
    std::vector<int> feasible;
    for (int i = 0; i < static_cast<int>(costs.size()); ++i) {
        if (costs[i] <= budget + epsilon) feasible.push_back(i);
    }
    return feasible;
}

FeasibleOptimal feasible_optimal(std::span<const double> values, std::span<const double> costs,
                                 double budget) {
    const std::vector<int> feasible = exact_feasible_set(costs, budget, 0.0);
    FeasibleOptimal out;
    if (feasible.empty()) return out;
    out.solvable = true;
    double best = values[feasible.front()];
    for (int p : feasible) best = std::max(best, values[p]);
    out.value = best;
    for (int p : feasible) {
        if (values[p] == best) out.optimal.push_back(p);
    }
    return out;
}

} // namespace cmdpsim
