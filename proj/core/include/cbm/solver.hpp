#pragma once

#include "cbm/grid.hpp"
#include "cbm/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cbm {

/// Maintenance actions. The numeric values follow the usual labels
/// 0 (do nothing), 1 (replace U1), 2 (replace U2), 12 (replace both).
enum class Action : int { none = 0, replace_u1 = 1, replace_u2 = 2, replace_both = 12 };

inline constexpr std::array<Action, 4> kActions{Action::none, Action::replace_u1, Action::replace_u2,
                                                Action::replace_both};

int action_code(Action a);
int action_slot(Action a); ///< 0..3 in tie-break order
Action action_from_code(int code);
bool replaces_u1(Action a);
bool replaces_u2(Action a);
Action combine_actions(bool replace_u1, bool replace_u2);

/// Bit set over the four actions, indexed by action_slot.
using ActionSet = std::uint8_t;
inline constexpr ActionSet kAllActions = 0b1111;
inline constexpr ActionSet action_bit(Action a) {
    return static_cast<ActionSet>(1u << (a == Action::none         ? 0
                                         : a == Action::replace_u1 ? 1
                                         : a == Action::replace_u2 ? 2
                                                                   : 3));
}
/// {0,1,2,12} below U1 failure, {1,12} at j = L1.
ActionSet admissible_actions(int j, int L1);

/// Value per (grid point, U1 state), in discounted cost units.
struct ValueFunction {
    Matrix values; ///< values(g, j)
    double at(int g, int j) const { return values(g, j); }
};

struct PolicyMap {
    std::vector<Action> actions; ///< row-major (g, j)
    int u1_states = 0;
    Action at(int g, int j) const { return actions[static_cast<std::size_t>(g) * u1_states + j]; }
    Action& at(int g, int j) { return actions[static_cast<std::size_t>(g) * u1_states + j]; }
};

/// c_o(pi, j) = sum_i pi(i) c_o2(i) + c_o1(j).
double stage_cost(const CostStructure& costs, const Vector& pi, int j);

/// P(k, z | pi, j) = Q(j, k) (pi P[j] B)_z as a (L1+1) x (M+1) table.
Matrix obs_kernel(const SystemModel& model, const Vector& pi, int j);

/// (pi P[j] B): the next-signal distribution under do-nothing.
Vector signal_distribution(const SystemModel& model, const Vector& pi, int j);

/// Bayesian update T(pi, j; z). The next U1 state does not enter.
/// Throws ValidationError if signal z has zero probability.
Vector belief_update(const SystemModel& model, const Vector& pi, int j, int z);

/// One-step costs of the four actions at one state; infinite where inadmissible.
struct Backup {
    std::array<double, 4> gamma{}; ///< indexed by action_slot
    double value = 0.0;
    Action action = Action::none;
};

/// Bellman backup at an arbitrary belief, interpolating V off the grid.
Backup bellman_backup(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid,
                      const ValueFunction& V, const Vector& pi, int j,
                      ActionSet allowed = kAllActions);

struct SolveOptions {
    double tol = 1e-3;          ///< stop when the sup-norm change is at most tol
    long max_iterations = 100000;
    const Matrix* warm_start = nullptr; ///< initial V(g, j); V_0 = 0 when null
};

struct SolveResult {
    ValueFunction V;
    PolicyMap policy;
    long iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_trace; ///< sup-norm change per iteration
};

/// Grid-based value iteration with precomputed belief-update stencils.
///
/// Each (grid point, U1 state) carries its admissible action set, so the
/// same machinery runs the unrestricted problem, threshold-restricted
/// problems, and fixed-policy evaluation (singleton sets).
class GridSolver {
public:
    GridSolver(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid);

    const SystemModel& model() const { return model_; }
    const CostStructure& costs() const { return costs_; }
    const BeliefGrid& grid() const { return grid_; }

    /// Default masks: admissible_actions(j, L1) everywhere.
    std::vector<ActionSet> full_mask() const;

    /// Gamma^a V at grid point g, U1 state j, for every action.
    std::array<double, 4> gammas(const ValueFunction& V, int g, int j) const;

    /// Iterates V_{r+1} = min over mask of Gamma V_r from V_0 = 0 (or options.warm_start).
    /// Throws NumericalError when max_iterations is reached.
    SolveResult solve(const std::vector<ActionSet>& mask, const SolveOptions& options = {}) const;

    /// Finite-horizon backward induction from V_0 = 0 for `horizon` steps.
    ValueFunction finite_horizon(const std::vector<ActionSet>& mask, int horizon) const;

private:
    struct Branch {
        double prob;   ///< (pi P[j] B)_z
        int begin;     ///< into weights_
        int end;
    };

    SystemModel model_;
    CostStructure costs_;
    BeliefGrid grid_;
    std::vector<double> stage_;          ///< stage cost (g, j)
    std::vector<int> branch_begin_;      ///< (g, j) -> first branch
    std::vector<Branch> branches_;
    std::vector<GridWeight> weights_;
    std::vector<std::vector<std::pair<int, double>>> successors_; ///< nonzero Q(j, .)
    int n1_;
};

/// Unrestricted optimum over the grid.
SolveResult value_iteration(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid,
                            double tol = 1e-3);

/// Action chosen by a fixed rule at a grid state.
using PolicyRule = std::function<Action(const Vector& pi, int j)>;

/// Value of a fixed rule (same Gamma formulas, no minimisation).
/// Throws ValidationError naming the state if the rule picks an inadmissible action.
SolveResult evaluate_fixed_policy(const GridSolver& solver, const PolicyRule& rule,
                                  const SolveOptions& options = {});
SolveResult evaluate_fixed_policy(const SystemModel& model, const CostStructure& costs,
                                  const PolicyRule& rule, const BeliefGrid& grid, double tol = 1e-3);

/// Singleton masks from a rule; throws on inadmissible choices.
std::vector<ActionSet> mask_from_rule(const GridSolver& solver, const PolicyRule& rule);

} // namespace cbm
