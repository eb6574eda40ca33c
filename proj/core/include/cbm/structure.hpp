#pragma once

#include "cbm/grid.hpp"
#include "cbm/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbm {

struct StructureViolation {
    std::string property; ///< "u2-vs-both", "boundary-0-12", ...
    int j = 0;
    double pi1 = 0.0;
    std::string detail;
};

/// Policy switching boundary between action a and action b at each j.
struct Boundary {
    Action from = Action::none;
    Action to = Action::none;
    std::vector<std::optional<double>> by_j; ///< smallest grid pi(1) where `to` is chosen above a `from` point
    bool non_increasing = true;
};

/// Shape of a solved policy on a two-state belief grid.
struct StructureReport {
    double resolution = 0.0;
    std::vector<Boundary> boundaries;           ///< (0,12), (1,12), (0,2), (1,2)
    std::optional<int> l_star;                  ///< last j preferring 2 over 12, when observable
    bool u2_vs_both_by_j = true;                ///< 2 vs 12 depends on j only, with 2 before 12
    bool boundaries_non_increasing = true;      ///< (0,12), (1,12), (0,2) all non-increasing
    bool u1_both_separated = true;              ///< action-1 and action-12 regions do not interleave in pi(1)
    bool both_persists_upward = true;           ///< 12 at (pi, j) implies 12 at every (pi+, j+)
    bool u2_persists_upward = true;             ///< 2 at (pi, j) implies 2 or 12 at every (pi+, j)
    std::vector<StructureViolation> violations;

    bool clean() const { return violations.empty(); }
    /// "clean at resolution <step>" or a violation count.
    std::string summary() const;
    const Boundary& boundary(Action from, Action to) const;
};

/// Requires L2 = 1; throws ValidationError otherwise.
StructureReport policy_structure_report(const PolicyMap& policy, const BeliefGrid& grid);

/// Where action `to` is weakly preferred over `from` (Gamma^to <= Gamma^from) at each j.
struct PreferenceBoundary {
    Action from = Action::none;
    Action to = Action::none;
    std::vector<std::optional<double>> by_j; ///< smallest grid pi(1) with the preference; empty = never
    std::vector<bool> single_crossing;       ///< the preference set is an upper set in pi(1)
    bool non_increasing = true;              ///< by_j non-increasing over the j where it exists
};

/// Operator-level comparison of the four Gamma terms on a solved value function.
/// Pairs involving 0 or 2 are compared for j < L1 only; (1, 12) for every j.
struct PreferenceReport {
    double resolution = 0.0;
    std::vector<PreferenceBoundary> boundaries; ///< (0,12), (1,12), (0,2), (1,2)
    std::vector<double> u2_minus_both;          ///< Gamma^2 - Gamma^12 per j (grid point e0)
    double u2_minus_both_spread = 0.0;          ///< largest variation of Gamma^2 - Gamma^12 over pi at one j
    bool u2_vs_both_pi_independent = true;
    bool u2_vs_both_monotone_in_j = true;       ///< Gamma^2 - Gamma^12 non-decreasing in j
    std::vector<StructureViolation> violations;
    bool clean() const { return violations.empty(); }
    const PreferenceBoundary& boundary(Action from, Action to) const;
};

PreferenceReport preference_report(const GridSolver& solver, const ValueFunction& V, double tie_tol = 1e-9);

/// Grid-level shape of V on a two-state belief grid.
struct ValueShapeReport {
    double tol = 1e-6;
    bool monotone_in_belief = true; ///< non-decreasing along pi(1)
    bool monotone_in_j = true;      ///< non-decreasing in the U1 state
    bool concave_in_belief = true;
    double worst_belief_drop = 0.0;
    double worst_j_drop = 0.0;
    double worst_concavity_defect = 0.0;
    std::vector<StructureViolation> violations;
    bool clean() const { return violations.empty(); }
};

ValueShapeReport value_shape_report(const ValueFunction& V, const BeliefGrid& grid, double tol = 1e-6);

} // namespace cbm
