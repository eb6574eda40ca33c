#include "cbm/structure.hpp"
#include "cbm/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cbm {

namespace {

void require_two_state(const BeliefGrid& grid) {
    if (grid.L2() != 1) throw ValidationError("structure report needs a two-state belief grid (L2 = 1)");
}

double pi1_of(const BeliefGrid& grid, int g) { return grid.point(g)[1]; }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

std::string StructureReport::summary() const {
    if (clean()) return "clean at resolution " + fmt(resolution);
    return std::to_string(violations.size()) + " violation(s) at resolution " + fmt(resolution);
}

const Boundary& StructureReport::boundary(Action from, Action to) const {
    for (const auto& b : boundaries)
        if (b.from == from && b.to == to) return b;
    throw ValidationError("no such boundary");
}

StructureReport policy_structure_report(const PolicyMap& policy, const BeliefGrid& grid) {
    require_two_state(grid);
    const int n1 = policy.u1_states;
    const int G = grid.size();
    StructureReport r;
    r.resolution = grid.step();

    const auto violate = [&](bool& flag, const char* prop, int j, int g, std::string detail) {
        flag = false;
        r.violations.push_back({prop, j, pi1_of(grid, g), std::move(detail)});
    };

    // 2 vs 12 by j only: never both at one j; every j using 2 precedes every j using 12.
    int last_two = -1, first_both = n1;
    for (int j = 0; j < n1; ++j) {
        int g_two = -1, g_both = -1;
        for (int g = 0; g < G; ++g) {
            if (policy.at(g, j) == Action::replace_u2 && g_two < 0) g_two = g;
            if (policy.at(g, j) == Action::replace_both && g_both < 0) g_both = g;
        }
        if (g_two >= 0 && g_both >= 0)
            violate(r.u2_vs_both_by_j, "u2-vs-both", j, std::max(g_two, g_both), "actions 2 and 12 both chosen at this j");
        if (g_two >= 0) last_two = j;
        if (g_both >= 0 && first_both == n1) first_both = j;
    }
    if (last_two >= 0 && first_both < n1 && last_two > first_both)
        violate(r.u2_vs_both_by_j, "u2-vs-both", last_two, 0.0,
                "action 2 chosen at j=" + std::to_string(last_two) + " after action 12 at j=" + std::to_string(first_both));
    if (r.u2_vs_both_by_j && first_both < n1) r.l_star = first_both - 1;

    const std::pair<Action, Action> pairs[] = {{Action::none, Action::replace_both},
                                               {Action::replace_u1, Action::replace_both},
                                               {Action::none, Action::replace_u2},
                                               {Action::replace_u1, Action::replace_u2}};
    for (const auto& [a, b] : pairs) {
        Boundary bd{a, b, std::vector<std::optional<double>>(n1)};
        for (int j = 0; j < n1; ++j) {
            bool seen_a = false;
            for (int g = 0; g < G; ++g) {
                const Action act = policy.at(g, j);
                if (act == a) seen_a = true;
                else if (act == b && seen_a) {
                    bd.by_j[j] = pi1_of(grid, g);
                    break;
                }
            }
        }
        r.boundaries.push_back(std::move(bd));
    }
    for (int p = 0; p < 3; ++p) {
        Boundary& bd = r.boundaries[p];
        std::optional<double> prev;
        int prev_j = -1;
        for (int j = 0; j < n1; ++j) {
            if (!bd.by_j[j]) continue;
            if (prev && *bd.by_j[j] > *prev + 1e-12) {
                r.boundaries_non_increasing = false;
                bd.non_increasing = false;
                r.violations.push_back({"boundary-" + std::to_string(action_code(bd.from)) + "-" +
                                            std::to_string(action_code(bd.to)),
                                        j, *bd.by_j[j],
                                        "boundary rises from " + fmt(*prev) + " at j=" + std::to_string(prev_j)});
            }
            prev = bd.by_j[j];
            prev_j = j;
        }
    }

    for (int j = 0; j < n1; ++j) {
        int max_one = -1, min_both = G;
        for (int g = 0; g < G; ++g) {
            if (policy.at(g, j) == Action::replace_u1) max_one = g;
            if (policy.at(g, j) == Action::replace_both && min_both == G) min_both = g;
        }
        if (max_one >= 0 && min_both < G && max_one > min_both)
            violate(r.u1_both_separated, "u1-both-separated", j, max_one,
                    "action 1 chosen above the first action-12 point " + fmt(pi1_of(grid, min_both)));
    }

    // Upward persistence; a single sweep per property keeps this linear.
    for (int j = 0; j < n1; ++j) {
        int first_both = G;
        for (int g = 0; g < G; ++g)
            if (policy.at(g, j) == Action::replace_both) {
                first_both = g;
                break;
            }
        if (first_both == G) continue;
        bool reported = false;
        for (int j2 = j; j2 < n1 && !reported; ++j2)
            for (int g = first_both; g < G; ++g)
                if (policy.at(g, j2) != Action::replace_both) {
                    violate(r.both_persists_upward, "both-persists", j2, g,
                            "action 12 at pi(1)=" + fmt(pi1_of(grid, first_both)) + ", j=" + std::to_string(j) +
                                " but " + std::to_string(action_code(policy.at(g, j2))) + " here");
                    reported = true;
                    break;
                }
    }
    for (int j = 0; j < n1; ++j) {
        bool seen_two = false;
        for (int g = 0; g < G; ++g) {
            const Action act = policy.at(g, j);
            if (act == Action::replace_u2) seen_two = true;
            else if (seen_two && act != Action::replace_both) {
                violate(r.u2_persists_upward, "u2-persists", j, g,
                        "action " + std::to_string(action_code(act)) + " above an action-2 point");
                break;
            }
        }
    }
    return r;
}

const PreferenceBoundary& PreferenceReport::boundary(Action from, Action to) const {
    for (const auto& b : boundaries)
        if (b.from == from && b.to == to) return b;
    throw ValidationError("no such boundary");
}

PreferenceReport preference_report(const GridSolver& solver, const ValueFunction& V, double tie_tol) {
    const BeliefGrid& grid = solver.grid();
    require_two_state(grid);
    const int n1 = solver.model().u1_states();
    const int L1 = solver.model().L1;
    const int G = grid.size();
    PreferenceReport r;
    r.resolution = grid.step();

    std::vector<std::array<double, 4>> gam(static_cast<std::size_t>(G) * n1);
    for (int g = 0; g < G; ++g)
        for (int j = 0; j < n1; ++j) gam[static_cast<std::size_t>(g) * n1 + j] = solver.gammas(V, g, j);
    const auto at = [&](int g, int j, Action a) { return gam[static_cast<std::size_t>(g) * n1 + j][action_slot(a)]; };

    const std::pair<Action, Action> pairs[] = {{Action::none, Action::replace_both},
                                               {Action::replace_u1, Action::replace_both},
                                               {Action::none, Action::replace_u2},
                                               {Action::replace_u1, Action::replace_u2}};
    for (const auto& [a, b] : pairs) {
        PreferenceBoundary pb{a, b, std::vector<std::optional<double>>(n1), std::vector<bool>(n1, true), true};
        const bool all_j = a == Action::replace_u1 && b == Action::replace_both;
        const std::string name = "preference-" + std::to_string(action_code(a)) + "-" + std::to_string(action_code(b));
        for (int j = 0; j < n1; ++j) {
            if (!all_j && j == L1) continue;
            for (int g = 0; g < G; ++g) {
                const bool prefers = at(g, j, b) <= at(g, j, a) + tie_tol;
                if (prefers && !pb.by_j[j]) pb.by_j[j] = pi1_of(grid, g);
                if (!prefers && pb.by_j[j] && pb.single_crossing[j]) {
                    pb.single_crossing[j] = false;
                    r.violations.push_back({name + "-crossing", j, pi1_of(grid, g), "preference reverts above the boundary"});
                }
            }
        }
        // A pair that is never preferred at a compared j sits above every grid point.
        std::optional<double> prev;
        for (int j = 0; j < n1; ++j) {
            if (!all_j && j == L1) continue;
            const double here = pb.by_j[j] ? *pb.by_j[j] : std::numeric_limits<double>::infinity();
            if (prev && here > *prev + 1e-12) pb.non_increasing = false;
            prev = here;
        }
        r.boundaries.push_back(std::move(pb));
    }
    for (int p = 0; p < 3; ++p)
        if (!r.boundaries[p].non_increasing) {
            const auto& pb = r.boundaries[p];
            r.violations.push_back({"preference-" + std::to_string(action_code(pb.from)) + "-" +
                                        std::to_string(action_code(pb.to)) + "-monotone",
                                    0, 0.0, "boundary rises with j"});
        }

    const int e0 = grid.reset_index();
    r.u2_minus_both.resize(n1);
    for (int j = 0; j < n1; ++j) {
        const double ref = at(e0, j, Action::replace_u2) - at(e0, j, Action::replace_both);
        r.u2_minus_both[j] = ref;
        for (int g = 0; g < G; ++g) {
            const double d = at(g, j, Action::replace_u2) - at(g, j, Action::replace_both);
            r.u2_minus_both_spread = std::max(r.u2_minus_both_spread, std::abs(d - ref));
        }
        if (j > 0 && r.u2_minus_both[j] + tie_tol < r.u2_minus_both[j - 1]) {
            r.u2_vs_both_monotone_in_j = false;
            r.violations.push_back({"u2-minus-both-monotone", j, 0.0, "Gamma^2 - Gamma^12 decreases in j"});
        }
    }
    if (r.u2_minus_both_spread > tie_tol) {
        r.u2_vs_both_pi_independent = false;
        r.violations.push_back({"u2-minus-both-pi", 0, 0.0, "Gamma^2 - Gamma^12 varies with pi by " + fmt(r.u2_minus_both_spread)});
    }
    return r;
}

ValueShapeReport value_shape_report(const ValueFunction& V, const BeliefGrid& grid, double tol) {
    require_two_state(grid);
    ValueShapeReport r;
    r.tol = tol;
    const int G = grid.size();
    const int n1 = static_cast<int>(V.values.cols());
    for (int j = 0; j < n1; ++j) {
        for (int g = 0; g + 1 < G; ++g) {
            const double drop = V.at(g, j) - V.at(g + 1, j);
            r.worst_belief_drop = std::max(r.worst_belief_drop, drop);
            if (drop > tol && r.monotone_in_belief) {
                r.monotone_in_belief = false;
                r.violations.push_back({"monotone-belief", j, pi1_of(grid, g + 1), "V drops by " + fmt(drop)});
            }
        }
        for (int g = 1; g + 1 < G; ++g) {
            const double defect = 0.5 * (V.at(g - 1, j) + V.at(g + 1, j)) - V.at(g, j);
            r.worst_concavity_defect = std::max(r.worst_concavity_defect, defect);
            if (defect > tol && r.concave_in_belief) {
                r.concave_in_belief = false;
                r.violations.push_back({"concave-belief", j, pi1_of(grid, g), "chord exceeds V by " + fmt(defect)});
            }
        }
    }
    for (int j = 0; j + 1 < n1; ++j)
        for (int g = 0; g < G; ++g) {
            const double drop = V.at(g, j) - V.at(g, j + 1);
            r.worst_j_drop = std::max(r.worst_j_drop, drop);
            if (drop > tol && r.monotone_in_j) {
                r.monotone_in_j = false;
                r.violations.push_back({"monotone-j", j + 1, pi1_of(grid, g), "V drops by " + fmt(drop)});
            }
        }
    return r;
}

} // namespace cbm
