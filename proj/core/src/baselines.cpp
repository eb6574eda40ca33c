#include "cbm/baselines.hpp"

#include "cbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbm {

namespace {
constexpr double kThresholdGuard = 1e-12;
}

std::vector<double> threshold_grid(double xi_step) {
    const long m = std::lround(1.0 / xi_step);
    if (m < 1 || std::abs(m * xi_step - 1.0) > 1e-9) throw ValidationError("threshold step must divide 1");
    std::vector<double> out;
    out.reserve(m + 1);
    for (long i = 0; i <= m; ++i) out.push_back(static_cast<double>(i) / m);
    return out;
}

bool exceeds_threshold(const Vector& pi, double xi) { return pi[pi.size() - 1] > xi + kThresholdGuard; }

std::vector<ActionSet> policy1_mask(const GridSolver& solver, double xi) {
    const int n1 = solver.model().u1_states();
    const int L1 = solver.model().L1;
    const auto& grid = solver.grid();
    const ActionSet below = action_bit(Action::none) | action_bit(Action::replace_u1);
    const ActionSet above = action_bit(Action::replace_u2) | action_bit(Action::replace_both);
    std::vector<ActionSet> mask(static_cast<std::size_t>(grid.size()) * n1);
    for (int g = 0; g < grid.size(); ++g) {
        const ActionSet side = exceeds_threshold(grid.point(g), xi) ? above : below;
        for (int j = 0; j < n1; ++j) mask[static_cast<std::size_t>(g) * n1 + j] = side & admissible_actions(j, L1);
    }
    return mask;
}

Policy1Result solve_policy1(const GridSolver& solver, double xi_step, const SolveOptions& options) {
    // Warm starts only steer the search; the winner is re-solved from V_0 = 0.
    Policy1Result best;
    bool first = true;
    SolveOptions opts = options;
    Matrix warm;
    for (double xi : threshold_grid(xi_step)) {
        auto sol = solver.solve(policy1_mask(solver, xi), opts);
        const double v = sol.V.at(solver.grid().reset_index(), 0);
        warm = std::move(sol.V.values);
        opts.warm_start = &warm;
        if (first || v < best.value) {
            best.xi = xi;
            best.value = v;
            first = false;
        }
    }
    SolveOptions cold = options;
    cold.warm_start = nullptr;
    best.solution = solver.solve(policy1_mask(solver, best.xi), cold);
    best.value = best.solution.V.at(solver.grid().reset_index(), 0);
    return best;
}

Action policy2_action(const Vector& pi, int j, double xi, int upsilon, int L1) {
    return combine_actions(j >= upsilon || j == L1, exceeds_threshold(pi, xi));
}

Policy2Result solve_policy2(const GridSolver& solver, double xi_step, const SolveOptions& options) {
    const int L1 = solver.model().L1;
    const int top = std::max(L1, 1);
    Policy2Result best;
    bool first = true;
    // Each upsilon sweeps xi upward, warm-started from its previous candidate;
    // the winner is re-evaluated from V_0 = 0.
    std::vector<Matrix> warm(top + 1);
    for (double xi : threshold_grid(xi_step)) {
        for (int upsilon = 1; upsilon <= top; ++upsilon) {
            SolveOptions opts = options;
            if (warm[upsilon].size() > 0) opts.warm_start = &warm[upsilon];
            auto sol = evaluate_fixed_policy(
                solver, [&](const Vector& pi, int j) { return policy2_action(pi, j, xi, upsilon, L1); }, opts);
            const double v = sol.V.at(solver.grid().reset_index(), 0);
            warm[upsilon] = std::move(sol.V.values);
            if (first || v < best.value) {
                best.xi = xi;
                best.upsilon = upsilon;
                best.value = v;
                first = false;
            }
        }
    }
    SolveOptions cold = options;
    cold.warm_start = nullptr;
    best.solution = evaluate_fixed_policy(
        solver, [&](const Vector& pi, int j) { return policy2_action(pi, j, best.xi, best.upsilon, L1); }, cold);
    best.value = best.solution.V.at(solver.grid().reset_index(), 0);
    return best;
}

const char* to_string(IndependentKernel k) {
    return k == IndependentKernel::p0 ? "P0" : "occupation-mixture";
}

IndependentKernel independent_kernel_from_string(const std::string& s) {
    if (s == "P0" || s == "p0") return IndependentKernel::p0;
    if (s == "occupation-mixture") return IndependentKernel::occupation_mixture;
    throw ValidationError("unknown policy-3 kernel '" + s + "'");
}

namespace {

struct U1Mdp {
    Vector values;
    std::vector<bool> replace;
};

// Standalone U1 problem; replacement resets U1 to state 0 for the next period.
U1Mdp solve_u1_mdp(const Matrix& Q, const CostStructure& costs) {
    const int n1 = static_cast<int>(Q.rows());
    const int L1 = n1 - 1;
    const double gamma = costs.gamma();
    const Vector& c = costs.c_o1();
    const double repl = costs.c_s() + costs.c_r1();
    Vector V = Vector::Zero(n1);
    U1Mdp out;
    out.replace.assign(n1, false);
    for (long it = 0; it < 1000000; ++it) {
        Vector next(n1);
        for (int j = 0; j < n1; ++j) {
            const double keep = j == L1 ? std::numeric_limits<double>::infinity() : c[j] + gamma * Q.row(j).dot(V);
            const double rep = c[j] + repl + gamma * V[0];
            next[j] = std::min(keep, rep);
            out.replace[j] = rep < keep;
        }
        const double d = (next - V).cwiseAbs().maxCoeff();
        V = next;
        if (d < 1e-12 * std::max(1.0, V.cwiseAbs().maxCoeff())) break;
    }
    out.values = V;
    return out;
}

// Long-run occupation of U1 under its standalone policy (renewal chain).
Vector u1_occupation(const Matrix& Q, const std::vector<bool>& replace) {
    const int n1 = static_cast<int>(Q.rows());
    Matrix T = Matrix::Zero(n1, n1);
    for (int j = 0; j < n1; ++j) {
        if (replace[j]) T(j, 0) = 1.0;
        else T.row(j) = Q.row(j);
    }
    Vector p = Vector::Zero(n1);
    p[0] = 1.0;
    for (int it = 0; it < 100000; ++it) {
        Vector next = (p.transpose() * T).transpose();
        // Average with the previous iterate to damp periodic chains.
        next = 0.5 * (next + p);
        if ((next - p).cwiseAbs().maxCoeff() < 1e-15) return next;
        p = next;
    }
    return p;
}

} // namespace

Policy3Result solve_policy3(const GridSolver& solver, const SolveOptions& options, IndependentKernel kernel) {
    const SystemModel& model = solver.model();
    const CostStructure& costs = solver.costs();
    const BeliefGrid& grid = solver.grid();
    Policy3Result out;

    const U1Mdp u1 = solve_u1_mdp(model.Q, costs);
    out.replace_u1 = u1.replace;
    out.replace_u1[model.L1] = true;
    out.u1_values = u1.values;

    if (kernel == IndependentKernel::p0) {
        out.u2_kernel = model.P[0];
    } else {
        const Vector w = u1_occupation(model.Q, out.replace_u1);
        out.u2_kernel = Matrix::Zero(model.u2_states(), model.u2_states());
        for (int j = 0; j < model.u1_states(); ++j) out.u2_kernel += w[j] * model.P[j];
        for (Eigen::Index r = 0; r < out.u2_kernel.rows(); ++r) out.u2_kernel.row(r) /= out.u2_kernel.row(r).sum();
    }

    // U2 alone: a surrogate with a frozen dummy U1 (Q = I), where j = 0 may
    // only do nothing or replace U2 and costs charge nothing for U1.
    SystemModel surrogate;
    surrogate.L1 = 1;
    surrogate.L2 = model.L2;
    surrogate.M = model.M;
    surrogate.Q = Matrix::Identity(2, 2);
    surrogate.P = {out.u2_kernel, out.u2_kernel};
    surrogate.B = model.B;
    const CostStructure u2_costs(Vector::Zero(2), costs.c_o2(), costs.c_s(), 0.0, costs.c_r2(), costs.gamma());
    const GridSolver u2_solver(surrogate, u2_costs, grid);
    std::vector<ActionSet> mask(static_cast<std::size_t>(grid.size()) * 2);
    for (int g = 0; g < grid.size(); ++g) {
        mask[2 * g] = action_bit(Action::none) | action_bit(Action::replace_u2);
        mask[2 * g + 1] = action_bit(Action::replace_u1);
    }
    const SolveResult u2 = u2_solver.solve(mask, options);
    out.replace_u2.resize(grid.size());
    for (int g = 0; g < grid.size(); ++g) out.replace_u2[g] = u2.policy.at(g, 0) == Action::replace_u2;

    std::vector<ActionSet> merged(static_cast<std::size_t>(grid.size()) * model.u1_states());
    for (int g = 0; g < grid.size(); ++g)
        for (int j = 0; j < model.u1_states(); ++j)
            merged[static_cast<std::size_t>(g) * model.u1_states() + j] =
                action_bit(combine_actions(out.replace_u1[j], out.replace_u2[g]));
    out.evaluation = solver.solve(merged, options);
    out.value = out.evaluation.V.at(grid.reset_index(), 0);
    return out;
}

double gap_percent(double Vi, double V0) {
    if (!(V0 > 0.0)) throw ValidationError("gap_percent needs a positive reference value");
    return 100.0 * (Vi - V0) / V0;
}

GapRecord compare_policies(const std::string& name, const SystemModel& model, const CostStructure& costs,
                           const BenchmarkSettings& settings) {
    const BeliefGrid grid(model.L2, settings.grid_step);
    const GridSolver solver(model, costs, grid);
    const SolveOptions options{settings.tol};
    const int e0 = grid.reset_index();

    GapRecord r;
    r.instance = name;
    r.V0 = solver.solve(solver.full_mask(), options).V.at(e0, 0);
    const auto p1 = solve_policy1(solver, settings.xi_step, options);
    const auto p2 = solve_policy2(solver, settings.xi_step, options);
    const auto p3 = solve_policy3(solver, options, settings.policy3_kernel);
    r.V1 = p1.value;
    r.V2 = p2.value;
    r.V3 = p3.value;
    r.xi1 = p1.xi;
    r.xi2 = p2.xi;
    r.upsilon2 = p2.upsilon;
    r.gap1 = gap_percent(r.V1, r.V0);
    r.gap2 = gap_percent(r.V2, r.V0);
    r.gap3 = gap_percent(r.V3, r.V0);
    return r;
}

} // namespace cbm
