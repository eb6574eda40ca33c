#include "cbm/solver.hpp"
#include "cbm/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cbm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int action_code(Action a) { return static_cast<int>(a); }

int action_slot(Action a) {
    switch (a) {
    case Action::none: return 0;
    case Action::replace_u1: return 1;
    case Action::replace_u2: return 2;
    case Action::replace_both: return 3;
    }
    return 0;
}

Action action_from_code(int code) {
    switch (code) {
    case 0: return Action::none;
    case 1: return Action::replace_u1;
    case 2: return Action::replace_u2;
    case 12: return Action::replace_both;
    default: throw ValidationError("unknown action code " + std::to_string(code));
    }
}

bool replaces_u1(Action a) { return a == Action::replace_u1 || a == Action::replace_both; }
bool replaces_u2(Action a) { return a == Action::replace_u2 || a == Action::replace_both; }

Action combine_actions(bool u1, bool u2) {
    if (u1 && u2) return Action::replace_both;
    if (u1) return Action::replace_u1;
    if (u2) return Action::replace_u2;
    return Action::none;
}

ActionSet admissible_actions(int j, int L1) {
    if (j == L1) return action_bit(Action::replace_u1) | action_bit(Action::replace_both);
    return kAllActions;
}

double stage_cost(const CostStructure& costs, const Vector& pi, int j) {
    return pi.dot(costs.c_o2()) + costs.c_o1()[j];
}

Vector signal_distribution(const SystemModel& model, const Vector& pi, int j) {
    return (pi.transpose() * model.P[j] * model.B).transpose();
}

Matrix obs_kernel(const SystemModel& model, const Vector& pi, int j) {
    const Vector pz = signal_distribution(model, pi, j);
    return model.Q.row(j).transpose() * pz.transpose();
}

Vector belief_update(const SystemModel& model, const Vector& pi, int j, int z) {
    Vector pred = (pi.transpose() * model.P[j]).transpose();
    pred.array() *= model.B.col(z).array();
    const double norm = pred.sum();
    if (!(norm > 0.0)) {
        std::ostringstream os;
        os << "signal " << z << " has zero probability at j=" << j << ", pi=(" << pi.transpose() << ")";
        throw ValidationError(os.str());
    }
    return pred / norm;
}

namespace {

Backup finish_backup(std::array<double, 4> g, ActionSet allowed) {
    Backup b;
    b.gamma = g;
    b.value = kInf;
    for (int s = 0; s < 4; ++s) {
        if (!(allowed & (1u << s))) {
            b.gamma[s] = kInf;
            continue;
        }
        if (g[s] < b.value) {
            b.value = g[s];
            b.action = kActions[s];
        }
    }
    return b;
}

} // namespace

Backup bellman_backup(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid,
                      const ValueFunction& V, const Vector& pi, int j, ActionSet allowed) {
    const int n1 = model.u1_states();
    const double gamma = costs.gamma();
    const double co = stage_cost(costs, pi, j);
    const Vector pz = signal_distribution(model, pi, j);
    const int e0 = grid.reset_index();

    double cont0 = 0.0, cont1 = 0.0;
    for (int z = 0; z < model.signals(); ++z) {
        if (!(pz[z] > 0.0)) continue;
        const Vector t = belief_update(model, pi, j, z);
        const auto st = grid.stencil(t);
        for (int k = 0; k < n1; ++k) {
            if (model.Q(j, k) == 0.0) continue;
            double v = 0.0;
            for (const auto& w : st) v += w.weight * V.values(w.index, k);
            cont0 += model.Q(j, k) * pz[z] * v;
        }
        double v0 = 0.0;
        for (const auto& w : st) v0 += w.weight * V.values(w.index, 0);
        cont1 += pz[z] * v0;
    }
    double cont2 = 0.0;
    for (int k = 0; k < n1; ++k) cont2 += model.Q(j, k) * V.values(e0, k);

    std::array<double, 4> g{};
    g[0] = co + gamma * cont0;
    g[1] = co + costs.c_s() + costs.c_r1() + gamma * cont1;
    g[2] = co + costs.c_s() + costs.c_r2() + gamma * cont2;
    g[3] = co + costs.c_s() + costs.c_r1() + costs.c_r2() + gamma * V.values(e0, 0);
    return finish_backup(g, allowed & admissible_actions(j, model.L1));
}

GridSolver::GridSolver(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid)
    : model_(model), costs_(costs), grid_(grid), n1_(model.u1_states()) {
    require_valid(model_);
    costs_.require_compatible(model_);
    if (grid_.L2() != model_.L2) throw ValidationError("grid dimension does not match L2");

    successors_.resize(n1_);
    for (int j = 0; j < n1_; ++j)
        for (int k = 0; k < n1_; ++k)
            if (model_.Q(j, k) != 0.0) successors_[j].emplace_back(k, model_.Q(j, k));

    const int G = grid_.size();
    stage_.resize(static_cast<std::size_t>(G) * n1_);
    branch_begin_.resize(static_cast<std::size_t>(G) * n1_ + 1);
    std::vector<GridWeight> st;
    for (int g = 0; g < G; ++g) {
        const Vector& pi = grid_.point(g);
        for (int j = 0; j < n1_; ++j) {
            const std::size_t s = static_cast<std::size_t>(g) * n1_ + j;
            stage_[s] = stage_cost(costs_, pi, j);
            branch_begin_[s] = static_cast<int>(branches_.size());
            const Vector pz = signal_distribution(model_, pi, j);
            for (int z = 0; z < model_.signals(); ++z) {
                if (!(pz[z] > 0.0)) continue; // zero-weight signals drop out of the sums
                grid_.stencil(belief_update(model_, pi, j, z), st);
                Branch b{pz[z], static_cast<int>(weights_.size()), 0};
                weights_.insert(weights_.end(), st.begin(), st.end());
                b.end = static_cast<int>(weights_.size());
                branches_.push_back(b);
            }
        }
    }
    branch_begin_.back() = static_cast<int>(branches_.size());
}

std::vector<ActionSet> GridSolver::full_mask() const {
    std::vector<ActionSet> m(static_cast<std::size_t>(grid_.size()) * n1_);
    for (int g = 0; g < grid_.size(); ++g)
        for (int j = 0; j < n1_; ++j) m[static_cast<std::size_t>(g) * n1_ + j] = admissible_actions(j, model_.L1);
    return m;
}

std::array<double, 4> GridSolver::gammas(const ValueFunction& V, int g, int j) const {
    const std::size_t s = static_cast<std::size_t>(g) * n1_ + j;
    const double gamma = costs_.gamma();
    const double co = stage_[s];
    const int e0 = grid_.reset_index();

    double cont0 = 0.0, cont1 = 0.0;
    for (int b = branch_begin_[s]; b < branch_begin_[s + 1]; ++b) {
        const Branch& br = branches_[b];
        double inner0 = 0.0, inner1 = 0.0;
        for (int w = br.begin; w < br.end; ++w) {
            const GridWeight& gw = weights_[w];
            double vk = 0.0;
            for (const auto& [k, q] : successors_[j]) vk += q * V.values(gw.index, k);
            inner0 += gw.weight * vk;
            inner1 += gw.weight * V.values(gw.index, 0);
        }
        cont0 += br.prob * inner0;
        cont1 += br.prob * inner1;
    }
    double cont2 = 0.0;
    for (const auto& [k, q] : successors_[j]) cont2 += q * V.values(e0, k);

    return {co + gamma * cont0, co + costs_.c_s() + costs_.c_r1() + gamma * cont1,
            co + costs_.c_s() + costs_.c_r2() + gamma * cont2,
            co + costs_.c_s() + costs_.c_r1() + costs_.c_r2() + gamma * V.values(e0, 0)};
}

SolveResult GridSolver::solve(const std::vector<ActionSet>& mask, const SolveOptions& options) const {
    const int G = grid_.size();
    if (mask.size() != static_cast<std::size_t>(G) * n1_) throw ValidationError("action mask has the wrong size");

    SolveResult out;
    if (options.warm_start && (options.warm_start->rows() != G || options.warm_start->cols() != n1_))
        throw ValidationError("warm start has the wrong shape");
    out.V.values = options.warm_start ? *options.warm_start : Matrix::Zero(G, n1_);
    out.policy.u1_states = n1_;
    out.policy.actions.assign(static_cast<std::size_t>(G) * n1_, Action::none);
    Matrix next(G, n1_);

    for (long it = 1; it <= options.max_iterations; ++it) {
        parallel_for(static_cast<std::size_t>(G), [&](std::size_t g) {
            for (int j = 0; j < n1_; ++j) {
                const std::size_t s = g * n1_ + j;
                const Backup b = finish_backup(gammas(out.V, static_cast<int>(g), j), mask[s]);
                next(g, j) = b.value;
                out.policy.actions[s] = b.action;
            }
        });
        if (!next.allFinite()) throw ValidationError("a state has no admissible action");
        const double residual = (next - out.V.values).cwiseAbs().maxCoeff();
        out.V.values.swap(next);
        out.iterations = it;
        out.residual = residual;
        out.residual_trace.push_back(residual);
        if (residual <= options.tol) return out;
    }
    std::ostringstream os;
    os << "value iteration did not converge in " << options.max_iterations << " iterations (residual "
       << out.residual << ")";
    throw NumericalError(os.str());
}

ValueFunction GridSolver::finite_horizon(const std::vector<ActionSet>& mask, int horizon) const {
    const int G = grid_.size();
    ValueFunction V{Matrix::Zero(G, n1_)};
    Matrix next(G, n1_);
    for (int h = 0; h < horizon; ++h) {
        for (int g = 0; g < G; ++g)
            for (int j = 0; j < n1_; ++j)
                next(g, j) = finish_backup(gammas(V, g, j), mask[static_cast<std::size_t>(g) * n1_ + j]).value;
        V.values.swap(next);
    }
    return V;
}

SolveResult value_iteration(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid,
                            double tol) {
    GridSolver solver(model, costs, grid);
    return solver.solve(solver.full_mask(), {tol});
}

std::vector<ActionSet> mask_from_rule(const GridSolver& solver, const PolicyRule& rule) {
    const int n1 = solver.model().u1_states();
    const int G = solver.grid().size();
    std::vector<ActionSet> mask(static_cast<std::size_t>(G) * n1);
    for (int g = 0; g < G; ++g)
        for (int j = 0; j < n1; ++j) {
            const Action a = rule(solver.grid().point(g), j);
            if (!(admissible_actions(j, solver.model().L1) & action_bit(a))) {
                std::ostringstream os;
                os << "rule picks inadmissible action " << action_code(a) << " at j=" << j << ", pi=("
                   << solver.grid().point(g).transpose() << ")";
                throw ValidationError(os.str());
            }
            mask[static_cast<std::size_t>(g) * n1 + j] = action_bit(a);
        }
    return mask;
}

SolveResult evaluate_fixed_policy(const GridSolver& solver, const PolicyRule& rule, const SolveOptions& options) {
    return solver.solve(mask_from_rule(solver, rule), options);
}

SolveResult evaluate_fixed_policy(const SystemModel& model, const CostStructure& costs, const PolicyRule& rule,
                                  const BeliefGrid& grid, double tol) {
    GridSolver solver(model, costs, grid);
    return evaluate_fixed_policy(solver, rule, {tol});
}

} // namespace cbm
