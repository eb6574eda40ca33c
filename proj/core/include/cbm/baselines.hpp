#pragma once

#include "cbm/solver.hpp"

#include <string>
#include <vector>

namespace cbm {

/// Threshold grid {0, step, ..., 1}; value m is m / round(1/step).
std::vector<double> threshold_grid(double xi_step);

/// U2 is replaced when pi(L2) exceeds xi (with a 1e-12 guard for grid ties).
bool exceeds_threshold(const Vector& pi, double xi);

struct Policy1Result {
    double xi = 0.0;
    double value = 0.0; ///< V(e^0, 0)
    SolveResult solution;
};

/// Admissible sets of the single-threshold policy: below the threshold U1
/// chooses among {0, 1}; above it U2 is replaced and U1 chooses among {2, 12}.
/// At j = L1 these are intersected with {1, 12}.
std::vector<ActionSet> policy1_mask(const GridSolver& solver, double xi);

/// Searches xi on threshold_grid(xi_step); ties go to the smaller xi.
Policy1Result solve_policy1(const GridSolver& solver, double xi_step = 0.01, const SolveOptions& options = {});

struct Policy2Result {
    double xi = 0.0;
    int upsilon = 1;
    double value = 0.0;
    SolveResult solution;
};

/// Double-threshold rule: U1 replaced when j >= upsilon (always at j = L1),
/// U2 replaced when pi(L2) > xi.
Action policy2_action(const Vector& pi, int j, double xi, int upsilon, int L1);

/// Exhaustive search over threshold_grid(xi_step) x {1..L1};
/// ties go to the lexicographically smaller (xi, upsilon).
Policy2Result solve_policy2(const GridSolver& solver, double xi_step = 0.01, const SolveOptions& options = {});

/// U2 kernel assumed by the independence surrogate.
enum class IndependentKernel {
    p0,                 ///< P[0] for every epoch
    occupation_mixture, ///< P[j] weighted by U1's long-run occupation under its own optimal policy
};

const char* to_string(IndependentKernel k);
IndependentKernel independent_kernel_from_string(const std::string& s);

struct Policy3Result {
    std::vector<bool> replace_u1;  ///< standalone U1 MDP decision per j
    std::vector<bool> replace_u2;  ///< standalone U2 POMDP decision per grid point
    Vector u1_values;              ///< standalone U1 MDP values
    Matrix u2_kernel;              ///< kernel the U2 surrogate used
    double value = 0.0;            ///< V(e^0, 0) of the merged rule under the true model
    SolveResult evaluation;
};

/// Independence surrogate: U1 as an MDP on (Q, c_o1, c_s, c_r1), U2 as a
/// POMDP on (kernel, B, c_o2, c_s, c_r2); the merged rule is evaluated
/// on the coupled model, where c_s is charged once per maintenance epoch.
Policy3Result solve_policy3(const GridSolver& solver, const SolveOptions& options = {},
                            IndependentKernel kernel = IndependentKernel::p0);

/// 100 (Vi - V0) / V0. Throws ValidationError unless V0 > 0.
double gap_percent(double Vi, double V0);

struct GapRecord {
    std::string instance;
    double V0 = 0.0, V1 = 0.0, V2 = 0.0, V3 = 0.0;
    double gap1 = 0.0, gap2 = 0.0, gap3 = 0.0;
    double xi1 = 0.0, xi2 = 0.0;
    int upsilon2 = 0;
};

struct BenchmarkSettings {
    double grid_step = 0.002;
    double tol = 1e-3;
    double xi_step = 0.01;
    IndependentKernel policy3_kernel = IndependentKernel::p0;
};

/// Policy 0 and the three baselines on one instance.
GapRecord compare_policies(const std::string& name, const SystemModel& model, const CostStructure& costs,
                           const BenchmarkSettings& settings);

} // namespace cbm
