#pragma once

#include "cbm/errors.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace cbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance on row sums and belief sums.
inline constexpr double kStochasticTol = 1e-12;

/**
 * Two-component system with unidirectional degradation dependence.
 *
 * U1 has states {0..L1} and is observed directly; it moves with Q.
 * U2 has hidden states {0..L2}; conditional on U1 being in state j, it moves
 * with P[j]. Each period U2 emits a signal in {0..M} drawn from B(state, .).
 * The highest index of each space is the failure state.
 */
struct SystemModel {
    int L1 = 0;
    int L2 = 0;
    int M = 0;
    Matrix Q;
    std::vector<Matrix> P;
    Matrix B;

    int u1_states() const { return L1 + 1; }
    int u2_states() const { return L2 + 1; }
    int signals() const { return M + 1; }
};

struct Violation {
    std::string matrix; ///< "Q", "P[1]", "B", ...
    int row = -1;       ///< -1 when the defect is not row-specific
    std::string defect;

    std::string to_string() const;
};

using ValidationReport = std::vector<Violation>;

/// Lists every defect of the model; empty iff all invariants hold.
ValidationReport validate_model(const SystemModel& model);

/// Throws ValidationError carrying the full report when validation fails.
void require_valid(const SystemModel& model);

/// Checks one row-stochastic matrix, appending violations under `name`.
void validate_stochastic(const Matrix& m, const std::string& name, ValidationReport& out,
                         double tol = kStochasticTol);

/// Operating, set-up and replacement costs with the discount factor.
/// Construction rejects negative, non-finite or non-monotone operating costs.
class CostStructure {
public:
    CostStructure(Vector c_o1, Vector c_o2, double c_s, double c_r1, double c_r2, double gamma);

    const Vector& c_o1() const { return c_o1_; }
    const Vector& c_o2() const { return c_o2_; }
    double c_s() const { return c_s_; }
    double c_r1() const { return c_r1_; }
    double c_r2() const { return c_r2_; }
    double gamma() const { return gamma_; }

    /// Same costs, different discount factor (gamma = 0 allowed for one-step checks).
    CostStructure with_gamma(double gamma) const;

    /// Largest one-period cost over all states and actions.
    double max_stage_cost() const;

    /// Throws unless c_o1 and c_o2 match the model's state counts.
    void require_compatible(const SystemModel& model) const;

private:
    CostStructure() = default;
    void validate(bool allow_zero_gamma) const;

    Vector c_o1_;
    Vector c_o2_;
    double c_s_ = 0.0;
    double c_r1_ = 0.0;
    double c_r2_ = 0.0;
    double gamma_ = 0.0;
};

/// Probability vector over U2's states.
class Belief {
public:
    /// Throws ValidationError unless entries are nonnegative and sum to 1.
    explicit Belief(Vector pi);

    /// e^0 = (1, 0, ..., 0): the belief right after U2 is replaced.
    static Belief reset(int L2);

    /// (1 - u, u) for two-state U2.
    static Belief two_state(double failure_prob);

    const Vector& pi() const { return pi_; }
    double operator[](int i) const { return pi_[i]; }
    int size() const { return static_cast<int>(pi_.size()); }
    double failure_prob() const { return pi_[pi_.size() - 1]; }

private:
    Vector pi_;
};

} // namespace cbm
