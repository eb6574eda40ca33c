#pragma once

#include "cbm/model.hpp"
#include "cbm/rng.hpp"
#include "cbm/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cbm {

/// Parameter triple (Q, P[0..L1], B) under estimation.
struct Theta {
    Matrix Q;
    std::vector<Matrix> P;
    Matrix B;
    int iteration = 0; ///< number of M-steps that produced this value

    static Theta from_model(const SystemModel& model);
    SystemModel to_model() const;
    int L1() const { return static_cast<int>(Q.rows()) - 1; }
    int L2() const { return static_cast<int>(B.rows()) - 1; }
    int M() const { return static_cast<int>(B.cols()) - 1; }
};

/// Closed-form MLE of Q from U1 transition counts.
struct QEstimate {
    Matrix Q;
    Matrix counts;                   ///< counts(j, j2) of observed j -> j2 transitions
    std::vector<bool> undetermined;  ///< rows never visited as a source (filled with identity)
};

QEstimate estimate_Q(const TrajectorySet& data, int L1);

/// Smoothed posteriors of one trajectory.
struct TrajectoryPosterior {
    std::vector<Vector> phi; ///< phi[k] over S2 for k = 0..n; phi[0] is the point mass at 0
    std::vector<Matrix> xi;  ///< xi[k-1](i, i2) = P(X2_{k-1} = i, X2_k = i2 | data), k = 1..n
    double loglik = 0.0;     ///< log P(z_{1:n} | x1_{0:n})
};

/// Scaled forward-backward pass. Throws NumericalError naming the epoch when
/// an observation has zero probability under theta.
TrajectoryPosterior forward_backward(const Theta& theta, const Trajectory& traj);

/// Unscaled forward recursion; used to cross-check the scaled pass on short paths.
double forward_likelihood_unscaled(const Theta& theta, const Trajectory& traj);

struct Posteriors {
    std::vector<TrajectoryPosterior> per_trajectory;
    double loglik = 0.0; ///< sum over trajectories of log L^(t)
};

/// E-step over all trajectories (parallel over trajectories, fixed reduction order).
Posteriors e_step(const Theta& theta, const TrajectorySet& data);

struct MStepResult {
    Theta theta;
    std::vector<std::string> flags;
};

/// Re-estimates every P[j] and B from posteriors.
///
/// Rows of theta_prev.P[j] that are a unit vector on their own index are
/// absorbing and kept as they are. Rows whose denominator vanishes keep their
/// previous value and are flagged. Q is copied from theta_prev.
MStepResult m_step(const Posteriors& posteriors, const TrajectorySet& data, const Theta& theta_prev);

struct FitOptions {
    int max_iter = 30;
    double tol = 1e-6; ///< stop when the log-likelihood gain drops below this
};

struct FitResult {
    Theta theta_hat;
    QEstimate q;
    std::vector<double> loglik_trace; ///< observed-data log-likelihood of theta_0, theta_1, ...
    int iterations = 0;               ///< M-steps performed
    bool converged = false;
    std::vector<std::string> flags;
};

/// EM fit. The Q of `init` is replaced by estimate_Q(data) before iterating.
FitResult fit(const TrajectorySet& data, const Theta& init, const FitOptions& options = {});

/// Number of free parameters, excluding absorbing rows that are not estimated.
int free_parameter_count(const Theta& theta);

struct ParameterStat {
    std::string name; ///< "P1(0,1)", "Q(0,0)", "B(1,1)"
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation across restarts (0 for one restart)
};

struct MultiStartResult {
    std::vector<ParameterStat> table;
    Theta mean_theta;        ///< entrywise mean of the restart estimates
    FitResult best;          ///< highest final log-likelihood
    std::vector<FitResult> runs;
};

struct MultiStartOptions {
    int restarts = 30;
    std::uint64_t seed = 0;
    FitOptions fit;
};

/// Random initial value respecting the absorbing rows of `structure`:
/// those rows are copied, every other P and B row is uniform on the simplex
/// (normalised exponentials).
Theta random_theta(const Theta& structure, RandomStream& rng);

/// Absorbing-failure template: P[j] row L2 is the unit vector on L2, the
/// rest uniform; B uniform; Q identity (ignored by fit).
Theta structural_template(int L1, int L2, int M);

MultiStartResult multi_start_fit(const TrajectorySet& data, const Theta& structure,
                                 const MultiStartOptions& options);

} // namespace cbm
