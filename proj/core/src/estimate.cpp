#include "cbm/estimate.hpp"
#include "cbm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cbm {

Theta Theta::from_model(const SystemModel& model) {
    return Theta{model.Q, model.P, model.B, 0};
}

SystemModel Theta::to_model() const {
    SystemModel m;
    m.L1 = L1();
    m.L2 = L2();
    m.M = M();
    m.Q = Q;
    m.P = P;
    m.B = B;
    return m;
}

QEstimate estimate_Q(const TrajectorySet& data, int L1) {
    if (data.trajectories.empty()) throw ValidationError("estimate_Q needs at least one trajectory");
    const int n1 = L1 + 1;
    QEstimate out;
    out.counts = Matrix::Zero(n1, n1);
    for (const auto& tr : data.trajectories)
        for (std::size_t k = 1; k < tr.x1.size(); ++k) {
            if (tr.x1[k - 1] > L1 || tr.x1[k] > L1) throw ValidationError("U1 state exceeds L1");
            out.counts(tr.x1[k - 1], tr.x1[k]) += 1.0;
        }
    out.Q = Matrix::Zero(n1, n1);
    out.undetermined.assign(n1, false);
    for (int j = 0; j < n1; ++j) {
        const double visits = out.counts.row(j).sum();
        if (visits > 0.0) {
            out.Q.row(j) = out.counts.row(j) / visits;
        } else {
            out.Q(j, j) = 1.0;
            out.undetermined[j] = true;
        }
    }
    return out;
}

namespace {

void require_compatible(const Theta& theta, const Trajectory& traj) {
    const int n = traj.length();
    if (static_cast<int>(traj.x1.size()) != n + 1) throw ValidationError("trajectory x1 must have n+1 entries");
    for (int x : traj.x1)
        if (x < 0 || x > theta.L1()) throw ValidationError("trajectory U1 state outside S1");
    for (int z : traj.z)
        if (z < 0 || z > theta.M()) throw ValidationError("trajectory signal outside O");
}

[[noreturn]] void zero_likelihood(int epoch) {
    throw NumericalError("observation at epoch " + std::to_string(epoch) + " has zero probability");
}

} // namespace

TrajectoryPosterior forward_backward(const Theta& theta, const Trajectory& traj) {
    require_compatible(theta, traj);
    const int n = traj.length();
    const int S = theta.L2() + 1;

    // alpha[k] normalised to sum 1; scale[k] is the normaliser of epoch k.
    std::vector<Vector> alpha(n + 1, Vector::Zero(S));
    std::vector<double> scale(n + 1, 1.0);
    alpha[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        const Matrix& P = theta.P[traj.x1[k - 1]];
        const int z = traj.signal(k);
        Vector a = (alpha[k - 1].transpose() * P).transpose();
        a.array() *= theta.B.col(z).array();
        const double c = a.sum();
        if (!(c > 0.0)) zero_likelihood(k);
        alpha[k] = a / c;
        scale[k] = c;
    }

    // beta[k] scaled by the same constants: beta_hat_k = beta_k / prod_{m>k} scale[m].
    std::vector<Vector> beta(n + 1, Vector::Ones(S));
    for (int k = n - 1; k >= 0; --k) {
        const Matrix& P = theta.P[traj.x1[k]];
        const int z = traj.signal(k + 1);
        Vector w = theta.B.col(z).cwiseProduct(beta[k + 1]);
        beta[k] = (P * w) / scale[k + 1];
    }

    TrajectoryPosterior post;
    post.phi.resize(n + 1);
    post.xi.resize(n);
    post.phi[0] = Vector::Zero(S);
    post.phi[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        Vector phi = alpha[k].cwiseProduct(beta[k]);
        post.phi[k] = phi / phi.sum();

        const Matrix& P = theta.P[traj.x1[k - 1]];
        const int z = traj.signal(k);
        Matrix xi(S, S);
        for (int i = 0; i < S; ++i)
            for (int i2 = 0; i2 < S; ++i2)
                xi(i, i2) = alpha[k - 1][i] * P(i, i2) * theta.B(i2, z) * beta[k][i2];
        post.xi[k - 1] = xi / xi.sum();
    }
    double ll = 0.0;
    for (int k = 1; k <= n; ++k) ll += std::log(scale[k]);
    post.loglik = ll;
    return post;
}

double forward_likelihood_unscaled(const Theta& theta, const Trajectory& traj) {
    require_compatible(theta, traj);
    const int S = theta.L2() + 1;
    Vector a = Vector::Zero(S);
    a[0] = 1.0;
    for (int k = 1; k <= traj.length(); ++k) {
        a = (a.transpose() * theta.P[traj.x1[k - 1]]).transpose();
        a.array() *= theta.B.col(traj.signal(k)).array();
    }
    return a.sum();
}

Posteriors e_step(const Theta& theta, const TrajectorySet& data) {
    Posteriors out;
    out.per_trajectory.resize(data.trajectories.size());
    std::vector<std::string> errors(data.trajectories.size());
    parallel_for(data.trajectories.size(), [&](std::size_t t) {
        try {
            out.per_trajectory[t] = forward_backward(theta, data.trajectories[t]);
        } catch (const NumericalError& e) {
            errors[t] = e.what();
        }
    });
    for (std::size_t t = 0; t < errors.size(); ++t)
        if (!errors[t].empty()) throw NumericalError("trajectory " + std::to_string(t) + ": " + errors[t]);
    double ll = 0.0;
    for (const auto& p : out.per_trajectory) ll += p.loglik;
    out.loglik = ll;
    return out;
}

namespace {

bool is_absorbing_row(const Matrix& P, int i) {
    for (Eigen::Index c = 0; c < P.cols(); ++c)
        if (P(i, c) != (c == i ? 1.0 : 0.0)) return false;
    return true;
}

std::string cell_name(const char* m, int j, int i) {
    std::ostringstream os;
    os << m;
    if (j >= 0) os << j;
    os << " row " << i;
    return os.str();
}

} // namespace

MStepResult m_step(const Posteriors& posteriors, const TrajectorySet& data, const Theta& theta_prev) {
    const int n1 = theta_prev.L1() + 1;
    const int S = theta_prev.L2() + 1;
    const int O = theta_prev.M() + 1;
    if (posteriors.per_trajectory.size() != data.trajectories.size())
        throw ValidationError("posteriors do not match the data set");

    std::vector<Matrix> num(n1, Matrix::Zero(S, S));
    std::vector<Vector> den(n1, Vector::Zero(S));
    Matrix b_num = Matrix::Zero(S, O);
    Vector b_den = Vector::Zero(S);

    for (std::size_t t = 0; t < data.trajectories.size(); ++t) {
        const auto& tr = data.trajectories[t];
        const auto& post = posteriors.per_trajectory[t];
        for (int k = 1; k <= tr.length(); ++k) {
            const int j = tr.x1[k - 1];
            num[j] += post.xi[k - 1];
            den[j] += post.phi[k - 1];
            b_num.col(tr.signal(k)) += post.phi[k];
            b_den += post.phi[k];
        }
    }

    MStepResult out{theta_prev, {}};
    out.theta.iteration = theta_prev.iteration + 1;
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < S; ++i) {
            if (is_absorbing_row(theta_prev.P[j], i)) continue;
            if (!(den[j][i] > 0.0)) {
                out.flags.push_back(cell_name("P", j, i) + ": zero denominator, previous value kept");
                continue;
            }
            out.theta.P[j].row(i) = num[j].row(i) / den[j][i];
            const double departures = num[j].row(i).sum() - num[j](i, i);
            if (departures < 1.0)
                out.flags.push_back(cell_name("P", j, i) + ": low information (expected departures " +
                                    std::to_string(departures) + ")");
        }
    }
    for (int i = 0; i < S; ++i) {
        if (!(b_den[i] > 0.0)) {
            out.flags.push_back(cell_name("B", -1, i) + ": zero denominator, previous value kept");
            continue;
        }
        out.theta.B.row(i) = b_num.row(i) / b_den[i];
    }
    return out;
}

namespace {

double q_loglik(const QEstimate& q) {
    double ll = 0.0;
    for (Eigen::Index r = 0; r < q.counts.rows(); ++r)
        for (Eigen::Index c = 0; c < q.counts.cols(); ++c)
            if (q.counts(r, c) > 0.0) ll += q.counts(r, c) * std::log(q.Q(r, c));
    return ll;
}

} // namespace

FitResult fit(const TrajectorySet& data, const Theta& init, const FitOptions& options) {
    FitResult out;
    out.q = estimate_Q(data, init.L1());
    Theta theta = init;
    theta.Q = out.q.Q;
    const double ll_q = q_loglik(out.q);

    std::vector<std::string> last_flags;
    Posteriors post = e_step(theta, data);
    out.loglik_trace.push_back(post.loglik + ll_q);
    for (int r = 0; r < options.max_iter; ++r) {
        auto step = m_step(post, data, theta);
        theta = std::move(step.theta);
        last_flags = std::move(step.flags);
        ++out.iterations;
        post = e_step(theta, data);
        out.loglik_trace.push_back(post.loglik + ll_q);
        const double gain = out.loglik_trace.back() - out.loglik_trace[out.loglik_trace.size() - 2];
        if (gain < options.tol) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t j = 0; j < out.q.undetermined.size(); ++j)
        if (out.q.undetermined[j]) out.flags.push_back("Q row " + std::to_string(j) + ": never visited");
    out.flags.insert(out.flags.end(), last_flags.begin(), last_flags.end());
    out.theta_hat = std::move(theta);
    return out;
}

int free_parameter_count(const Theta& theta) {
    const int n1 = theta.L1() + 1;
    const int S = theta.L2() + 1;
    int count = n1 * (n1 - 1);
    for (const auto& P : theta.P)
        for (int i = 0; i < S; ++i)
            if (!is_absorbing_row(P, i)) count += S - 1;
    count += S * theta.M();
    return count;
}

namespace {

void random_simplex_row(Matrix& m, int row, RandomStream& rng) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(row, c) = rng.exponential();
        sum += m(row, c);
    }
    m.row(row) /= sum;
}

} // namespace

Theta random_theta(const Theta& structure, RandomStream& rng) {
    Theta t = structure;
    t.iteration = 0;
    for (auto& P : t.P)
        for (int i = 0; i < P.rows(); ++i)
            if (!is_absorbing_row(P, i)) random_simplex_row(P, i, rng);
    for (int i = 0; i < t.B.rows(); ++i) random_simplex_row(t.B, i, rng);
    return t;
}

Theta structural_template(int L1, int L2, int M) {
    Theta t;
    t.Q = Matrix::Identity(L1 + 1, L1 + 1);
    Matrix P = Matrix::Constant(L2 + 1, L2 + 1, 1.0 / (L2 + 1));
    P.row(L2).setZero();
    P(L2, L2) = 1.0;
    t.P.assign(L1 + 1, P);
    t.B = Matrix::Constant(L2 + 1, M + 1, 1.0 / (M + 1));
    return t;
}

namespace {

template <class F>
void for_each_entry(const Theta& t, F&& f) {
    for (Eigen::Index r = 0; r < t.Q.rows(); ++r)
        for (Eigen::Index c = 0; c < t.Q.cols(); ++c)
            f("Q(" + std::to_string(r) + "," + std::to_string(c) + ")", t.Q(r, c));
    for (std::size_t j = 0; j < t.P.size(); ++j)
        for (Eigen::Index r = 0; r < t.P[j].rows(); ++r)
            for (Eigen::Index c = 0; c < t.P[j].cols(); ++c)
                f("P" + std::to_string(j) + "(" + std::to_string(r) + "," + std::to_string(c) + ")",
                  t.P[j](r, c));
    for (Eigen::Index r = 0; r < t.B.rows(); ++r)
        for (Eigen::Index c = 0; c < t.B.cols(); ++c)
            f("B(" + std::to_string(r) + "," + std::to_string(c) + ")", t.B(r, c));
}

} // namespace

MultiStartResult multi_start_fit(const TrajectorySet& data, const Theta& structure,
                                 const MultiStartOptions& options) {
    if (options.restarts < 1) throw ValidationError("multi_start_fit needs restarts >= 1");
    MultiStartResult out;
    out.runs.reserve(options.restarts);
    // Initial values come from one stream in restart order, independent of threading.
    RandomStream rng(options.seed, 0xFEEDull);
    std::vector<Theta> inits;
    for (int r = 0; r < options.restarts; ++r) inits.push_back(random_theta(structure, rng));
    for (int r = 0; r < options.restarts; ++r) out.runs.push_back(fit(data, inits[r], options.fit));

    std::size_t best = 0;
    for (std::size_t r = 1; r < out.runs.size(); ++r)
        if (out.runs[r].loglik_trace.back() > out.runs[best].loglik_trace.back()) best = r;
    out.best = out.runs[best];

    std::vector<std::vector<double>> samples;
    std::vector<std::string> names;
    for (const auto& run : out.runs) {
        std::size_t idx = 0;
        for_each_entry(run.theta_hat, [&](const std::string& name, double v) {
            if (samples.size() <= idx) {
                samples.emplace_back();
                names.push_back(name);
            }
            samples[idx++].push_back(v);
        });
    }
    for (std::size_t e = 0; e < samples.size(); ++e) {
        const auto& s = samples[e];
        // Shifted by the first value so identical estimates give that value and sd 0 exactly.
        double shift = 0.0;
        for (double v : s) shift += v - s.front();
        const double mean = s.front() + shift / static_cast<double>(s.size());
        double var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        const double sd = s.size() > 1 ? std::sqrt(var / static_cast<double>(s.size() - 1)) : 0.0;
        out.table.push_back({names[e], mean, sd});
    }

    out.mean_theta = out.runs.front().theta_hat;
    for (std::size_t r = 1; r < out.runs.size(); ++r) {
        out.mean_theta.Q += out.runs[r].theta_hat.Q;
        for (std::size_t j = 0; j < out.mean_theta.P.size(); ++j) out.mean_theta.P[j] += out.runs[r].theta_hat.P[j];
        out.mean_theta.B += out.runs[r].theta_hat.B;
    }
    const double inv = 1.0 / static_cast<double>(out.runs.size());
    // Q does not depend on the starting point.
    out.mean_theta.Q = out.runs.front().theta_hat.Q;
    for (auto& P : out.mean_theta.P) P *= inv;
    out.mean_theta.B *= inv;
    return out;
}

} // namespace cbm
