#include "cbm/orders.hpp"

#include <cmath>
#include <functional>

namespace cbm {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::certified_yes: return "certified-yes";
    case Verdict::certified_no: return "certified-no";
    case Verdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

void require_same_length(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ValidationError("order comparison of vectors with different lengths");
}

OrderCertificate yes(int resolution = 0, std::string note = {}) {
    return {Verdict::certified_yes, std::nullopt, resolution, std::move(note)};
}

OrderCertificate no(Witness w, int resolution = 0, std::string note = {}) {
    return {Verdict::certified_no, std::move(w), resolution, std::move(note)};
}

double quadratic_form(const Matrix& E, const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m)
        for (std::size_t n = 0; n < p.size(); ++n) s += p[m] * E(m, n) * p[n];
    return s;
}

// Visits every composition of `total` into `parts` nonnegative integers.
// The visitor returns false to stop early.
bool for_each_composition(int parts, int total, const std::function<bool(const std::vector<int>&)>& f) {
    std::vector<int> c(parts, 0);
    std::function<bool(int, int)> rec = [&](int pos, int left) -> bool {
        if (pos == parts - 1) {
            c[pos] = left;
            return f(c);
        }
        for (int v = left; v >= 0; --v) {
            c[pos] = v;
            if (!rec(pos + 1, left - v)) return false;
        }
        return true;
    };
    return rec(0, total);
}

} // namespace

bool mlr_leq(const Vector& p1, const Vector& p2, double tol) {
    require_same_length(p1, p2);
    const Eigen::Index n = p1.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (p1[i] * p2[j] - p1[j] * p2[i] < -tol) return false;
    return true;
}

bool fsd_leq(const Vector& p1, const Vector& p2, double tol) {
    require_same_length(p1, p2);
    double t1 = 0.0, t2 = 0.0;
    for (Eigen::Index l = p1.size() - 1; l >= 0; --l) {
        t1 += p1[l];
        t2 += p2[l];
        if (t1 > t2 + tol) return false;
    }
    return true;
}

OrderCertificate check_tp2(const Matrix& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index i2 = i + 1; i2 < A.rows(); ++i2)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                for (Eigen::Index j2 = j + 1; j2 < A.cols(); ++j2) {
                    const double minor = A(i, j) * A(i2, j2) - A(i, j2) * A(i2, j);
                    if (minor < -kOrderTol) {
                        Witness w;
                        w.indices = {static_cast<int>(i), static_cast<int>(i2), static_cast<int>(j),
                                     static_cast<int>(j2)};
                        w.value = minor;
                        return no(std::move(w));
                    }
                }
    return yes();
}

std::vector<Matrix> copositive_difference_matrices(const Matrix& Pu, const Matrix& Pv) {
    if (Pu.rows() != Pu.cols() || Pv.rows() != Pv.cols() || Pu.rows() != Pv.rows())
        throw ValidationError("copositive order needs two square matrices of equal size");
    if (Pu.rows() < 2) throw ValidationError("copositive order needs N >= 2");
    const Eigen::Index N = Pu.rows();
    std::vector<Matrix> out;
    out.reserve(N - 1);
    for (Eigen::Index j = 0; j + 1 < N; ++j) {
        Matrix e(N, N);
        for (Eigen::Index m = 0; m < N; ++m)
            for (Eigen::Index n = 0; n < N; ++n)
                e(m, n) = Pu(m, j) * Pv(n, j + 1) - Pu(m, j + 1) * Pv(n, j);
        out.push_back(0.5 * (e + e.transpose()));
    }
    return out;
}

OrderCertificate check_copositive(const Matrix& E, int resolution) {
    const Eigen::Index N = E.rows();
    if (N == 2) {
        const double a = E(0, 0), b = E(0, 1), c = E(1, 1);
        Witness w;
        if (a < -kOrderTol) {
            w.point = {1.0, 0.0};
        } else if (c < -kOrderTol) {
            w.point = {0.0, 1.0};
        } else if (b + std::sqrt(std::max(a, 0.0) * std::max(c, 0.0)) < -kOrderTol) {
            // Interior minimiser of a(1-u)^2 + 2b u(1-u) + c u^2.
            const double u = (a - b) / (a - 2.0 * b + c);
            w.point = {1.0 - u, u};
        } else {
            return yes(0, "exact 2x2 criterion");
        }
        w.value = quadratic_form(E, w.point);
        return no(std::move(w), 0, "exact 2x2 criterion");
    }

    if ((E.array() >= -kOrderTol).all()) return yes(0, "entrywise nonnegative");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(E, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() >= -kOrderTol) return yes(0, "positive semidefinite");

    std::optional<Witness> found;
    std::vector<double> p(N);
    for_each_composition(static_cast<int>(N), resolution, [&](const std::vector<int>& c) {
        for (Eigen::Index i = 0; i < N; ++i) p[i] = static_cast<double>(c[i]) / resolution;
        const double q = quadratic_form(E, p);
        if (q < -kCopositiveTol) {
            found = Witness{{}, p, -1, q};
            return false;
        }
        return true;
    });
    if (found) return no(std::move(*found), resolution, "simplex lattice refutation");
    return {Verdict::undetermined, std::nullopt, resolution, "no refutation found at this resolution"};
}

OrderCertificate copositive_leq(const Matrix& Pu, const Matrix& Pv, int resolution) {
    const auto Es = copositive_difference_matrices(Pu, Pv);
    bool undetermined = false;
    int used_resolution = 0;
    for (std::size_t j = 0; j < Es.size(); ++j) {
        auto cert = check_copositive(Es[j], resolution);
        used_resolution = std::max(used_resolution, cert.resolution);
        if (cert.no()) {
            cert.witness->matrix_index = static_cast<int>(j);
            return cert;
        }
        if (cert.verdict == Verdict::undetermined) undetermined = true;
    }
    if (undetermined)
        return {Verdict::undetermined, std::nullopt, resolution, "some difference matrix undetermined"};
    return yes(used_resolution);
}

namespace {

OrderCertificate combine(const std::vector<OrderCertificate>& parts) {
    OrderCertificate out = yes();
    for (std::size_t j = 0; j < parts.size(); ++j) {
        const auto& c = parts[j];
        out.resolution = std::max(out.resolution, c.resolution);
        if (c.no()) {
            out = c;
            out.note = "fails at index " + std::to_string(j) + (c.note.empty() ? "" : "; " + c.note);
            return out;
        }
        if (c.verdict == Verdict::undetermined) out.verdict = Verdict::undetermined;
    }
    return out;
}

} // namespace

AssumptionReport check_assumptions(const SystemModel& model, int resolution) {
    AssumptionReport r;
    for (const auto& P : model.P) r.a1_by_j.push_back(check_tp2(P));
    for (std::size_t j = 0; j + 1 < model.P.size(); ++j)
        r.a2_by_j.push_back(copositive_leq(model.P[j], model.P[j + 1], resolution));
    r.a1 = combine(r.a1_by_j);
    r.a2 = combine(r.a2_by_j);
    r.a3 = check_tp2(model.Q);
    r.a4 = check_tp2(model.B);
    return r;
}

} // namespace cbm
