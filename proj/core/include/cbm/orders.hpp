#pragma once

#include "cbm/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbm {

/// Tolerance for exact algebraic order tests (product differences, minors).
inline constexpr double kOrderTol = 1e-12;
/// A simplex point refutes copositivity only when its quadratic form is below -kCopositiveTol.
inline constexpr double kCopositiveTol = 1e-10;

enum class Verdict { certified_yes, certified_no, undetermined };

const char* to_string(Verdict v);

/// Evidence against an order: a violating 2x2 minor or a simplex point.
struct Witness {
    /// TP2: rows (i, i2) and columns (j, j2) of the negative minor.
    std::vector<int> indices;
    /// Copositivity: the simplex point with a negative quadratic form.
    std::vector<double> point;
    /// Index of the E-matrix (0-based column pair j, j+1) the point refutes.
    int matrix_index = -1;
    /// Value of the violated minor or quadratic form.
    double value = 0.0;
};

struct OrderCertificate {
    Verdict verdict = Verdict::undetermined;
    std::optional<Witness> witness; ///< always present for certified_no
    int resolution = 0;             ///< grid density used by approximate checks (0 = exact)
    std::string note;

    bool yes() const { return verdict == Verdict::certified_yes; }
    bool no() const { return verdict == Verdict::certified_no; }
};

/// p1 <=_r p2: p1(i) p2(j) >= p1(j) p2(i) for all i < j.
/// Works on unnormalised nonnegative vectors too (the order is scale-free).
bool mlr_leq(const Vector& p1, const Vector& p2, double tol = kOrderTol);

/// p1 <=_s p2: every upper-tail sum of p1 is at most that of p2.
bool fsd_leq(const Vector& p1, const Vector& p2, double tol = kOrderTol);

/// All 2x2 minors A(i,j)A(i2,j2) - A(i,j2)A(i2,j) >= -kOrderTol for i<i2, j<j2.
/// A certified_no carries the first violating (i, i2, j, j2) in lexicographic order.
OrderCertificate check_tp2(const Matrix& A);

/// Symmetrised difference matrices of the copositive kernel order.
///
/// Column pairs are 0-based: E[j] compares columns (j, j+1) for j = 0..N-2.
/// With 1-based textbook indexing this is E^{j+1}.
///   e_mn = Pu(m, j) Pv(n, j+1) - Pu(m, j+1) Pv(n, j),   E[j] = (e + e^T) / 2.
std::vector<Matrix> copositive_difference_matrices(const Matrix& Pu, const Matrix& Pv);

/// Tri-state copositivity of a symmetric matrix.
///
/// Exact for 2x2. For larger N: yes when entrywise nonnegative or positive
/// semidefinite, no when a simplex lattice point at `resolution` has
/// pi E pi^T < -kCopositiveTol, undetermined otherwise.
OrderCertificate check_copositive(const Matrix& E, int resolution);

/// Pu <=_c Pv: every difference matrix is copositive.
OrderCertificate copositive_leq(const Matrix& Pu, const Matrix& Pv, int resolution = 50);

struct AssumptionReport {
    OrderCertificate a1;                  ///< every P[j] is TP2
    OrderCertificate a2;                  ///< P[j] <=_c P[j+1] for j < L1
    OrderCertificate a3;                  ///< Q is TP2
    OrderCertificate a4;                  ///< B is TP2
    std::vector<OrderCertificate> a1_by_j;
    std::vector<OrderCertificate> a2_by_j;

    bool all_yes() const { return a1.yes() && a2.yes() && a3.yes() && a4.yes(); }
};

AssumptionReport check_assumptions(const SystemModel& model, int resolution = 50);

} // namespace cbm
