#pragma once

#include "cbm/model.hpp"
#include "cbm/rng.hpp"

#include <filesystem>
#include <string>

#ifndef CBM_TEST_DATA_DIR
#define CBM_TEST_DATA_DIR "data"
#endif

namespace cbm::test {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(CBM_TEST_DATA_DIR) / name; }

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

/// Two-component example: three U1 states, two U2 states, binary signal.
inline SystemModel example_model() {
    SystemModel m;
    m.L1 = 2;
    m.L2 = 1;
    m.M = 1;
    m.Q = mat({{0.8, 0.2, 0.0}, {0.0, 0.7, 0.3}, {0.0, 0.0, 1.0}});
    m.P = {mat({{0.8, 0.2}, {0.0, 1.0}}), mat({{0.7, 0.3}, {0.0, 1.0}}), mat({{0.5, 0.5}, {0.0, 1.0}})};
    m.B = mat({{0.8, 0.2}, {0.2, 0.8}});
    return m;
}

/// Costs as listed with the example: c_r1 = 30, c_r2 = 100.
inline CostStructure example_costs(double gamma = 0.95) {
    return CostStructure(vec({10, 20, 30}), vec({5, 40}), 10, 30, 100, gamma);
}

/// Costs with the two replacement costs exchanged (c_r1 = 100, c_r2 = 30).
inline CostStructure example_costs_swapped(double gamma = 0.95) {
    return CostStructure(vec({10, 20, 30}), vec({5, 40}), 10, 100, 30, gamma);
}

/// Row-stochastic matrix with normalised-exponential rows.
inline Matrix random_stochastic(int rows, int cols, RandomStream& rng) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) s += (m(r, c) = rng.exponential());
        m.row(r) /= s;
    }
    return m;
}

inline Vector random_simplex(int n, RandomStream& rng) {
    Vector v(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (v[i] = rng.exponential());
    return v / s;
}

/// Random model with absorbing U1 and U2 failure rows and upper-triangular kernels.
inline SystemModel random_degradation_model(int L1, int L2, int M, RandomStream& rng) {
    SystemModel m;
    m.L1 = L1;
    m.L2 = L2;
    m.M = M;
    m.Q = Matrix::Zero(L1 + 1, L1 + 1);
    for (int j = 0; j <= L1; ++j) {
        double s = 0.0;
        for (int k = j; k <= L1; ++k) s += (m.Q(j, k) = rng.exponential());
        m.Q.row(j) /= s;
    }
    for (int j = 0; j <= L1; ++j) {
        Matrix P = Matrix::Zero(L2 + 1, L2 + 1);
        for (int i = 0; i <= L2; ++i) {
            double s = 0.0;
            for (int k = i; k <= L2; ++k) s += (P(i, k) = rng.exponential());
            P.row(i) /= s;
        }
        m.P.push_back(P);
    }
    m.B = random_stochastic(L2 + 1, M + 1, rng);
    return m;
}

} // namespace cbm::test
