#pragma once

// Internal JSON conversions shared by the core sources (not installed API).

#include "cbm/model.hpp"

#include <json.hpp>

namespace cbm {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.empty()) throw ValidationError(std::string(name) + " must be a non-empty array of rows");
    const auto rows = j.size();
    const auto cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ValidationError(std::string(name) + " has ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Vector vector_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array()) throw ValidationError(std::string(name) + " must be an array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

inline nlohmann::json model_to_json(const SystemModel& m) {
    nlohmann::json j;
    j["L1"] = m.L1;
    j["L2"] = m.L2;
    j["M"] = m.M;
    j["Q"] = matrix_to_json(m.Q);
    j["P"] = nlohmann::json::array();
    for (const auto& p : m.P) j["P"].push_back(matrix_to_json(p));
    j["B"] = matrix_to_json(m.B);
    return j;
}

inline SystemModel model_from_json(const nlohmann::json& j) {
    SystemModel m;
    m.L1 = j.at("L1").get<int>();
    m.L2 = j.at("L2").get<int>();
    m.M = j.at("M").get<int>();
    m.Q = matrix_from_json(j.at("Q"), "Q");
    for (const auto& p : j.at("P")) m.P.push_back(matrix_from_json(p, "P"));
    m.B = matrix_from_json(j.at("B"), "B");
    return m;
}

inline nlohmann::json costs_to_json(const CostStructure& c) {
    return {{"c_o1", vector_to_json(c.c_o1())}, {"c_o2", vector_to_json(c.c_o2())},
            {"c_s", c.c_s()},   {"c_r1", c.c_r1()},
            {"c_r2", c.c_r2()}, {"gamma", c.gamma()}};
}

inline CostStructure costs_from_json(const nlohmann::json& j) {
    return CostStructure(vector_from_json(j.at("c_o1"), "c_o1"), vector_from_json(j.at("c_o2"), "c_o2"),
                         j.at("c_s").get<double>(), j.at("c_r1").get<double>(),
                         j.at("c_r2").get<double>(), j.at("gamma").get<double>());
}

} // namespace cbm
