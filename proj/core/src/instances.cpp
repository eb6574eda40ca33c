#include "cbm/instances.hpp"
#include "cbm/errors.hpp"

namespace cbm {

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> data) {
    Matrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : data) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

Vector vec(std::initializer_list<double> data) {
    Vector v(static_cast<Eigen::Index>(data.size()));
    Eigen::Index i = 0;
    for (double x : data) v[i++] = x;
    return v;
}

Matrix u1_kernel(int choice) {
    if (choice == 1) {
        return rows({{0.8, 0.04, 0.04, 0.04, 0.04, 0.04},
                     {0.0, 0.8, 0.05, 0.05, 0.05, 0.05},
                     {0.0, 0.0, 0.8, 1.0 / 15, 1.0 / 15, 1.0 / 15},
                     {0.0, 0.0, 0.0, 0.8, 0.1, 0.1},
                     {0.0, 0.0, 0.0, 0.0, 0.9, 0.1},
                     {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}});
    }
    return rows({{0.6, 0.08, 0.08, 0.08, 0.08, 0.08},
                 {0.0, 0.6, 0.1, 0.1, 0.1, 0.1},
                 {0.0, 0.0, 0.6, 2.0 / 15, 2.0 / 15, 2.0 / 15},
                 {0.0, 0.0, 0.0, 0.6, 0.2, 0.2},
                 {0.0, 0.0, 0.0, 0.0, 0.6, 0.4},
                 {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}});
}

std::vector<Matrix> u2_kernels(int choice) {
    const double low = choice == 1 ? 0.1 : 0.3;
    const double high = choice == 1 ? 0.2 : 0.4;
    std::vector<Matrix> P;
    for (int j = 0; j < 6; ++j) {
        const double p = j < 3 ? low : high;
        P.push_back(rows({{1.0 - p, p}, {0.0, 1.0}}));
    }
    return P;
}

} // namespace

const char* factor_name(Factor f) {
    switch (f) {
    case Factor::operating_cost: return "Operating cost";
    case Factor::replacement_u1: return "Replacement cost U1";
    case Factor::replacement_u2: return "Replacement cost U2";
    case Factor::observation: return "Observation matrix of U2";
    case Factor::transition_u1: return "Transition matrix of U1";
    case Factor::transition_u2: return "Transition matrix of U2";
    }
    return "?";
}

void validate_choices(const FactorChoices& choices) {
    for (int i = 0; i < kFactorCount; ++i)
        if (choices[i] != 1 && choices[i] != 2)
            throw ValidationError(std::string("factor '") + factor_name(static_cast<Factor>(i)) +
                                  "' has choice " + std::to_string(choices[i]) + ", expected 1 or 2");
}

std::string instance_id(const FactorChoices& choices) {
    validate_choices(choices);
    std::string id = "c";
    for (int c : choices) id += static_cast<char>('0' + c);
    return id;
}

FactorChoices choices_from_id(const std::string& id) {
    if (id.size() != kFactorCount + 1 || id[0] != 'c') throw ValidationError("malformed instance id '" + id + "'");
    FactorChoices out{};
    for (int i = 0; i < kFactorCount; ++i) out[i] = id[i + 1] - '0';
    validate_choices(out);
    return out;
}

Instance make_instance(const FactorChoices& choices, double setup_cost, double gamma) {
    validate_choices(choices);
    const auto pick = [&](Factor f) { return choices[static_cast<int>(f)]; };

    SystemModel m;
    m.L1 = 5;
    m.L2 = 1;
    m.M = 1;
    m.Q = u1_kernel(pick(Factor::transition_u1));
    m.P = u2_kernels(pick(Factor::transition_u2));
    m.B = pick(Factor::observation) == 1 ? rows({{0.8, 0.2}, {0.2, 0.8}}) : rows({{0.7, 0.3}, {0.3, 0.7}});
    require_valid(m);

    const bool op1 = pick(Factor::operating_cost) == 1;
    const Vector c_o1 = op1 ? vec({1, 1.5, 2, 2.5, 3, 3.5}) : vec({1, 2, 3, 4, 5, 6});
    const Vector c_o2 = op1 ? vec({1, 10}) : vec({1, 8});
    const double c_r1 = pick(Factor::replacement_u1) == 1 ? 15.0 : 8.0;
    const double c_r2 = pick(Factor::replacement_u2) == 1 ? 8.0 : 6.0;

    return Instance{instance_id(choices), choices, std::move(m),
                    CostStructure(c_o1, c_o2, setup_cost, c_r1, c_r2, gamma)};
}

std::vector<FactorChoices> all_factor_choices() {
    std::vector<FactorChoices> out;
    for (int mask = 0; mask < (1 << kFactorCount); ++mask) {
        FactorChoices c{};
        for (int i = 0; i < kFactorCount; ++i) c[i] = ((mask >> (kFactorCount - 1 - i)) & 1) + 1;
        out.push_back(c);
    }
    return out;
}

Instance base_instance(double setup_cost, double gamma) { return make_instance({1, 1, 1, 1, 1, 1}, setup_cost, gamma); }

SystemModel independent_variant(const SystemModel& model) {
    SystemModel out = model;
    for (auto& p : out.P) p = model.P[0];
    return out;
}

} // namespace cbm
