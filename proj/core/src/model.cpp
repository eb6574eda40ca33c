#include "cbm/model.hpp"

#include <cmath>
#include <sstream>

namespace cbm {

std::string Violation::to_string() const {
    std::ostringstream os;
    os << matrix;
    if (row >= 0) os << " row " << row;
    os << ": " << defect;
    return os.str();
}

void validate_stochastic(const Matrix& m, const std::string& name, ValidationReport& out,
                         double tol) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        bool finite = true;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            if (!std::isfinite(v)) {
                finite = false;
                continue;
            }
            if (v < 0.0) {
                std::ostringstream os;
                os << "negative entry " << v << " at column " << c;
                out.push_back({name, static_cast<int>(r), os.str()});
            } else if (v > 1.0) {
                std::ostringstream os;
                os << "entry " << v << " exceeds 1 at column " << c;
                out.push_back({name, static_cast<int>(r), os.str()});
            }
            sum += v;
        }
        if (!finite) {
            out.push_back({name, static_cast<int>(r), "non-finite entry"});
        } else if (std::abs(sum - 1.0) > tol) {
            std::ostringstream os;
            os.precision(15);
            os << "row " << r << " sums to " << sum;
            out.push_back({name, static_cast<int>(r), os.str()});
        }
    }
}

namespace {

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& name,
                 ValidationReport& out) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "dimension " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
        out.push_back({name, -1, os.str()});
    }
}

} // namespace

ValidationReport validate_model(const SystemModel& model) {
    ValidationReport out;
    if (model.L1 < 0 || model.L2 < 0 || model.M < 0) {
        out.push_back({"model", -1, "negative space size"});
        return out;
    }
    const int n1 = model.u1_states();
    const int n2 = model.u2_states();
    check_shape(model.Q, n1, n1, "Q", out);
    validate_stochastic(model.Q, "Q", out);
    if (static_cast<int>(model.P.size()) != n1) {
        std::ostringstream os;
        os << "family has " << model.P.size() << " matrices, expected " << n1;
        out.push_back({"P", -1, os.str()});
    }
    for (std::size_t j = 0; j < model.P.size(); ++j) {
        const std::string name = "P[" + std::to_string(j) + "]";
        check_shape(model.P[j], n2, n2, name, out);
        validate_stochastic(model.P[j], name, out);
    }
    check_shape(model.B, n2, model.signals(), "B", out);
    validate_stochastic(model.B, "B", out);
    return out;
}

void require_valid(const SystemModel& model) {
    const auto report = validate_model(model);
    if (report.empty()) return;
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& v : report) os << "\n  " << v.to_string();
    throw ValidationError(os.str());
}

CostStructure::CostStructure(Vector c_o1, Vector c_o2, double c_s, double c_r1, double c_r2,
                             double gamma)
    : c_o1_(std::move(c_o1)), c_o2_(std::move(c_o2)), c_s_(c_s), c_r1_(c_r1), c_r2_(c_r2),
      gamma_(gamma) {
    validate(false);
}

CostStructure CostStructure::with_gamma(double gamma) const {
    CostStructure out = *this;
    out.gamma_ = gamma;
    out.validate(true);
    return out;
}

void CostStructure::validate(bool allow_zero_gamma) const {
    auto check_vec = [](const Vector& v, const char* name) {
        if (v.size() == 0) throw ValidationError(std::string(name) + " is empty");
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]) || v[i] < 0.0)
                throw ValidationError(std::string(name) + " has a negative or non-finite entry");
            if (i > 0 && v[i] < v[i - 1])
                throw ValidationError(std::string(name) + " must be non-decreasing in the state index");
        }
    };
    check_vec(c_o1_, "c_o1");
    check_vec(c_o2_, "c_o2");
    for (double c : {c_s_, c_r1_, c_r2_})
        if (!std::isfinite(c) || c < 0.0)
            throw ValidationError("set-up and replacement costs must be nonnegative and finite");
    const bool gamma_ok = allow_zero_gamma ? (gamma_ >= 0.0 && gamma_ < 1.0)
                                           : (gamma_ > 0.0 && gamma_ < 1.0);
    if (!gamma_ok) throw ValidationError("discount factor must lie in (0, 1)");
}

double CostStructure::max_stage_cost() const {
    return c_o1_.maxCoeff() + c_o2_.maxCoeff() + c_s_ + c_r1_ + c_r2_;
}

void CostStructure::require_compatible(const SystemModel& model) const {
    if (c_o1_.size() != model.u1_states() || c_o2_.size() != model.u2_states())
        throw ValidationError("operating-cost vectors do not match the model's state spaces");
}

Belief::Belief(Vector pi) : pi_(std::move(pi)) {
    if (pi_.size() == 0) throw ValidationError("belief must be non-empty");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < pi_.size(); ++i) {
        if (!(pi_[i] >= 0.0)) throw ValidationError("belief has a negative entry");
        sum += pi_[i];
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
        std::ostringstream os;
        os.precision(15);
        os << "belief sums to " << sum;
        throw ValidationError(os.str());
    }
}

Belief Belief::reset(int L2) {
    Vector v = Vector::Zero(L2 + 1);
    v[0] = 1.0;
    return Belief(std::move(v));
}

Belief Belief::two_state(double failure_prob) {
    Vector v(2);
    v << 1.0 - failure_prob, failure_prob;
    return Belief(std::move(v));
}

} // namespace cbm
