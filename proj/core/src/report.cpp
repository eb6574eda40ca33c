#include "cbm/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cbm {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

void belief_header(std::ostringstream& os, int L2) {
    os << "j";
    for (int i = 1; i <= L2; ++i) os << ",pi" << i;
}

void belief_cells(std::ostringstream& os, const Vector& pi) {
    for (Eigen::Index i = 1; i < pi.size(); ++i) os << ',' << num(pi[i]);
}

char glyph(Action a) {
    switch (a) {
    case Action::none: return '.';
    case Action::replace_u1: return '1';
    case Action::replace_u2: return '2';
    case Action::replace_both: return '#';
    }
    return '?';
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

nlohmann::json violations_json(const std::vector<StructureViolation>& vs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : vs) out.push_back({{"property", v.property}, {"j", v.j}, {"pi1", v.pi1}, {"detail", v.detail}});
    return out;
}

nlohmann::json certificate_json(const OrderCertificate& c) {
    nlohmann::json out{{"verdict", to_string(c.verdict)}, {"resolution", c.resolution}, {"note", c.note}};
    if (c.witness) {
        out["witness"] = {{"indices", c.witness->indices},
                          {"point", c.witness->point},
                          {"matrix_index", c.witness->matrix_index},
                          {"value", c.witness->value}};
    }
    return out;
}

} // namespace

std::string format_value_csv(const ValueFunction& V, const BeliefGrid& grid) {
    std::ostringstream os;
    belief_header(os, grid.L2());
    os << ",value\n";
    for (Eigen::Index j = 0; j < V.values.cols(); ++j)
        for (int g = 0; g < grid.size(); ++g) {
            os << j;
            belief_cells(os, grid.point(g));
            os << ',' << num(V.at(g, static_cast<int>(j))) << '\n';
        }
    return os.str();
}

std::string format_policy_csv(const PolicyMap& policy, const BeliefGrid& grid) {
    std::ostringstream os;
    belief_header(os, grid.L2());
    os << ",action\n";
    for (int j = 0; j < policy.u1_states; ++j)
        for (int g = 0; g < grid.size(); ++g) {
            os << j;
            belief_cells(os, grid.point(g));
            os << ',' << action_code(policy.at(g, j)) << '\n';
        }
    return os.str();
}

std::string format_policy_heatmap(const PolicyMap& policy, const BeliefGrid& grid, int bins) {
    bins = std::max(1, bins);
    const int L2 = grid.L2();
    // For each bin pick the grid point whose failure probability is nearest the bin centre;
    // among ties on larger simplices the first point in grid order is used.
    std::vector<int> pick(bins, 0);
    for (int b = 0; b < bins; ++b) {
        const double centre = (b + 0.5) / bins;
        double best = std::numeric_limits<double>::infinity();
        for (int g = 0; g < grid.size(); ++g) {
            const double d = std::abs(grid.point(g)[L2] - centre);
            if (d < best - 1e-15) {
                best = d;
                pick[b] = g;
            }
        }
    }
    std::ostringstream os;
    os << "policy map: rows j, columns pi(" << L2 << ") from 0 to 1 in " << bins << " bins\n";
    os << "legend: . do nothing, 1 replace U1, 2 replace U2, # replace both\n";
    for (int j = policy.u1_states - 1; j >= 0; --j) {
        char label[16];
        std::snprintf(label, sizeof label, "j=%-3d|", j);
        os << label;
        for (int b = 0; b < bins; ++b) os << glyph(policy.at(pick[b], j));
        os << "|\n";
    }
    os << "      0" << std::string(std::max(0, bins - 1), ' ') << "1\n";
    return os.str();
}

std::string format_loglik_csv(const std::vector<double>& trace) {
    std::ostringstream os;
    os << "iter,loglik\n";
    for (std::size_t i = 0; i < trace.size(); ++i) os << i << ',' << num(trace[i]) << '\n';
    return os.str();
}

std::string format_multistart_trace_csv(const MultiStartResult& result) {
    std::ostringstream os;
    os << "run,iter,loglik\n";
    for (std::size_t r = 0; r < result.runs.size(); ++r)
        for (std::size_t i = 0; i < result.runs[r].loglik_trace.size(); ++i)
            os << r << ',' << i << ',' << num(result.runs[r].loglik_trace[i]) << '\n';
    return os.str();
}

std::string format_estimate_table_csv(const std::vector<ParameterStat>& table) {
    std::ostringstream os;
    os << "parameter,mean,sd\n";
    for (const auto& s : table) os << s.name << ',' << num(s.mean) << ',' << num(s.sd) << '\n';
    return os.str();
}

std::string structure_to_json(const StructureReport& policy, const ValueShapeReport& value,
                              const PreferenceReport* preference) {
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& b : policy.boundaries) {
        nlohmann::json by_j = nlohmann::json::array();
        for (const auto& v : b.by_j) by_j.push_back(optional_json(v));
        bounds.push_back({{"from", action_code(b.from)}, {"to", action_code(b.to)}, {"pi1_by_j", by_j}});
    }
    nlohmann::json out{
        {"resolution", policy.resolution},
        {"summary", policy.summary()},
        {"policy",
         {{"u2_vs_both_by_j", policy.u2_vs_both_by_j},
          {"l_star", policy.l_star ? nlohmann::json(*policy.l_star) : nlohmann::json()},
          {"boundaries_non_increasing", policy.boundaries_non_increasing},
          {"u1_both_separated", policy.u1_both_separated},
          {"both_persists_upward", policy.both_persists_upward},
          {"u2_persists_upward", policy.u2_persists_upward},
          {"boundaries", bounds},
          {"violations", violations_json(policy.violations)}}},
        {"value",
         {{"tol", value.tol},
          {"monotone_in_belief", value.monotone_in_belief},
          {"monotone_in_j", value.monotone_in_j},
          {"concave_in_belief", value.concave_in_belief},
          {"worst_belief_drop", value.worst_belief_drop},
          {"worst_j_drop", value.worst_j_drop},
          {"worst_concavity_defect", value.worst_concavity_defect},
          {"violations", violations_json(value.violations)}}}};
    if (preference) {
        nlohmann::json pb = nlohmann::json::array();
        for (const auto& b : preference->boundaries) {
            nlohmann::json by_j = nlohmann::json::array();
            for (const auto& v : b.by_j) by_j.push_back(optional_json(v));
            pb.push_back({{"from", action_code(b.from)},
                          {"to", action_code(b.to)},
                          {"pi1_by_j", by_j},
                          {"single_crossing", b.single_crossing},
                          {"non_increasing", b.non_increasing}});
        }
        out["preference"] = {{"boundaries", pb},
                             {"u2_minus_both", preference->u2_minus_both},
                             {"u2_minus_both_spread", preference->u2_minus_both_spread},
                             {"u2_vs_both_pi_independent", preference->u2_vs_both_pi_independent},
                             {"u2_vs_both_monotone_in_j", preference->u2_vs_both_monotone_in_j},
                             {"violations", violations_json(preference->violations)}};
    }
    return out.dump(2) + "\n";
}

std::string assumptions_to_json(const AssumptionReport& r) {
    nlohmann::json a1 = nlohmann::json::array(), a2 = nlohmann::json::array();
    for (const auto& c : r.a1_by_j) a1.push_back(certificate_json(c));
    for (const auto& c : r.a2_by_j) a2.push_back(certificate_json(c));
    nlohmann::json out{{"A1", certificate_json(r.a1)}, {"A2", certificate_json(r.a2)},
                       {"A3", certificate_json(r.a3)}, {"A4", certificate_json(r.a4)},
                       {"A1_by_j", a1},           {"A2_by_j", a2},
                       {"all_certified", r.all_yes()}};
    return out.dump(2) + "\n";
}

std::string gap_csv_header() { return "instance,V0,V1,V2,V3,gap1,gap2,gap3,xi1,xi2,upsilon2\n"; }

std::string format_gap_row(const GapRecord& r) {
    std::ostringstream os;
    os << r.instance << ',' << num(r.V0) << ',' << num(r.V1) << ',' << num(r.V2) << ',' << num(r.V3) << ','
       << num(r.gap1) << ',' << num(r.gap2) << ',' << num(r.gap3) << ',' << num(r.xi1) << ',' << num(r.xi2) << ','
       << r.upsilon2 << '\n';
    return os.str();
}

std::string format_gap_csv(const std::vector<GapRecord>& records) {
    std::string out = gap_csv_header();
    for (const auto& r : records) out += format_gap_row(r);
    return out;
}

namespace {

GapStats stats_of(const std::vector<double>& xs) {
    GapStats s;
    if (xs.empty()) return s;
    s.count = static_cast<int>(xs.size());
    s.min = *std::min_element(xs.begin(), xs.end());
    s.max = *std::max_element(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.count;
    return s;
}

GapSummaryRow summary_row(std::string name, int choice, const std::vector<const GapRecord*>& rs) {
    GapSummaryRow row{std::move(name), choice, {}};
    std::vector<double> g[3];
    for (const auto* r : rs) {
        g[0].push_back(r->gap1);
        g[1].push_back(r->gap2);
        g[2].push_back(r->gap3);
    }
    for (int p = 0; p < 3; ++p) row.policy[p] = stats_of(g[p]);
    return row;
}

} // namespace

std::vector<GapSummaryRow> summarize_gaps(const std::vector<GapRecord>& records) {
    std::vector<FactorChoices> choices;
    choices.reserve(records.size());
    for (const auto& r : records) choices.push_back(choices_from_id(r.instance));
    std::vector<GapSummaryRow> rows;
    for (int f = 0; f < kFactorCount; ++f)
        for (int c = 1; c <= 2; ++c) {
            std::vector<const GapRecord*> sel;
            for (std::size_t i = 0; i < records.size(); ++i)
                if (choices[i][f] == c) sel.push_back(&records[i]);
            rows.push_back(summary_row(factor_name(static_cast<Factor>(f)), c, sel));
        }
    std::vector<const GapRecord*> all;
    for (const auto& r : records) all.push_back(&r);
    rows.push_back(summary_row("Total", 0, all));
    return rows;
}

std::string format_gap_summary_csv(const std::vector<GapSummaryRow>& rows) {
    std::ostringstream os;
    os << "factor,choice,min1,mean1,max1,min2,mean2,max2,min3,mean3,max3\n";
    for (const auto& r : rows) {
        os << '"' << r.factor << "\"," << (r.choice ? std::to_string(r.choice) : std::string());
        for (const auto& s : r.policy) os << ',' << short_num(s.min) << ',' << short_num(s.mean) << ',' << short_num(s.max);
        os << '\n';
    }
    return os.str();
}

} // namespace cbm
