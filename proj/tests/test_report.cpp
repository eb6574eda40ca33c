#include "support.hpp"

#include "cbm/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <sstream>

using namespace cbm;
using namespace cbm::test;

namespace {

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

GapRecord record(const std::string& id, double g1, double g2, double g3) {
    GapRecord r;
    r.instance = id;
    r.V0 = 100;
    r.gap1 = g1;
    r.gap2 = g2;
    r.gap3 = g3;
    return r;
}

} // namespace

TEST_SUITE("report") {

TEST_CASE("value and policy CSV") {
    const BeliefGrid g(1, 0.5);
    ValueFunction V{mat({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})};
    const auto csv = format_value_csv(V, g);
    CHECK(csv.rfind("j,pi1,value\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 9);
    CHECK(csv.find("\n0,0.5,4\n") != std::string::npos);
    CHECK(csv.find("\n2,1,9\n") != std::string::npos);

    PolicyMap p;
    p.u1_states = 3;
    p.actions.assign(9, Action::none);
    p.at(2, 2) = Action::replace_both;
    const auto pc = format_policy_csv(p, g);
    CHECK(pc.rfind("j,pi1,action\n", 0) == 0);
    CHECK(pc.find("\n2,1,12\n") != std::string::npos);
}

TEST_CASE("heatmap rows and glyphs") {
    const BeliefGrid g(1, 0.1);
    PolicyMap p;
    p.u1_states = 2;
    p.actions.assign(static_cast<std::size_t>(g.size()) * 2, Action::none);
    for (int i = 0; i < g.size(); ++i) {
        p.at(i, 1) = g.point(i)[1] > 0.5 ? Action::replace_both : Action::replace_u1;
        if (g.point(i)[1] > 0.75) p.at(i, 0) = Action::replace_u2;
    }
    const auto h = format_policy_heatmap(p, g, 10);
    std::istringstream is(h);
    std::string line, j1, j0;
    while (std::getline(is, line)) {
        if (line.rfind("j=1", 0) == 0) j1 = line;
        if (line.rfind("j=0", 0) == 0) j0 = line;
    }
    CHECK(h.find("j=1") < h.find("j=0"));
    CHECK(j1.find("111111####") != std::string::npos);
    CHECK(j0.find("........22") != std::string::npos);
}

TEST_CASE("log-likelihood and estimate tables") {
    CHECK(format_loglik_csv({-3.5, -2.25}) == "iter,loglik\n0,-3.5\n1,-2.25\n");
    CHECK(format_estimate_table_csv({{"B(0,0)", 0.75, 0.5}}) == "parameter,mean,sd\nB(0,0),0.75,0.5\n");
}

TEST_CASE("gap CSV and summary") {
    std::vector<GapRecord> rs{record("c111111", 1, 2, 3), record("c211111", 3, 4, 9)};
    const auto csv = format_gap_csv(rs);
    CHECK(csv.rfind(gap_csv_header(), 0) == 0);
    CHECK(count_lines(csv) == 3);

    const auto rows = summarize_gaps(rs);
    REQUIRE(rows.size() == 13);
    CHECK(rows[0].factor == "Operating cost");
    CHECK(rows[0].choice == 1);
    CHECK(rows[0].policy[0].count == 1);
    CHECK(rows[1].policy[2].mean == 9);
    CHECK(rows[2].policy[0].count == 2); // both records use choice 1 of the second factor
    CHECK(rows[3].policy[0].count == 0);
    const auto& total = rows.back();
    CHECK(total.factor == "Total");
    CHECK(total.policy[0].min == 1);
    CHECK(total.policy[0].max == 3);
    CHECK(total.policy[2].mean == 6);
    const auto sc = format_gap_summary_csv(rows);
    CHECK(sc.find("\"Total\",,1.000000,2.000000,3.000000") != std::string::npos);
}

TEST_CASE("structure JSON parses and carries the summary") {
    const BeliefGrid g(1, 0.1);
    GridSolver s(example_model(), example_costs_swapped(), g);
    const auto r = s.solve(s.full_mask());
    const auto pol = policy_structure_report(r.policy, g);
    const auto shape = value_shape_report(r.V, g);
    const auto pref = preference_report(s, r.V);
    const auto j = nlohmann::json::parse(structure_to_json(pol, shape, &pref));
    CHECK(j.at("summary") == pol.summary());
    CHECK(j.at("policy").at("boundaries").size() == 4);
    CHECK(j.at("value").at("monotone_in_belief") == true);
    CHECK(j.at("preference").at("u2_minus_both").size() == 3);
    CHECK_FALSE(nlohmann::json::parse(structure_to_json(pol, shape)).contains("preference"));
}

TEST_CASE("assumption JSON") {
    const auto j = nlohmann::json::parse(assumptions_to_json(check_assumptions(example_model())));
    CHECK(j.at("all_certified") == true);
    CHECK(j.at("A2_by_j").size() == 2);
    CHECK(j.at("A4").at("verdict") == "certified-yes");
}

}
