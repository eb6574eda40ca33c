#include "support.hpp"

#include "cbm/instances.hpp"
#include "cbm/structure.hpp"

#include <doctest.h>

#include <cmath>

using namespace cbm;
using namespace cbm::test;

namespace {

PolicyMap constant_policy(const BeliefGrid& g, int n1, Action below, Action at_failure) {
    PolicyMap p;
    p.u1_states = n1;
    p.actions.resize(static_cast<std::size_t>(g.size()) * n1);
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < n1; ++j) p.at(i, j) = j == n1 - 1 ? at_failure : below;
    return p;
}

} // namespace

TEST_SUITE("structure") {

TEST_CASE("do-nothing policy has no boundaries") {
    const BeliefGrid g(1, 0.1);
    const auto p = constant_policy(g, 3, Action::none, Action::none);
    const auto r = policy_structure_report(p, g);
    for (const auto& b : r.boundaries)
        for (const auto& x : b.by_j) CHECK_FALSE(x.has_value());
    CHECK(r.clean());
    CHECK(r.summary() == "clean at resolution 0.1");
}

TEST_CASE("threshold policy boundaries") {
    const BeliefGrid g(1, 0.1);
    auto p = constant_policy(g, 3, Action::none, Action::replace_u1);
    // Joint replacement from 0.6 at j=0, 0.3 at j=1 and 0.2 at j=2.
    for (int i = 0; i < g.size(); ++i) {
        if (g.point(i)[1] >= 0.6 - 1e-12) p.at(i, 0) = Action::replace_both;
        if (g.point(i)[1] >= 0.3 - 1e-12) p.at(i, 1) = Action::replace_both;
        if (g.point(i)[1] >= 0.2 - 1e-12) p.at(i, 2) = Action::replace_both;
    }
    const auto r = policy_structure_report(p, g);
    const auto& b = r.boundary(Action::none, Action::replace_both);
    REQUIRE(b.by_j[0].has_value());
    CHECK(*b.by_j[0] == doctest::Approx(0.6));
    CHECK(*b.by_j[1] == doctest::Approx(0.3));
    CHECK(b.non_increasing);
    CHECK(*r.boundary(Action::replace_u1, Action::replace_both).by_j[2] == doctest::Approx(0.2));
    CHECK(r.u1_both_separated);
    CHECK(r.clean());
}

TEST_CASE("rising boundary is reported") {
    const BeliefGrid g(1, 0.1);
    auto p = constant_policy(g, 3, Action::none, Action::replace_u1);
    for (int i = 0; i < g.size(); ++i) {
        if (g.point(i)[1] >= 0.3 - 1e-12) p.at(i, 0) = Action::replace_both;
        if (g.point(i)[1] >= 0.7 - 1e-12) p.at(i, 1) = Action::replace_both;
    }
    const auto r = policy_structure_report(p, g);
    CHECK_FALSE(r.boundary(Action::none, Action::replace_both).non_increasing);
    CHECK_FALSE(r.boundaries_non_increasing);
    CHECK_FALSE(r.clean());
}

TEST_CASE("interleaved replace-U1 and replace-both regions are reported") {
    const BeliefGrid g(1, 0.1);
    auto p = constant_policy(g, 2, Action::none, Action::replace_u1);
    for (int i = 0; i < g.size(); ++i)
        if (i % 2 == 1) p.at(i, 1) = Action::replace_both;
    const auto r = policy_structure_report(p, g);
    CHECK_FALSE(r.u1_both_separated);
}

TEST_CASE("three-state belief grids are rejected") {
    const BeliefGrid g(2, 0.5);
    CHECK_THROWS_AS(policy_structure_report(constant_policy(g, 2, Action::none, Action::replace_u1), g),
                    ValidationError);
}

TEST_CASE("value shape on synthetic functions") {
    const BeliefGrid g(1, 0.05);
    ValueFunction good{Matrix(g.size(), 2)};
    ValueFunction bumpy{Matrix(g.size(), 2)};
    for (int i = 0; i < g.size(); ++i) {
        const double u = g.point(i)[1];
        for (int j = 0; j < 2; ++j) {
            good.values(i, j) = std::sqrt(u + 0.1) + j;
            bumpy.values(i, j) = u * u + j; // convex
        }
    }
    CHECK(value_shape_report(good, g).clean());
    const auto br = value_shape_report(bumpy, g);
    CHECK(br.monotone_in_belief);
    CHECK_FALSE(br.concave_in_belief);
    CHECK(br.worst_concavity_defect > 1e-4);

    ValueFunction swapped = good;
    swapped.values.col(0).swap(swapped.values.col(1));
    CHECK_FALSE(value_shape_report(swapped, g).monotone_in_j);
}

TEST_CASE("example instance: value shape and operator-level structure") {
    const BeliefGrid g(1, 0.01);
    GridSolver s(example_model(), example_costs_swapped(), g);
    const auto r = s.solve(s.full_mask());
    CHECK(value_shape_report(r.V, g).clean());
    const auto pol = policy_structure_report(r.policy, g);
    CHECK(pol.u2_vs_both_by_j);
    CHECK(pol.u1_both_separated);
    CHECK(pol.boundary(Action::none, Action::replace_both).non_increasing);
    const auto pref = preference_report(s, r.V);
    CHECK(pref.u2_vs_both_pi_independent);
    CHECK(pref.u2_vs_both_monotone_in_j);
    CHECK(pref.u2_minus_both_spread < 1e-9);
    CHECK(pref.boundary(Action::none, Action::replace_both).non_increasing);
    CHECK(pref.boundary(Action::replace_u1, Action::replace_both).non_increasing);
}

TEST_CASE("base benchmark instance: joint replacement earlier in the worse U1 state") {
    const auto inst = base_instance();
    const BeliefGrid g(1, 0.01);
    const auto r = value_iteration(inst.model, inst.costs, g);
    auto first_joint = [&](int j) -> std::optional<double> {
        for (int i = 0; i < g.size(); ++i)
            if (r.policy.at(i, j) == Action::replace_both) return g.point(i)[1];
        return std::nullopt;
    };
    REQUIRE(inst.model.L1 >= 4);
    const auto j3 = first_joint(3), j4 = first_joint(4);
    REQUIRE(j4.has_value());
    if (j3) CHECK(*j4 < *j3);
}

}
