#include "lemmas.hpp"
#include "support.hpp"

#include "cbm/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace cbm;
using namespace cbm::test;

namespace {

const Vector e0 = vec({1.0, 0.0});
const Vector e1 = vec({0.0, 1.0});

double max_one_period_cost(const CostStructure& c) {
    return c.c_o1().maxCoeff() + c.c_o2().maxCoeff() + c.c_s() + c.c_r1() + c.c_r2();
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("stage cost") {
    const auto c = example_costs();
    CHECK(stage_cost(c, e0, 0) == doctest::Approx(15.0));
    CHECK(stage_cost(c, e1, 2) == doctest::Approx(70.0));
    CHECK(stage_cost(c, vec({0.5, 0.5}), 1) == doctest::Approx(42.5));
    const CostStructure zero(Vector::Zero(3), Vector::Zero(2), 0, 0, 0, 0.9);
    CHECK(stage_cost(zero, vec({0.3, 0.7}), 1) == 0.0);
}

TEST_CASE("observation kernel") {
    const auto K = obs_kernel(example_model(), e0, 0);
    CHECK(K(0, 0) == doctest::Approx(0.544));
    CHECK(K(0, 1) == doctest::Approx(0.256));
    CHECK(K(1, 0) == doctest::Approx(0.136));
    CHECK(K(1, 1) == doctest::Approx(0.064));
    CHECK(K.row(2).norm() == 0.0);

    auto m = example_model();
    m.Q = Matrix::Identity(3, 3);
    const auto Ki = obs_kernel(m, vec({0.4, 0.6}), 1);
    CHECK(Ki.row(0).sum() == 0.0);
    CHECK(Ki.row(2).sum() == 0.0);

    RandomStream rng(50, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto rm = random_degradation_model(1 + rep % 3, 1 + rep % 2, 1 + rep % 4, rng);
        const Vector pi = random_simplex(rm.L2 + 1, rng);
        CHECK(std::abs(obs_kernel(rm, pi, rep % (rm.L1 + 1)).sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("belief update") {
    const auto m = example_model();
    const Vector t0 = belief_update(m, e0, 0, 0);
    CHECK(t0[0] == doctest::Approx(16.0 / 17.0));
    CHECK(t0[1] == doctest::Approx(1.0 / 17.0));
    const Vector t1 = belief_update(m, e0, 0, 1);
    CHECK(t1[0] == doctest::Approx(0.5));
    CHECK(t1[1] == doctest::Approx(0.5));

    auto perfect = m;
    perfect.B = Matrix::Identity(2, 2);
    CHECK(belief_update(perfect, vec({0.3, 0.7}), 1, 1) == e1);
    // The absorbing failure state cannot emit signal 0 under perfect observation.
    CHECK_THROWS_AS(belief_update(perfect, e1, 0, 0), ValidationError);

    RandomStream rng(51, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto rm = random_degradation_model(2, 2, 2, rng);
        const Vector pi = random_simplex(3, rng);
        const Vector t = belief_update(rm, pi, rep % 3, rep % 3);
        CHECK(std::abs(t.sum() - 1.0) < 1e-12);
        CHECK(t.minCoeff() >= 0.0);
    }
}

TEST_CASE("backup from zero value") {
    const auto m = example_model();
    const auto c = example_costs();
    const BeliefGrid g(1, 0.1);
    const ValueFunction V{Matrix::Zero(g.size(), 3)};
    const auto b = bellman_backup(m, c, g, V, e0, 0);
    CHECK(b.gamma[action_slot(Action::replace_both)] == doctest::Approx(155.0));
    CHECK(b.value == doctest::Approx(15.0));
    CHECK(b.action == Action::none);

    const auto f = bellman_backup(m, c, g, V, e0, 2);
    CHECK(f.gamma[action_slot(Action::replace_u1)] == doctest::Approx(75.0));
    CHECK(f.gamma[action_slot(Action::replace_both)] == doctest::Approx(175.0));
    CHECK(std::isinf(f.gamma[action_slot(Action::none)]));
    CHECK(std::isinf(f.gamma[action_slot(Action::replace_u2)]));
    CHECK(f.value == doctest::Approx(75.0));
    CHECK(f.action == Action::replace_u1);
}

TEST_CASE("backup with an arbitrary value function and oracle sums") {
    const auto m = example_model();
    const auto c = example_costs();
    const BeliefGrid g(1, 0.5);
    Matrix vals(3, 3);
    vals << 1, 2, 3, 4, 5, 6, 7, 8, 9; // rows: pi(1) = 0, 0.5, 1
    const ValueFunction V{vals};
    auto Vat = [&](const Vector& pi, int k) {
        const double u = pi[1] * 2.0;
        const int lo = std::min(1, static_cast<int>(u));
        const double w = u - lo;
        return (1 - w) * vals(lo, k) + w * vals(lo + 1, k);
    };
    const Vector pi = vec({0.7, 0.3});
    const int j = 1;
    const double gm = c.gamma();
    const double co = stage_cost(c, pi, j);
    const Vector s = signal_distribution(m, pi, j);
    double g0 = co, g1 = co + c.c_s() + c.c_r1(), g2 = co + c.c_s() + c.c_r2();
    for (int z = 0; z < 2; ++z) {
        const Vector t = belief_update(m, pi, j, z);
        for (int k = 0; k < 3; ++k) g0 += gm * m.Q(j, k) * s[z] * Vat(t, k);
        g1 += gm * s[z] * Vat(t, 0);
    }
    for (int k = 0; k < 3; ++k) g2 += gm * m.Q(j, k) * vals(0, k);
    const double g12 = co + c.c_s() + c.c_r1() + c.c_r2() + gm * vals(0, 0);
    const auto b = bellman_backup(m, c, g, V, pi, j);
    CHECK(b.gamma[0] == doctest::Approx(g0));
    CHECK(b.gamma[1] == doctest::Approx(g1));
    CHECK(b.gamma[2] == doctest::Approx(g2));
    CHECK(b.gamma[3] == doctest::Approx(g12));
}

TEST_CASE("zero discount reduces to one-step costs") {
    const auto m = example_model();
    const auto c = example_costs().with_gamma(0.0);
    const BeliefGrid g(1, 0.1);
    const ValueFunction V{Matrix::Constant(g.size(), 3, 1e6)};
    const auto b = bellman_backup(m, c, g, V, vec({0.2, 0.8}), 1);
    CHECK(b.value == doctest::Approx(stage_cost(c, vec({0.2, 0.8}), 1)));
    const auto r = value_iteration(m, c, g);
    for (int i = 0; i < g.size(); ++i) CHECK(r.V.at(i, 0) == doctest::Approx(stage_cost(c, g.point(i), 0)));
}

TEST_CASE("ties resolve toward the lower action") {
    const auto m = example_model();
    const CostStructure zero(Vector::Zero(3), Vector::Zero(2), 0, 0, 0, 0.9);
    const BeliefGrid g(1, 0.1);
    const auto r = value_iteration(m, zero, g);
    CHECK(r.iterations == 1);
    CHECK(r.V.values.cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(r.policy.at(i, 0) == Action::none);
        CHECK(r.policy.at(i, 2) == Action::replace_u1);
    }
}

TEST_CASE("one iteration from zero") {
    const BeliefGrid g(1, 0.1);
    GridSolver s(example_model(), example_costs(), g);
    SolveOptions o;
    o.max_iterations = 1;
    o.tol = 1e9;
    const auto r = s.solve(s.full_mask(), o);
    CHECK(r.V.at(g.reset_index(), 0) == doctest::Approx(15.0));
    o.tol = 1e-3;
    CHECK_THROWS_AS(s.solve(s.full_mask(), o), NumericalError);
}

TEST_CASE("always replacing both in closed form") {
    const BeliefGrid g(1, 0.01);
    const auto c = example_costs();
    const auto r = evaluate_fixed_policy(example_model(), c, [](const Vector&, int) { return Action::replace_both; }, g,
                                         1e-6);
    CHECK(r.V.at(g.reset_index(), 0) == doctest::Approx(3100.0).epsilon(1e-6));
    // Elsewhere V = c_o + 140 + gamma * 3100.
    const int last = g.size() - 1;
    CHECK(r.V.at(last, 1) == doctest::Approx(stage_cost(c, e1, 1) + 140.0 + 0.95 * 3100.0).epsilon(1e-6));
}

TEST_CASE("inadmissible rule is rejected with the state") {
    const BeliefGrid g(1, 0.1);
    CHECK_THROWS_WITH_AS(evaluate_fixed_policy(example_model(), example_costs(),
                                               [](const Vector&, int) { return Action::none; }, g),
                         doctest::Contains("j=2"), ValidationError);
}

TEST_CASE("greedy evaluation matches the optimum") {
    const BeliefGrid g(1, 0.01);
    const auto m = example_model();
    const auto c = example_costs_swapped();
    const auto opt = value_iteration(m, c, g);
    const auto pol = opt.policy;
    const auto ev = evaluate_fixed_policy(
        m, c, [&](const Vector& pi, int j) { return pol.at(g.index_of(pi), j); }, g);
    CHECK((ev.V.values - opt.V.values).cwiseAbs().maxCoeff() <= 2 * 1e-3 / (1 - 0.95));
    CHECK(std::abs(ev.V.at(0, 0) - opt.V.at(0, 0)) <= 2e-3 / (1 - 0.95));
}

TEST_CASE("contraction of successive differences") {
    const BeliefGrid g(1, 0.02);
    const auto r = value_iteration(example_model(), example_costs_swapped(), g, 1e-6);
    const auto& tr = r.residual_trace;
    REQUIRE(tr.size() > 10);
    for (std::size_t i = 2; i < tr.size(); ++i)
        if (tr[i - 1] > 1e-9) CHECK(tr[i] / tr[i - 1] <= 0.95 + 1e-6);
    CHECK(r.residual <= 1e-6);
}

TEST_CASE("value bound and monotone convergence from below") {
    const BeliefGrid g(1, 0.02);
    const auto c = example_costs_swapped();
    const auto r = value_iteration(example_model(), c, g);
    CHECK(r.V.values.maxCoeff() <= max_one_period_cost(c) / (1 - c.gamma()));
    CHECK(r.V.values.minCoeff() >= 0.0);
}

TEST_CASE("finite horizon bounds the infinite-horizon value") {
    const BeliefGrid g(1, 0.1);
    const auto c = example_costs(0.5);
    GridSolver s(example_model(), c, g);
    const auto inf = s.solve(s.full_mask(), SolveOptions{1e-12});
    const auto fin = s.finite_horizon(s.full_mask(), 10);
    const double bound = std::pow(0.5, 10) * max_one_period_cost(c) / (1 - 0.5);
    CHECK((inf.V.values - fin.values).cwiseAbs().maxCoeff() <= bound);
    CHECK((inf.V.values - fin.values).minCoeff() >= -1e-9);
}

TEST_CASE("warm start reaches the same fixed point") {
    const BeliefGrid g(1, 0.02);
    GridSolver s(example_model(), example_costs_swapped(), g);
    const auto cold = s.solve(s.full_mask(), SolveOptions{1e-8});
    SolveOptions w{1e-8};
    w.warm_start = &cold.V.values;
    const auto warm = s.solve(s.full_mask(), w);
    CHECK(warm.iterations <= 2);
    CHECK((warm.V.values - cold.V.values).cwiseAbs().maxCoeff() < 1e-6);
    const Matrix bad = Matrix::Zero(3, 3);
    w.warm_start = &bad;
    CHECK_THROWS_AS(s.solve(s.full_mask(), w), ValidationError);
}

TEST_CASE("three-state U2 solves and respects the value bound") {
    RandomStream rng(52, 0);
    const auto m = random_degradation_model(1, 2, 2, rng);
    const CostStructure c(vec({1, 3}), vec({0, 2, 8}), 1, 5, 7, 0.9);
    const BeliefGrid g(2, 0.05);
    const auto r = value_iteration(m, c, g);
    CHECK(r.V.values.maxCoeff() <= max_one_period_cost(c) / (1 - c.gamma()));
    for (int i = 0; i < g.size(); ++i) {
        const Action a = r.policy.at(i, 1);
        CHECK((a == Action::replace_u1 || a == Action::replace_both));
    }
}

TEST_CASE("kernel and belief orderings on the example model") {
    const auto out = run_lemma_suite(example_model(), 200, 53);
    CHECK(out.pairs == 200);
    CHECK(out.checks > 1000);
    CHECK(out.violations.empty());
}

TEST_CASE("ordering checks detect a model without the monotone structure") {
    auto m = example_model();
    m.B = mat({{0.2, 0.8}, {0.8, 0.2}});
    CHECK_FALSE(run_lemma_suite(m, 50, 54).violations.empty());
}

}
