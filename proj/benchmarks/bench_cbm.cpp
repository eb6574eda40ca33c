#include "cbm/baselines.hpp"
#include "cbm/estimate.hpp"
#include "cbm/instances.hpp"
#include "cbm/model_io.hpp"
#include "cbm/simulate.hpp"
#include "cbm/solver.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(CBM_BENCH_DATA_DIR) / name; }

const cbm::SystemModel& example_model() {
    static const auto m = cbm::read_model(data("motivating_model.json"));
    return m;
}

const cbm::CostStructure& example_costs() {
    static const auto c = cbm::read_costs(data("motivating_costs.json"));
    return c;
}

// Argument: grid resolution K (step 1/K).
void BM_ValueIteration(benchmark::State& state) {
    const cbm::BeliefGrid grid(1, 1.0 / static_cast<double>(state.range(0)));
    const cbm::GridSolver solver(example_model(), example_costs(), grid);
    const auto mask = solver.full_mask();
    long iterations = 0;
    for (auto _ : state) {
        auto r = solver.solve(mask);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.V.values.data());
    }
    state.counters["sweeps"] = static_cast<double>(iterations);
}
BENCHMARK(BM_ValueIteration)->Arg(50)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_ValueIterationBenchmarkInstance(benchmark::State& state) {
    const auto inst = cbm::base_instance();
    const cbm::BeliefGrid grid(1, 0.002);
    const cbm::GridSolver solver(inst.model, inst.costs, grid);
    const auto mask = solver.full_mask();
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(mask).V.values.data());
}
BENCHMARK(BM_ValueIterationBenchmarkInstance)->Unit(benchmark::kMillisecond);

void BM_SolverSetup(benchmark::State& state) {
    const cbm::BeliefGrid grid(1, 0.002);
    for (auto _ : state) {
        cbm::GridSolver solver(example_model(), example_costs(), grid);
        benchmark::DoNotOptimize(&solver);
    }
}
BENCHMARK(BM_SolverSetup)->Unit(benchmark::kMillisecond);

// Argument: trajectory length n.
void BM_ForwardBackward(benchmark::State& state) {
    const auto set = cbm::simulate_trajectories(example_model(), 1, static_cast<int>(state.range(0)), 11, false);
    const auto theta = cbm::Theta::from_model(example_model());
    for (auto _ : state) benchmark::DoNotOptimize(cbm::forward_backward(theta, set.trajectories.front()).loglik);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(50)->Arg(500)->Arg(5000);

void BM_EmIteration(benchmark::State& state) {
    const auto set = cbm::simulate_trajectories(example_model(), 200, 50, 12, false);
    auto theta = cbm::Theta::from_model(example_model());
    for (auto _ : state) {
        const auto post = cbm::e_step(theta, set);
        benchmark::DoNotOptimize(cbm::m_step(post, set, theta).theta.B.data());
    }
}
BENCHMARK(BM_EmIteration)->Unit(benchmark::kMillisecond);

void BM_Policy1Search(benchmark::State& state) {
    const auto inst = cbm::base_instance();
    const cbm::BeliefGrid grid(1, 0.01);
    const cbm::GridSolver solver(inst.model, inst.costs, grid);
    for (auto _ : state) benchmark::DoNotOptimize(cbm::solve_policy1(solver, 0.05).value);
}
BENCHMARK(BM_Policy1Search)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
