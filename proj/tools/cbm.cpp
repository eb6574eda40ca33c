// Command-line driver for the maintenance model: simulation, estimation,
// solving, benchmarking and order checks.

#include "cbm/baselines.hpp"
#include "cbm/errors.hpp"
#include "cbm/estimate.hpp"
#include "cbm/experiments.hpp"
#include "cbm/model_io.hpp"
#include "cbm/orders.hpp"
#include "cbm/parallel.hpp"
#include "cbm/report.hpp"
#include "cbm/simulate.hpp"
#include "cbm/solver.hpp"
#include "cbm/structure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out_dir;
};

fs::path place(const Globals& g, const std::string& p) {
    fs::path path(p);
    if (g.out_dir.empty() || path.is_absolute()) return path;
    return fs::path(g.out_dir) / path;
}

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

cbm::ExperimentManifest load_manifest(const std::string& path, const std::string& experiment, const Globals& g) {
    cbm::ExperimentManifest m;
    if (path.empty()) {
        m = cbm::default_manifest(experiment);
    } else {
        json j;
        try {
            j = json::parse(cbm::read_text_file(path));
        } catch (const json::parse_error& e) {
            throw cbm::ValidationError(std::string("manifest is not valid JSON: ") + e.what());
        }
        if (!j.contains("experiment")) j["experiment"] = experiment;
        if (j.at("experiment") != experiment)
            throw cbm::ValidationError("manifest is for '" + j.at("experiment").get<std::string>() + "', expected '" +
                                       experiment + "'");
        m = cbm::parse_manifest(j.dump(), fs::absolute(path).parent_path());
    }
    if (g.seed) m.estimation.seed = *g.seed;
    if (!g.out_dir.empty()) m.out_dir = g.out_dir;
    return m;
}

json model_json(const cbm::SystemModel& m) { return json::parse(cbm::format_model(m)); }

int run_simulate(const Globals& g, const std::string& model_path, int T, int n, bool reveal, const std::string& out) {
    const auto model = cbm::read_model(model_path);
    const auto set = cbm::simulate_trajectories(model, T, n, seed_or(g, 1), reveal);
    const fs::path dest = place(g, out);
    cbm::write_trajectories(set, dest);
    std::printf("wrote %d trajectories of %d epochs to %s\n", T, n, dest.string().c_str());
    return kOk;
}

int run_fit(const Globals& g, const std::string& data_path, int L1, int L2, int M, int restarts, int max_iter,
            const std::string& out, const std::string& trace) {
    cbm::TrajectoryBounds bounds;
    bounds.L1 = L1;
    bounds.L2 = L2;
    bounds.M = M;
    const auto data = cbm::read_trajectories(data_path, bounds);
    if (L1 < 0) {
        L1 = 0;
        for (const auto& t : data.trajectories)
            for (int x : t.x1) L1 = std::max(L1, x);
    }
    cbm::MultiStartOptions opts;
    opts.restarts = restarts;
    opts.seed = seed_or(g, 1);
    opts.fit.max_iter = max_iter;
    const auto result = cbm::multi_start_fit(data, cbm::structural_template(L1, L2, M), opts);

    json table = json::array();
    for (const auto& s : result.table) table.push_back({{"parameter", s.name}, {"mean", s.mean}, {"sd", s.sd}});
    json flags = json::array();
    for (std::size_t r = 0; r < result.runs.size(); ++r)
        for (const auto& f : result.runs[r].flags) flags.push_back("run " + std::to_string(r) + ": " + f);
    json runs = json::array();
    for (const auto& r : result.runs)
        runs.push_back({{"iterations", r.iterations}, {"converged", r.converged}, {"loglik", r.loglik_trace}});
    json doc{{"theta_hat", model_json(result.mean_theta.to_model())},
             {"best", model_json(result.best.theta_hat.to_model())},
             {"table", table},
             {"loglik_trace", result.best.loglik_trace},
             {"runs", runs},
             {"flags", flags},
             {"free_parameters", cbm::free_parameter_count(result.mean_theta)},
             {"seed", opts.seed}};
    const fs::path dest = place(g, out);
    cbm::write_text_file(dest, doc.dump(2) + "\n");
    fs::path trace_path = trace.empty() ? fs::path(dest).replace_extension().concat("_loglik.csv") : place(g, trace);
    cbm::write_text_file(trace_path, cbm::format_loglik_csv(result.best.loglik_trace));
    std::printf("fitted %zu restarts; best loglik %.6f; wrote %s and %s\n", result.runs.size(),
                result.best.loglik_trace.back(), dest.string().c_str(), trace_path.string().c_str());
    return kOk;
}

int run_solve(const Globals& g, const std::string& model_path, const std::string& costs_path, double step,
              double tol, std::optional<double> gamma, const std::string& prefix) {
    const auto model = cbm::read_model(model_path);
    auto costs = cbm::read_costs(costs_path);
    if (gamma) costs = costs.with_gamma(*gamma);
    const cbm::BeliefGrid grid(model.L2, step);
    const auto t0 = std::chrono::steady_clock::now();
    const cbm::GridSolver solver(model, costs, grid);
    const auto result = solver.solve(solver.full_mask(), cbm::SolveOptions{tol});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string base = place(g, prefix).string();
    cbm::write_text_file(base + "value.csv", cbm::format_value_csv(result.V, grid));
    cbm::write_text_file(base + "policy.csv", cbm::format_policy_csv(result.policy, grid));
    const std::string heat = cbm::format_policy_heatmap(result.policy, grid);
    cbm::write_text_file(base + "heatmap.txt", heat);
    std::string shape = "n/a (L2 > 1)";
    if (grid.L2() == 1) {
        const auto s = cbm::policy_structure_report(result.policy, grid);
        const auto v = cbm::value_shape_report(result.V, grid);
        const auto pref = cbm::preference_report(solver, result.V);
        cbm::write_text_file(base + "structure.json", cbm::structure_to_json(s, v, &pref));
        shape = s.summary();
    }
    std::printf("V(e0,0) = %.6f  iterations %ld  residual %.3g  %.3fs\nstructure: %s\n%s",
                result.V.at(grid.reset_index(), 0), result.iterations, result.residual, secs, shape.c_str(),
                heat.c_str());
    return kOk;
}

int run_benchmark(const Globals& g, const std::string& manifest_path, const std::string& out) {
    auto m = load_manifest(manifest_path, "benchmark64", g);
    const auto report = cbm::run_benchmark64(m);
    if (!out.empty()) {
        const fs::path dest = place(g, out);
        cbm::write_text_file(dest, cbm::format_gap_csv(report.records));
        if (!report.records.empty())
            cbm::write_text_file(fs::path(dest).replace_extension().concat("_summary.csv"),
                                 cbm::format_gap_summary_csv(cbm::summarize_gaps(report.records)));
    }
    std::printf("%zu instances solved, %zu failed, %.1fs\n", report.records.size(), report.failures.size(),
                report.seconds);
    if (!report.records.empty()) {
        const auto rows = cbm::summarize_gaps(report.records);
        const auto& t = rows.back();
        for (int p = 0; p < 3; ++p)
            std::printf("policy %d gap%%: min %.2f mean %.2f max %.2f\n", p + 1, t.policy[p].min, t.policy[p].mean,
                        t.policy[p].max);
    }
    for (const auto& f : report.failures) std::fprintf(stderr, "failed: %s\n", f.message.c_str());
    return report.failures.empty() ? kOk : kNumerical;
}

int run_sensitivity(const Globals& g, const std::string& manifest_path) {
    const auto m = load_manifest(manifest_path, "sensitivity", g);
    const auto r = cbm::run_sensitivity(m);
    for (const auto& v : r.variants) {
        std::printf("%-20s V(e0,0) = %.4f  thresholds:", v.name.c_str(), v.value);
        for (const auto& t : v.thresholds) {
            if (t) std::printf(" %.3f", *t);
            else std::printf("   -  ");
        }
        std::printf("\n");
    }
    std::printf("threshold ordering better >= base >= worse: %s\n", r.thresholds_ordered ? "yes" : "no");
    for (const auto& n : r.ordering_notes) std::printf("  %s\n", n.c_str());
    return kOk;
}

int run_motivating(const Globals& g, const std::string& manifest_path, bool skip_fit) {
    auto m = load_manifest(manifest_path, "motivating", g);
    if (skip_fit) m.skip_fit = true;
    const auto r = cbm::run_motivating(m);
    std::printf("V_true(e0,0) = %.4f (%ld iterations)\nV_est(e0,0)  = %.4f (%ld iterations)\n"
                "relative difference %.3f%%\nassumptions A1-A4 certified: %s\nstructure: %s\n",
                r.V_true, r.iterations_true, r.V_est, r.iterations_est, r.relative_difference,
                r.assumptions.all_yes() ? "yes" : "no", r.structure_true.summary().c_str());
    if (r.fit)
        for (const auto& s : r.fit->table) std::printf("  %-10s %.3f (%.3f)\n", s.name.c_str(), s.mean, s.sd);
    return kOk;
}

int run_check_orders(const Globals& g, const std::string& model_path, int resolution, const std::string& out) {
    const auto model = cbm::read_model(model_path);
    const auto report = cbm::check_assumptions(model, resolution);
    const std::string text = cbm::assumptions_to_json(report);
    if (!out.empty()) cbm::write_text_file(place(g, out), text);
    std::printf("A1 %s\nA2 %s\nA3 %s\nA4 %s\n", cbm::to_string(report.a1.verdict), cbm::to_string(report.a2.verdict),
                cbm::to_string(report.a3.verdict), cbm::to_string(report.a4.verdict));
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Condition-based maintenance for a two-component system with a hidden component"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cbm::version()));
    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_option("--out-dir", g.out_dir, "Directory for relative output paths");

    std::string model, costs, data, out, prefix = "", manifest, trace;
    int T = 200, n = 50, L1 = -1, L2 = 1, M = 1, restarts = 30, max_iter = 30, resolution = 50;
    double step = 0.002, tol = 1e-3;
    std::optional<double> gamma;
    bool reveal = false, skip_fit = false;

    auto* sim = app.add_subcommand("simulate", "Simulate trajectories without maintenance");
    sim->add_option("--model", model, "Model JSON")->required();
    sim->add_option("--T", T, "Number of trajectories");
    sim->add_option("--n", n, "Epochs per trajectory");
    sim->add_flag("--reveal-hidden", reveal, "Include hidden U2 states");
    sim->add_option("--out", out, "Trajectory CSV")->required();

    auto* fit = app.add_subcommand("fit", "Multi-start EM estimation");
    fit->add_option("--data", data, "Trajectory CSV")->required();
    fit->add_option("--L1", L1, "U1 failure state (default: largest state in the data)");
    fit->add_option("--L2", L2, "U2 failure state");
    fit->add_option("--M", M, "Largest signal value");
    fit->add_option("--restarts", restarts, "Random restarts");
    fit->add_option("--max-iter", max_iter, "EM iterations per restart");
    fit->add_option("--out", out, "Output JSON")->required();
    fit->add_option("--trace", trace, "Log-likelihood CSV (default: <out>_loglik.csv)");

    auto* solve = app.add_subcommand("solve", "Grid value iteration");
    solve->add_option("--model", model, "Model JSON")->required();
    solve->add_option("--costs", costs, "Costs JSON")->required();
    solve->add_option("--grid-step", step, "Belief grid step");
    solve->add_option("--tol", tol, "Sup-norm stopping tolerance");
    solve->add_option("--gamma", gamma, "Override the discount factor");
    solve->add_option("--out-prefix", prefix, "Prefix for value.csv, policy.csv, structure.json, heatmap.txt");

    auto* bench = app.add_subcommand("benchmark", "Benchmark policies on the 64-instance design");
    bench->add_option("--instances", manifest, "Benchmark manifest JSON (default: all 64 instances)");
    bench->add_option("--out", out, "Per-instance gap CSV");

    auto* sens = app.add_subcommand("sensitivity", "Dependence and observation-quality variants of the base case");
    sens->add_option("--manifest", manifest, "Sensitivity manifest JSON");

    auto* orders = app.add_subcommand("check-orders", "Certify the stochastic-order assumptions of a model");
    orders->add_option("--model", model, "Model JSON")->required();
    orders->add_option("--resolution", resolution, "Simplex lattice resolution for copositivity");
    orders->add_option("--out", out, "Output JSON");

    auto* mot = app.add_subcommand("motivating", "Simulate, fit and solve the two-component example");
    mot->add_option("--manifest", manifest, "Motivating manifest JSON")->required();
    mot->add_flag("--skip-fit", skip_fit, "Use the manifest's estimated_model instead of fitting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    if (seed_opt->count()) g.seed = seed;

    try {
        cbm::set_thread_count(g.threads);
        if (*sim) return run_simulate(g, model, T, n, reveal, out);
        if (*fit) return run_fit(g, data, L1, L2, M, restarts, max_iter, out, trace);
        if (*solve) return run_solve(g, model, costs, step, tol, gamma, prefix);
        if (*bench) return run_benchmark(g, manifest, out);
        if (*sens) return run_sensitivity(g, manifest);
        if (*orders) return run_check_orders(g, model, resolution, out);
        if (*mot) return run_motivating(g, manifest, skip_fit);
    } catch (const cbm::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const cbm::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const cbm::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const json::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}
