#include "cbm/experiments.hpp"
#include "cbm/errors.hpp"
#include "cbm/model_io.hpp"
#include "cbm/orders.hpp"
#include "cbm/parallel.hpp"
#include "cbm/report.hpp"
#include "cbm/simulate.hpp"

#include "json_convert.hpp"

#include <chrono>
#include <set>

#ifndef CBM_VERSION
#define CBM_VERSION "unknown"
#endif

namespace cbm {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() { return CBM_VERSION; }

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest key '") + key + "': " + e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

fs::path absolute_or_empty(const fs::path& p) { return p.empty() ? p : fs::absolute(p).lexically_normal(); }

Matrix default_better_B() {
    Matrix B(2, 2);
    B << 0.9, 0.1, 0.1, 0.9;
    return B;
}

Matrix default_worse_B() {
    Matrix B(2, 2);
    B << 0.7, 0.3, 0.3, 0.7;
    return B;
}

CostStructure load_costs(const ExperimentManifest& m) {
    CostStructure c = read_costs(m.costs);
    return m.solver.gamma ? c.with_gamma(*m.solver.gamma) : c;
}

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string("manifest needs '") + what + "'");
    if (!fs::exists(p)) throw IoError(std::string(what) + " file not found: " + p.string());
}

struct SolvedArtifacts {
    SolveResult result;
    double value = 0.0;
};

// Solves one problem and writes value/policy/heatmap/structure files with a common prefix.
SolvedArtifacts solve_and_write(const SystemModel& model, const CostStructure& costs, const BeliefGrid& grid,
                                double tol, const fs::path& dir, const std::string& prefix,
                                StructureReport* structure = nullptr, ValueShapeReport* shape = nullptr) {
    const GridSolver solver(model, costs, grid);
    SolvedArtifacts out;
    out.result = solver.solve(solver.full_mask(), SolveOptions{tol});
    out.value = out.result.V.at(grid.reset_index(), 0);
    write_text_file(dir / (prefix + "value.csv"), format_value_csv(out.result.V, grid));
    write_text_file(dir / (prefix + "policy.csv"), format_policy_csv(out.result.policy, grid));
    write_text_file(dir / (prefix + "heatmap.txt"), format_policy_heatmap(out.result.policy, grid));
    if (grid.L2() == 1) {
        auto s = policy_structure_report(out.result.policy, grid);
        auto v = value_shape_report(out.result.V, grid);
        const auto pref = preference_report(solver, out.result.V);
        write_text_file(dir / (prefix + "structure.json"), structure_to_json(s, v, &pref));
        if (structure) *structure = std::move(s);
        if (shape) *shape = std::move(v);
    }
    return out;
}

} // namespace

ExperimentManifest default_manifest(const std::string& experiment) {
    ExperimentManifest m;
    m.experiment = experiment;
    m.sensitivity.better_B = default_better_B();
    m.sensitivity.worse_B = default_worse_B();
    m.out_dir = fs::path("out") / experiment;
    return m;
}

ExperimentManifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("manifest must be a JSON object");
    reject_unknown(j,
                   {"experiment", "model", "costs", "estimated_model", "skip_fit", "solver", "estimation", "benchmark",
                    "sensitivity", "out_dir", "code_version"},
                   "manifest");
    if (!j.contains("experiment")) throw ValidationError("manifest needs 'experiment'");
    ExperimentManifest m = default_manifest(j.at("experiment").get<std::string>());
    if (m.experiment != "motivating" && m.experiment != "benchmark64" && m.experiment != "sensitivity")
        throw ValidationError("unknown experiment '" + m.experiment + "'");

    std::string path;
    path.clear();
    read_opt(j, "model", path);
    m.model = resolve(base_dir, path);
    path.clear();
    read_opt(j, "costs", path);
    m.costs = resolve(base_dir, path);
    path.clear();
    read_opt(j, "estimated_model", path);
    m.estimated_model = resolve(base_dir, path);
    read_opt(j, "skip_fit", m.skip_fit);
    if (j.contains("out_dir")) m.out_dir = resolve(base_dir, j.at("out_dir").get<std::string>());

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        reject_unknown(s, {"grid_step", "tol", "gamma"}, "solver");
        read_opt(s, "grid_step", m.solver.grid_step);
        read_opt(s, "tol", m.solver.tol);
        if (s.contains("gamma") && !s.at("gamma").is_null()) m.solver.gamma = s.at("gamma").get<double>();
    }
    if (j.contains("estimation")) {
        const json& e = j.at("estimation");
        reject_unknown(e, {"T", "n", "seed", "restarts", "max_iter", "tol"}, "estimation");
        read_opt(e, "T", m.estimation.T);
        read_opt(e, "n", m.estimation.n);
        read_opt(e, "seed", m.estimation.seed);
        read_opt(e, "restarts", m.estimation.restarts);
        read_opt(e, "max_iter", m.estimation.max_iter);
        read_opt(e, "tol", m.estimation.tol);
    }
    if (j.contains("benchmark")) {
        const json& b = j.at("benchmark");
        reject_unknown(b, {"choices", "xi_step", "policy3_kernel", "setup_cost", "gamma"}, "benchmark");
        if (b.contains("choices") && !(b.at("choices").is_string() && b.at("choices") == "all")) {
            for (const auto& c : b.at("choices")) {
                FactorChoices fc{};
                if (c.is_string()) {
                    fc = choices_from_id(c.get<std::string>());
                } else {
                    if (!c.is_array() || c.size() != kFactorCount)
                        throw ValidationError("each benchmark choice needs six entries");
                    for (int i = 0; i < kFactorCount; ++i) fc[i] = c[i].get<int>();
                    validate_choices(fc);
                }
                m.benchmark.choices.push_back(fc);
            }
        }
        read_opt(b, "xi_step", m.benchmark.xi_step);
        if (b.contains("policy3_kernel"))
            m.benchmark.policy3_kernel = independent_kernel_from_string(b.at("policy3_kernel").get<std::string>());
        read_opt(b, "setup_cost", m.benchmark.setup_cost);
        read_opt(b, "gamma", m.benchmark.gamma);
    }
    if (j.contains("sensitivity")) {
        const json& s = j.at("sensitivity");
        reject_unknown(s, {"better_B", "worse_B", "setup_cost", "gamma"}, "sensitivity");
        if (s.contains("better_B")) m.sensitivity.better_B = matrix_from_json(s.at("better_B"), "better_B");
        if (s.contains("worse_B")) m.sensitivity.worse_B = matrix_from_json(s.at("worse_B"), "worse_B");
        read_opt(s, "setup_cost", m.sensitivity.setup_cost);
        read_opt(s, "gamma", m.sensitivity.gamma);
    }
    if (!(m.solver.grid_step > 0.0 && m.solver.grid_step <= 1.0)) throw ValidationError("solver.grid_step must be in (0, 1]");
    if (!(m.solver.tol > 0.0)) throw ValidationError("solver.tol must be positive");
    if (m.estimation.T < 1 || m.estimation.n < 1) throw ValidationError("estimation.T and estimation.n must be positive");
    if (m.estimation.restarts < 1 || m.estimation.max_iter < 0)
        throw ValidationError("estimation.restarts must be positive and max_iter non-negative");
    return m;
}

ExperimentManifest read_manifest(const fs::path& path) {
    return parse_manifest(read_text_file(path), fs::absolute(path).parent_path());
}

std::string manifest_echo(const ExperimentManifest& m) {
    json choices = json::array();
    for (const auto& c : m.benchmark.choices) choices.push_back(instance_id(c));
    json j{{"experiment", m.experiment},
           {"code_version", version()},
           {"model", absolute_or_empty(m.model).string()},
           {"costs", absolute_or_empty(m.costs).string()},
           {"estimated_model", absolute_or_empty(m.estimated_model).string()},
           {"skip_fit", m.skip_fit},
           {"solver",
            {{"grid_step", m.solver.grid_step},
             {"tol", m.solver.tol},
             {"gamma", m.solver.gamma ? json(*m.solver.gamma) : json()}}},
           {"estimation",
            {{"T", m.estimation.T},
             {"n", m.estimation.n},
             {"seed", m.estimation.seed},
             {"restarts", m.estimation.restarts},
             {"max_iter", m.estimation.max_iter},
             {"tol", m.estimation.tol}}},
           {"benchmark",
            {{"choices", m.benchmark.choices.empty() ? json("all") : choices},
             {"xi_step", m.benchmark.xi_step},
             {"policy3_kernel", to_string(m.benchmark.policy3_kernel)},
             {"setup_cost", m.benchmark.setup_cost},
             {"gamma", m.benchmark.gamma}}},
           {"sensitivity",
            {{"better_B", matrix_to_json(m.sensitivity.better_B)},
             {"worse_B", matrix_to_json(m.sensitivity.worse_B)},
             {"setup_cost", m.sensitivity.setup_cost},
             {"gamma", m.sensitivity.gamma}}},
           {"out_dir", absolute_or_empty(m.out_dir).string()}};
    return j.dump(2) + "\n";
}

MotivatingReport run_motivating(const ExperimentManifest& m) {
    require_file(m.model, "model");
    require_file(m.costs, "costs");
    const SystemModel model = read_model(m.model);
    const CostStructure costs = load_costs(m);
    costs.require_compatible(model);
    const fs::path& dir = m.out_dir;
    write_text_file(dir / "manifest_echo.json", manifest_echo(m));

    MotivatingReport r;
    r.assumptions = check_assumptions(model);
    write_text_file(dir / "assumptions.json", assumptions_to_json(r.assumptions));

    const BeliefGrid grid(model.L2, m.solver.grid_step);
    auto t0 = std::chrono::steady_clock::now();
    const auto truth =
        solve_and_write(model, costs, grid, m.solver.tol, dir, "true_", &r.structure_true, &r.shape_true);
    r.solve_seconds = seconds_since(t0);
    r.V_true = truth.value;
    r.iterations_true = truth.result.iterations;

    if (m.skip_fit) {
        require_file(m.estimated_model, "estimated_model");
        r.estimated = read_model(m.estimated_model);
    } else {
        const auto data = simulate_trajectories(model, m.estimation.T, m.estimation.n, m.estimation.seed, false);
        write_trajectories(data, dir / "trajectories.csv");
        MultiStartOptions opts;
        opts.restarts = m.estimation.restarts;
        opts.seed = m.estimation.seed;
        opts.fit.max_iter = m.estimation.max_iter;
        opts.fit.tol = m.estimation.tol;
        t0 = std::chrono::steady_clock::now();
        auto fitted = multi_start_fit(data, structural_template(model.L1, model.L2, model.M), opts);
        r.fit_seconds = seconds_since(t0);
        r.estimated = fitted.mean_theta.to_model();
        write_text_file(dir / "estimates.csv", format_estimate_table_csv(fitted.table));
        write_text_file(dir / "loglik_trace.csv", format_loglik_csv(fitted.best.loglik_trace));
        write_text_file(dir / "loglik_runs.csv", format_multistart_trace_csv(fitted));
        r.fit = std::move(fitted);
    }
    write_model(r.estimated, dir / "estimated_model.json");
    const auto est = solve_and_write(r.estimated, costs, grid, m.solver.tol, dir, "est_");
    r.V_est = est.value;
    r.iterations_est = est.result.iterations;
    r.relative_difference = gap_percent(r.V_est, r.V_true);

    json summary{{"V_true", r.V_true},
                 {"V_est", r.V_est},
                 {"relative_difference_percent", r.relative_difference},
                 {"iterations_true", r.iterations_true},
                 {"iterations_est", r.iterations_est},
                 {"solve_seconds", r.solve_seconds},
                 {"fit_seconds", r.fit_seconds},
                 {"skip_fit", m.skip_fit},
                 {"structure_true", r.structure_true.summary()}};
    if (r.fit) {
        json flags = json::array();
        for (const auto& run : r.fit->runs)
            for (const auto& f : run.flags) flags.push_back(f);
        summary["fit_flags"] = flags;
        summary["free_parameters"] = free_parameter_count(r.fit->mean_theta);
    }
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    return r;
}

BenchmarkReport run_benchmark64(const ExperimentManifest& m) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<FactorChoices> choices = m.benchmark.choices.empty() ? all_factor_choices() : m.benchmark.choices;
    const fs::path& dir = m.out_dir;
    write_text_file(dir / "manifest_echo.json", manifest_echo(m));

    BenchmarkSettings settings;
    settings.grid_step = m.solver.grid_step;
    settings.tol = m.solver.tol;
    settings.xi_step = m.benchmark.xi_step;
    settings.policy3_kernel = m.benchmark.policy3_kernel;

    std::vector<std::optional<GapRecord>> results(choices.size());
    std::vector<std::string> errors(choices.size());
    parallel_for(choices.size(), [&](std::size_t i) {
        std::string id = "instance#" + std::to_string(i);
        try {
            const Instance inst = make_instance(choices[i], m.benchmark.setup_cost, m.benchmark.gamma);
            id = inst.id;
            const fs::path sub = dir / "instances" / inst.id;
            write_model(inst.model, sub / "model.json");
            write_costs(inst.costs, sub / "costs.json");
            GapRecord rec = compare_policies(inst.id, inst.model, inst.costs, settings);
            write_text_file(sub / "result.csv", gap_csv_header() + format_gap_row(rec));
            results[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = id + ": " + e.what();
        }
    });

    BenchmarkReport r;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (results[i]) r.records.push_back(*results[i]);
        else r.failures.push_back({instance_id(choices[i]), errors[i]});
    }
    write_text_file(dir / "benchmark.csv", format_gap_csv(r.records));
    if (!r.records.empty()) write_text_file(dir / "summary.csv", format_gap_summary_csv(summarize_gaps(r.records)));
    std::string fail_csv = "instance,message\n";
    for (const auto& f : r.failures) fail_csv += f.instance + ",\"" + f.message + "\"\n";
    write_text_file(dir / "failures.csv", fail_csv);
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<std::optional<double>> u2_replacement_thresholds(const PolicyMap& policy, const BeliefGrid& grid) {
    std::vector<std::optional<double>> out(policy.u1_states);
    for (int j = 0; j < policy.u1_states; ++j)
        for (int g = 0; g < grid.size(); ++g)
            if (replaces_u2(policy.at(g, j))) {
                out[j] = grid.point(g)[grid.L2()];
                break;
            }
    return out;
}

const SensitivityVariant& SensitivityReport::variant(const std::string& name) const {
    for (const auto& v : variants)
        if (v.name == name) return v;
    throw ValidationError("no sensitivity variant '" + name + "'");
}

SensitivityReport run_sensitivity(const ExperimentManifest& m) {
    const fs::path& dir = m.out_dir;
    write_text_file(dir / "manifest_echo.json", manifest_echo(m));
    const Instance base = base_instance(m.sensitivity.setup_cost, m.sensitivity.gamma);

    std::vector<std::pair<std::string, SystemModel>> models;
    models.emplace_back("base", base.model);
    models.emplace_back("independent", independent_variant(base.model));
    SystemModel better = base.model, worse = base.model;
    better.B = m.sensitivity.better_B;
    worse.B = m.sensitivity.worse_B;
    models.emplace_back("better-observation", better);
    models.emplace_back("worse-observation", worse);

    const BeliefGrid grid(base.model.L2, m.solver.grid_step);
    SensitivityReport r;
    r.variants.resize(models.size());
    parallel_for(models.size(), [&](std::size_t i) {
        const auto& [name, model] = models[i];
        require_valid(model);
        const fs::path sub = dir / name;
        write_model(model, sub / "model.json");
        write_costs(base.costs, sub / "costs.json");
        SensitivityVariant v;
        v.name = name;
        const auto solved = solve_and_write(model, base.costs, grid, m.solver.tol, sub, "", &v.structure);
        v.value = solved.value;
        v.iterations = solved.result.iterations;
        v.thresholds = u2_replacement_thresholds(solved.result.policy, grid);
        r.variants[i] = std::move(v);
    });

    const auto& b = r.variant("base").thresholds;
    const auto& hi = r.variant("better-observation").thresholds;
    const auto& lo = r.variant("worse-observation").thresholds;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!b[j] || !hi[j] || !lo[j]) continue;
        if (*hi[j] + 1e-12 < *b[j] || *b[j] + 1e-12 < *lo[j]) {
            r.thresholds_ordered = false;
            r.ordering_notes.push_back("j=" + std::to_string(j) + ": better " + std::to_string(*hi[j]) + ", base " +
                                       std::to_string(*b[j]) + ", worse " + std::to_string(*lo[j]));
        }
    }

    std::string csv = "variant,value,iterations";
    for (int j = 0; j <= base.model.L1; ++j) csv += ",threshold_j" + std::to_string(j);
    csv += "\n";
    for (const auto& v : r.variants) {
        csv += v.name + "," + std::to_string(v.value) + "," + std::to_string(v.iterations);
        for (const auto& t : v.thresholds) csv += "," + (t ? std::to_string(*t) : std::string());
        csv += "\n";
    }
    write_text_file(dir / "sensitivity.csv", csv);
    return r;
}

} // namespace cbm
