#pragma once

#include "cbm/baselines.hpp"
#include "cbm/estimate.hpp"
#include "cbm/instances.hpp"
#include "cbm/orders.hpp"
#include "cbm/structure.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cbm {

const char* version();

struct SolverSettings {
    double grid_step = 0.002;
    double tol = 1e-3;
    std::optional<double> gamma; ///< overrides the cost file when set
};

struct EstimationSettings {
    int T = 200;
    int n = 50;
    std::uint64_t seed = 20240601;
    int restarts = 30;
    int max_iter = 30;
    double tol = 1e-6;
};

struct BenchmarkManifest {
    std::vector<FactorChoices> choices; ///< empty means all 64
    double xi_step = 0.01;
    IndependentKernel policy3_kernel = IndependentKernel::p0;
    double setup_cost = kBenchmarkSetupCost;
    double gamma = kBenchmarkGamma;
};

struct SensitivityManifest {
    Matrix better_B;
    Matrix worse_B;
    double setup_cost = kBenchmarkSetupCost;
    double gamma = kBenchmarkGamma;
};

/// Settings for one canned experiment. Paths are resolved against the
/// manifest's directory when parsed from a file.
struct ExperimentManifest {
    std::string experiment; ///< "motivating", "benchmark64" or "sensitivity"
    std::filesystem::path model;
    std::filesystem::path costs;
    std::filesystem::path estimated_model; ///< used by motivating when skip_fit is set
    bool skip_fit = false;
    SolverSettings solver;
    EstimationSettings estimation;
    BenchmarkManifest benchmark;
    SensitivityManifest sensitivity;
    std::filesystem::path out_dir = "out";
};

ExperimentManifest default_manifest(const std::string& experiment);

/// Unknown keys are rejected; missing keys keep their defaults.
ExperimentManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentManifest read_manifest(const std::filesystem::path& path);

/// Fully resolved settings (absolute paths, code version); parseable by parse_manifest.
std::string manifest_echo(const ExperimentManifest& manifest);

struct MotivatingReport {
    double V_true = 0.0;
    double V_est = 0.0;
    double relative_difference = 0.0; ///< percent, (V_est - V_true) / V_true
    long iterations_true = 0;
    long iterations_est = 0;
    SystemModel estimated;
    std::optional<MultiStartResult> fit; ///< absent with skip_fit
    StructureReport structure_true;
    ValueShapeReport shape_true;
    AssumptionReport assumptions;
    double solve_seconds = 0.0;
    double fit_seconds = 0.0;
};

/// Simulate, fit by multi-start EM, solve with true and estimated parameters.
MotivatingReport run_motivating(const ExperimentManifest& manifest);

struct InstanceFailure {
    std::string instance;
    std::string message;
};

struct BenchmarkReport {
    std::vector<GapRecord> records; ///< in enumeration order, failures omitted
    std::vector<InstanceFailure> failures;
    double seconds = 0.0;
};

/// Policies 0-3 on every selected instance; failures are isolated and reported.
BenchmarkReport run_benchmark64(const ExperimentManifest& manifest);

/// Smallest grid pi(L2) at which U2 is replaced (action 2 or 12), per j.
std::vector<std::optional<double>> u2_replacement_thresholds(const PolicyMap& policy, const BeliefGrid& grid);

struct SensitivityVariant {
    std::string name;
    double value = 0.0; ///< V(e0, 0)
    long iterations = 0;
    std::vector<std::optional<double>> thresholds;
    StructureReport structure;
};

struct SensitivityReport {
    std::vector<SensitivityVariant> variants; ///< base, independent, better-observation, worse-observation
    /// Per j, better >= base >= worse where all three thresholds exist.
    bool thresholds_ordered = true;
    std::vector<std::string> ordering_notes;
    const SensitivityVariant& variant(const std::string& name) const;
};

SensitivityReport run_sensitivity(const ExperimentManifest& manifest);

} // namespace cbm
