#pragma once

#include "cbm/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace cbm {

/// Factors of the 64-instance benchmark design, in table order.
enum class Factor : int { operating_cost = 0, replacement_u1, replacement_u2, observation, transition_u1,
                          transition_u2 };

inline constexpr int kFactorCount = 6;
const char* factor_name(Factor f);

/// Choice per factor, each 1 or 2.
using FactorChoices = std::array<int, kFactorCount>;

/// Setup cost used for the benchmark instances (not printed alongside the factors).
inline constexpr double kBenchmarkSetupCost = 2.0;
inline constexpr double kBenchmarkGamma = 0.95;

struct Instance {
    std::string id; ///< e.g. "c121211"
    FactorChoices choices{};
    SystemModel model;
    CostStructure costs;
};

/// Throws ValidationError unless every choice is 1 or 2.
void validate_choices(const FactorChoices& choices);

std::string instance_id(const FactorChoices& choices);
FactorChoices choices_from_id(const std::string& id);

Instance make_instance(const FactorChoices& choices, double setup_cost = kBenchmarkSetupCost,
                       double gamma = kBenchmarkGamma);

/// All 64 combinations; the last factor varies fastest.
std::vector<FactorChoices> all_factor_choices();

/// Base case: every factor at choice 1.
Instance base_instance(double setup_cost = kBenchmarkSetupCost, double gamma = kBenchmarkGamma);

/// Copy with every P[j] replaced by P[0].
SystemModel independent_variant(const SystemModel& model);

} // namespace cbm
