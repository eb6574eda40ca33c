#pragma once

#include "cbm/model.hpp"

#include <filesystem>
#include <string>

namespace cbm {

// Model files: {"L1":..,"L2":..,"M":..,"Q":[[..],..],"P":[[[..],..],..],"B":[[..],..]}
// Cost files:  {"c_o1":[..],"c_o2":[..],"c_s":..,"c_r1":..,"c_r2":..,"gamma":..}
// Doubles are written in shortest round-trip form, so read(write(x)) == x bitwise.

SystemModel parse_model(const std::string& json_text);
std::string format_model(const SystemModel& model);
SystemModel read_model(const std::filesystem::path& path);
void write_model(const SystemModel& model, const std::filesystem::path& path);

CostStructure parse_costs(const std::string& json_text);
std::string format_costs(const CostStructure& costs);
CostStructure read_costs(const std::filesystem::path& path);
void write_costs(const CostStructure& costs, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace cbm
