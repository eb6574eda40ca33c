#include "cbm/model_io.hpp"
#include "json_convert.hpp"

#include <fstream>
#include <sstream>

namespace cbm {

SystemModel parse_model(const std::string& json_text) {
    SystemModel m;
    try {
        m = model_from_json(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model file: ") + e.what());
    }
    require_valid(m);
    return m;
}

std::string format_model(const SystemModel& model) { return model_to_json(model).dump(2); }

SystemModel read_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

void write_model(const SystemModel& model, const std::filesystem::path& path) {
    write_text_file(path, format_model(model) + "\n");
}

CostStructure parse_costs(const std::string& json_text) {
    try {
        return costs_from_json(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed costs file: ") + e.what());
    }
}

std::string format_costs(const CostStructure& costs) { return costs_to_json(costs).dump(2); }

CostStructure read_costs(const std::filesystem::path& path) { return parse_costs(read_text_file(path)); }

void write_costs(const CostStructure& costs, const std::filesystem::path& path) {
    write_text_file(path, format_costs(costs) + "\n");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace cbm
