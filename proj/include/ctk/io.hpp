#pragma once
#include <string>
#include <vector>

#include <json.hpp>

namespace ctk {

// CSV with a header row; cells formatted with 17 significant digits for
// doubles (round-trippable). Throws ConfigError on IO failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::string& path, const nlohmann::json& j);

std::string format_double(double v);

} // namespace ctk
