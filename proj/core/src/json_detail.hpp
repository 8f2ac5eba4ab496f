#pragma once

#include <string>

#include "json.hpp"
#include "tomobss/geometry.hpp"
#include "tomobss/simulator.hpp"

namespace tomobss::detail {

using nlohmann::json;

json to_json(const AcquisitionGeometry& geom);
json to_json(const SimulationConfig& config);
AcquisitionGeometry geometry_from_json(const json& j);
SimulationConfig config_from_json(const json& j);

/// Parses text, mapping syntax errors to kInvalidInput.
json parse_json(const std::string& text);

/// Rejects keys outside `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what);

}  // namespace tomobss::detail
