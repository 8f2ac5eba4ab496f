#include "tomobss/scene_io.hpp"

#include <fstream>
#include <sstream>

#include "json_detail.hpp"
#include "tomobss/error.hpp"

namespace tomobss {

namespace detail {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) fail(ErrorKind::kInvalidInput, std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::kInvalidInput, std::string("unknown key '") + key + "' in " + what);
  }
}

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidInput, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const AcquisitionGeometry& geom) {
  return json{{"baselines_m", geom.baselines()}, {"wavelength_m", geom.wavelength()}, {"range_m", geom.range()}};
}

json to_json(const SimulationConfig& config) {
  json scatterers = json::array();
  for (const auto& s : config.scatterers) {
    json item{{"elevation_m", s.elevation_m}, {"amplitude", s.amplitude}};
    if (!s.deformation.empty()) {
      json terms = json::array();
      for (const auto& d : s.deformation) terms.push_back({{"coefficient", d.coefficient}, {"basis", d.basis}});
      item["deformation"] = terms;
    }
    scatterers.push_back(item);
  }
  return json{{"geometry", to_json(config.geometry)},
              {"scatterers", scatterers},
              {"noise_power", config.noise_power},
              {"looks", config.looks},
              {"seed", config.seed}};
}

AcquisitionGeometry geometry_from_json(const json& j) {
  check_keys(j, {"baselines_m", "wavelength_m", "range_m"}, "geometry");
  const auto fallback = AcquisitionGeometry::default_simulation();
  return AcquisitionGeometry(field(j, "baselines_m", fallback.baselines()),
                             field(j, "wavelength_m", fallback.wavelength()),
                             field(j, "range_m", fallback.range()));
}

SimulationConfig config_from_json(const json& j) {
  check_keys(j, {"geometry", "scatterers", "noise_power", "looks", "seed"}, "config");
  SimulationConfig c;
  if (j.contains("geometry")) c.geometry = geometry_from_json(j.at("geometry"));
  if (j.contains("scatterers")) {
    const json& list = j.at("scatterers");
    if (!list.is_array()) fail(ErrorKind::kInvalidInput, "'scatterers' must be an array");
    for (const auto& item : list) {
      check_keys(item, {"elevation_m", "amplitude", "deformation"}, "scatterer");
      ScattererParams s;
      s.elevation_m = field(item, "elevation_m", 0.0);
      s.amplitude = field(item, "amplitude", 1.0);
      if (item.contains("deformation")) {
        const json& terms = item.at("deformation");
        if (!terms.is_array()) fail(ErrorKind::kInvalidInput, "'deformation' must be an array");
        for (const auto& t : terms) {
          check_keys(t, {"coefficient", "basis"}, "deformation term");
          s.deformation.push_back({field(t, "coefficient", 0.0), field(t, "basis", std::vector<double>{})});
        }
      }
      c.scatterers.push_back(std::move(s));
    }
  }
  c.noise_power = field(j, "noise_power", c.noise_power);
  if (j.contains("looks") && !j.at("looks").is_number_unsigned())
    fail(ErrorKind::kInvalidInput, "'looks' must be a non-negative integer");
  c.looks = field(j, "looks", c.looks);
  if (j.contains("seed") && !j.at("seed").is_number_unsigned())
    fail(ErrorKind::kInvalidInput, "'seed' must be a non-negative integer");
  c.seed = field(j, "seed", c.seed);
  c.validate();
  return c;
}

}  // namespace detail

SimulationConfig parse_config(const std::string& json_text) {
  return detail::config_from_json(detail::parse_json(json_text));
}

std::string dump_config(const SimulationConfig& config) { return detail::to_json(config).dump(2) + "\n"; }

AcquisitionGeometry parse_geometry(const std::string& json_text) {
  return detail::geometry_from_json(detail::parse_json(json_text));
}

std::string dump_geometry(const AcquisitionGeometry& geom) { return detail::to_json(geom).dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text)) fail(ErrorKind::kIo, "cannot write " + path.string());
}

SimulationConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

void save_config(const std::filesystem::path& path, const SimulationConfig& config) {
  write_text_file(path, dump_config(config));
}

AcquisitionGeometry load_geometry(const std::filesystem::path& path) {
  const auto j = detail::parse_json(read_text_file(path));
  const bool bare = j.is_object() && (j.contains("baselines_m") || j.contains("wavelength_m") || j.contains("range_m"));
  if (bare) return detail::geometry_from_json(j);
  return detail::config_from_json(j).geometry;
}

}  // namespace tomobss
