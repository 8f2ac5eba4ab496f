#pragma once

#include <filesystem>
#include <string>

#include "tomobss/geometry.hpp"
#include "tomobss/simulator.hpp"

namespace tomobss {

// JSON layout:
// {
//   "geometry": {"baselines_m": [...], "wavelength_m": 0.031, "range_m": 704516.0},
//   "scatterers": [{"elevation_m": 40, "amplitude": 2,
//                   "deformation": [{"coefficient": 0.01, "basis": [...]}]}],
//   "noise_power": 0.0, "looks": 900, "seed": 1
// }
// Every key is optional; missing ones take the SimulationConfig defaults.
// Unknown keys are rejected so typos do not pass silently.

SimulationConfig parse_config(const std::string& json_text);
std::string dump_config(const SimulationConfig& config);

AcquisitionGeometry parse_geometry(const std::string& json_text);
std::string dump_geometry(const AcquisitionGeometry& geom);

SimulationConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const SimulationConfig& config);

/// Accepts either a bare geometry object or a simulation config.
AcquisitionGeometry load_geometry(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tomobss
