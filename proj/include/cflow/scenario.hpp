#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cflow/dynamics.hpp"

namespace cflow {

/// Current scenario file format version.
inline constexpr int kScenarioVersion = 1;

struct OutputPaths {
  std::string trace;
  std::string snapshots;
};

/// One simulation run as described by a scenario file.
struct Scenario {
  std::string name;
  Domain domain;
  Potential potential;
  SchemeConfig config;
  InitialSpec initial;
  OutputPaths outputs;
};

Point parse_point(const nlohmann::json& j);
Domain parse_domain(const nlohmann::json& j);
Potential parse_potential(const nlohmann::json& j);

/// Strict parse: unknown keys, missing required keys, wrong types and a
/// version other than kScenarioVersion are InvalidConfig errors.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

/// Sample the scenario's initial state from its seed.
ParticleState initial_state(const Scenario& scenario);

}  // namespace cflow
