#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "monoiter/iteration.hpp"
#include "monoiter/nonlinearity.hpp"

namespace monoiter {

struct IcosphereSpec {
  int subdivisions = 0;
  double radius = 1.0;
};
struct TorusSpec {
  std::vector<GridAxis> dims;
};
struct OffFileSpec {
  std::string path;
};
using DomainSpec = std::variant<IcosphereSpec, TorusSpec, OffFileSpec>;

struct PowerSpec {
  double p = 1.0;
};
struct TableSpec {
  std::string path;
};
using NonlinearitySpec = std::variant<PowerSpec, TableSpec>;

/// A constant or an expression string in the coefficient grammar.
using CoefficientSpec = std::variant<double, std::string>;

struct SolverConfig {
  double tol = 1e-9;
  int max_steps = 500;
  double linear_tol = 1e-11;
};

/// A scenario file. Only "domain" is mandatory at parse time; the remaining
/// sections are required by the commands that need them (check, solve).
///
///   {
///     "domain": {"type": "icosphere", "subdivisions": 3, "radius": 1}
///             | {"type": "flat_torus", "dims": [{"cells": 8, "length": 1}, ...]}
///             | {"type": "off_file", "path": "mesh.off"},
///     "dimension": 3,
///     "coefficients": {"a": 2, "f": "0.5", "h": "0.5 + 0.1*z"},
///     "nonlinearity": {"F": {"type": "power", "p": 5},
///                      "H": {"type": "table", "path": "H.csv"}},
///     "q": 0.5,
///     "bracket": {"lower": 0.01, "upper": 1, "verification_tol": 1e-9},
///     "solver": {"tol": 1e-9, "max_steps": 500, "linear_tol": 1e-11}
///   }
///
/// Relative paths resolve against the scenario file's directory. Unknown keys
/// are rejected.
struct Scenario {
  DomainSpec domain;
  std::optional<int> dimension;
  std::optional<CoefficientSpec> a, f, h;
  std::optional<NonlinearitySpec> F, H;
  std::optional<double> q;
  std::optional<CoefficientSpec> lower, upper;
  std::optional<double> verification_tol;
  SolverConfig solver;
  std::filesystem::path base_dir;
};

Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

DomainPtr build_domain(const Scenario& scenario);
Field build_field(const CoefficientSpec& spec, const DomainPtr& domain);
ScalarNonlinearity build_nonlinearity(const NonlinearitySpec& spec,
                                      const std::filesystem::path& base_dir);

/// Everything check and solve need, built from a complete scenario.
struct ScenarioModel {
  DomainPtr domain;
  NonlinearProblem problem;
  Bracket bracket;
  /// The exponent bound for H in the growth check: scenario q, or the power of H.
  double q;
};

ScenarioModel build_model(const Scenario& scenario);

}  // namespace monoiter
