#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "monoiter/kernels.hpp"
#include "monoiter/scenario.hpp"

namespace monoiter::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< hypothesis, verification or convergence failure
inline constexpr int kExitInput = 2;    ///< unreadable or invalid input

/// Outcome of the four hypothesis checks shared by `check` and `solve`.
struct CheckResults {
  Alpha1Report alpha1;
  Alpha2Report alpha2;
  std::optional<BracketReport> bracket;  ///< absent when a > 0 fails
  bool passed = false;
  nlohmann::json report;
};

CheckResults run_checks(const ScenarioModel& model);

struct SolveFlags {
  std::optional<double> tol;
  std::optional<int> max_steps;
  Execution execution = Execution::serial;
  /// Adds wall_time to summary.json; off by default so artifacts are reproducible.
  bool record_time = false;
};

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err,
              const std::optional<std::filesystem::path>& report_path = {});

/// Writes solution.json, solution.csv, trace.csv and summary.json into out_dir.
int cmd_solve(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
              const SolveFlags& flags, std::ostream& out, std::ostream& err);

int cmd_spectrum(const std::filesystem::path& scenario, int k, std::ostream& out,
                 std::ostream& err);

int cmd_mesh_info(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err,
                  const std::optional<std::filesystem::path>& export_path = {});

/// Command-line entry point: check | solve | spectrum | mesh-info.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monoiter::app
