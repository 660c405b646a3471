#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "bhgs/gn.hpp"

namespace bhgs {

/// A coupling given either literally or as a multiple of a_star ("0.5*astar").
struct Coupling {
  std::optional<double> literal;
  double factor = 0;  ///< used when literal is empty

  static Coupling parse(const nlohmann::json& j);
  bool needs_astar() const { return !literal.has_value(); }
  double resolve(std::optional<double> a_star) const;
  std::string describe() const;
};

/// Thrown for anything that is wrong with the configuration (exit status 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduleSpec {
  double start = 0.5;  ///< first value of 1 - a/a_star
  int count = 8;
  double ratio = 0.5;
};

struct SweepChecks {
  double energy_gap_tolerance = 0.05;
  double h2_tolerance = 0.05;
  double gn_low = 0.95;
  double gn_high = 1.001;
  int kinetic_tail = 5;
  /// Repeat the sweep at this many points per axis and compare (0 disables).
  int cross_check_n = 0;
  double cross_check_tolerance = 1e-3;
};

struct RunConfig {
  int d = 1;
  int n = 512;
  double half_width = 16;
  nlohmann::json potential = {{"family", "zero"}};
  SolveConfig solver;
  /// "dilated_q" initials need the GN profile; resolved when the command runs.
  std::optional<double> dilated_q_scale;
  GNOptions gn;
  std::optional<std::filesystem::path> gn_artifact;
  Coupling solve_a{std::nullopt, 0.5};
  std::optional<double> trial_eps;  ///< solve: also report the trial-state upper bound
  Point trial_center{0.0, 0.0};
  ScheduleSpec schedule;
  SweepChecks sweep_checks;
  Coupling check_a{std::nullopt, 0.5};
  int check_fields = 50;
  int check_gn_fields = 1000;
  int check_directions = 20;
  bool inject_gradient_sign_error = false;
  std::filesystem::path output_dir = "bhgs_out";
  std::uint64_t seed = 1;
  int threads = 0;
  nlohmann::json raw;  ///< the document as read, with defaults filled in

  /// Throws ConfigError with a message naming the offending key.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  /// Grid-level validation (runs Grid::make's checks).
  Grid make_grid() const;
  Potential make_potential() const;
  nlohmann::json to_json() const;
};

}  // namespace bhgs
