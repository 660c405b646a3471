#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "bhgs/groundstate.hpp"

namespace bhgs {

struct GNOptions {
  int restarts = 4;
  /// 0 picks the hardware concurrency.
  int threads = 0;
  /// Center of the initial profiles.
  Point center{0.0, 0.0};
  /// Recenter and even-symmetrize between restarts.
  bool symmetrize = true;
  /// Also evaluate the minimum on the grid with n/2 points per axis.
  bool resolution_check = true;
};

struct GNResult {
  double a_star = 0;
  /// Minimizer with ||Q|| = ||Lap Q|| = 1.
  Field Q;
  /// a_star * int |Q|^q
  double nonlinear_check = 0;
  /// Euler-Lagrange constants of Q and the relative residual of the fit.
  ElFit el{};
  /// Residual of the fit after normalize_to_el (constants close to (1, 1)).
  ElFit el_normalized{};
  /// Norm of the projected gradient of log J at the returned minimizer.
  double grad_residual = 0;
  SolveStatus status = SolveStatus::MaxIters;
  /// (n, a_star at that n)
  std::vector<std::pair<int, double>> resolutions{};
  /// J reached by every restart, for the minimality log.
  std::vector<double> restart_values{};
};

/// Minimizes J(u) = K M^{(q-2)/2} / N by Newton descent of log K - log N over unit-mass
/// fields, from Gaussian initials of several widths, and returns the best minimizer in
/// the normalization ||Q|| = ||Lap Q|| = 1. Uses cfg's tolerance, iteration budget and method.
GNResult compute_gn(const Grid& g, const SolveConfig& cfg, const GNOptions& opt = {});

/// beta u(l x) with ||.|| = ||Lap .|| = 1. Throws std::invalid_argument when Lap u = 0.
Field normalize_gn(const Field& u);

/// mu u(x / lambda) with lambda = c1^{1/4}, mu = (c2/c1)^{1/(q-2)} from el_residual(u),
/// so that the result satisfies Lap^2 v + v - |v|^{q-2} v = 0 to the fit accuracy.
/// The result lives on u's grid with the box scaled by lambda (same n), which makes the
/// map exact. Throws std::domain_error unless c1, c2 > 0.
Field normalize_to_el(const Field& u);

/// Writes <dir>/<stem>.json and <dir>/<stem>_Q.bhf.
void save_gn(const std::filesystem::path& dir, const GNResult& r, const std::string& stem = "gn");
/// Reads the sidecar written by save_gn (Q path resolved relative to the sidecar).
GNResult load_gn(const std::filesystem::path& json_path);

}  // namespace bhgs
