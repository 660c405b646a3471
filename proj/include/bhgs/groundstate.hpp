#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bhgs/energy.hpp"

namespace bhgs {

enum class SolveMethod {
  Gradient,        ///< projected gradient, backtracking
  Preconditioned,  ///< gradient divided by (c + |k|^4), backtracking
  Newton,          ///< truncated Newton-CG on the sphere, backtracking
};

enum class SolveStatus {
  Converged,
  DivergedBelowFloor,
  MaxIters,
  /// No decrease found along the search direction while the gradient is still above
  /// tolerance: the iteration sits at the round-off floor of the energy.
  Stalled,
};

std::string to_string(SolveMethod m);
std::string to_string(SolveStatus s);
SolveMethod parse_method(const std::string& s);
SolveStatus parse_status(const std::string& s);

struct InitGaussian {
  double width = 1.0;
  /// Centered at the potential minimum when unset.
  std::optional<Point> center;
};
struct InitConstant {};
struct InitFile {
  std::string path;
};
/// l^{d/2} profile(l x), resampled onto the solve grid.
struct InitDilatedProfile {
  Field profile;
  double l = 1.0;
};
struct InitWarmStart {
  Field field;
};
using SolveInit = std::variant<InitGaussian, InitConstant, InitFile, InitDilatedProfile, InitWarmStart>;

struct SolveConfig {
  double step0 = 0.5;
  double shrink = 0.5;
  double grow = 1.2;
  double tol_grad = 1e-7;
  int max_iters = 2000;
  double energy_floor = -1e3;
  SolveMethod method = SolveMethod::Newton;
  SolveInit init = InitGaussian{};

  /// Throws std::invalid_argument listing the violated constraint.
  void validate() const;
};

struct IterationRecord {
  int iter;
  double energy;
  double grad_residual;
  double step_size;
};

struct SolveResult {
  Field minimizer;
  EnergyBreakdown breakdown;
  double mu;
  double grad_residual;
  int iterations;
  SolveStatus status;
  std::string init_description;
  std::vector<IterationRecord> log;
};

/// Builds the initial unit-mass field described by init on g.
Field make_initial(const Grid& g, const Potential& V, const SolveInit& init);
std::string describe(const SolveInit& init);

/// Minimizes the energy over unit-mass fields. Divergence below the floor and
/// iteration exhaustion are reported in the status, not thrown.
SolveResult solve(const Grid& g, const Potential& V, double a, const SolveConfig& cfg);

/// Non-existence witness search: solves from l^{d/2} Q(l x) for each scale in turn and
/// returns the first run that drops below cfg.energy_floor, or the last run if none does.
SolveResult solve_from_dilated_profiles(const Grid& g, const Potential& V, double a,
                                        const SolveConfig& cfg, const Field& Q,
                                        const std::vector<double>& scales = {1, 2, 4, 8});

/// Energy of the concentrated trial state l^{d/2} phi(l (x - x0)), where phi is Q cut off
/// smoothly at radius eps^{-1/6} and renormalized, l = eps^{-1/5}, eps = 1 - a/a_star
/// unless given. Q may live on a different grid; it is interpolated. Throws
/// std::invalid_argument when the cutoff radius exceeds Q's box or a >= a_star.
double trial_upper_bound(const Grid& g, const Potential& V, double a, double a_star,
                         const Field& Q, Point x0, std::optional<double> eps = std::nullopt);

/// The trial state itself.
Field trial_state(const Grid& g, const Field& Q, double eps, Point x0);

}  // namespace bhgs
