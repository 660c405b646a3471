#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bhgs/gn.hpp"

namespace bhgs {

struct SweepRecord {
  double a = 0;
  double gap_to_threshold = 0;  ///< 1 - a / a_star
  double energy = 0;
  double kinetic = 0;
  double eps = 0;               ///< kinetic^{-1/4}
  Point center{0.0, 0.0};       ///< x_n: where u concentrates
  double h2_dist_to_Q = 0;      ///< after optimizing over translations
  double gn_value = 0;          ///< a_star * int |w|^q
  double mu = 0;
  double grad_residual = 0;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIters;
  bool resolved = false;        ///< eps > 4 dx
  std::optional<Field> u;       ///< minimizer
  std::optional<Field> w;       ///< rescaled, recentered, GN-normalized profile
};

struct SweepOptions {
  RecenterMode recenter = RecenterMode::Centroid;
  bool keep_fields = true;
  /// Called after each record, e.g. for progress output.
  std::function<void(const SweepRecord&)> on_record;
};

/// a_star (1 - start ratio^j), j = 0..count-1.
std::vector<double> geometric_schedule(double a_star, double start, int count, double ratio);

/// Warm-started continuation along an increasing schedule of couplings below a_star.
/// The first solve uses cfg.init; later ones start from the previous minimizer.
/// Solver failures are recorded in the status; the sweep always runs to the end.
std::vector<SweepRecord> sweep(const Grid& g, const Potential& V, const std::vector<double>& schedule,
                               const SolveConfig& cfg, const GNResult& gn,
                               const SweepOptions& opt = {});

struct TranslationFit {
  double distance;
  Point shift;  ///< distance = h2_distance(w, translate(Q, shift))
};
/// H2 distance between w and the best translate of Q (both on the same grid).
TranslationFit h2_distance_translated(const Field& w, const Field& Q);

struct EnergyLimitCheck {
  double gap;                 ///< |E - ess inf V| at the last resolved record
  bool monotone;              ///< gaps strictly shrinking over the last 3 resolved records
  bool pass;                  ///< monotone && gap < tolerance
  std::vector<double> gaps;   ///< per resolved record
};
/// Throws std::invalid_argument with fewer than 3 resolved records.
EnergyLimitCheck energy_limit_check(const std::vector<SweepRecord>& records, const Potential& V,
                                    int d, double tolerance = 0.05);

/// a_star int |w_n|^q for every resolved record.
std::vector<double> gn_sequence_check(const std::vector<SweepRecord>& records, const GNResult& gn);

struct CrossCheck {
  double max_discrepancy;  ///< max over records and scalars of |x - y| / max(1, |x|)
  std::string worst;       ///< which scalar at which record
};
/// Compares two sweeps of the same schedule at different resolutions, resolved records only.
CrossCheck sweep_cross_check(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b);

}  // namespace bhgs
