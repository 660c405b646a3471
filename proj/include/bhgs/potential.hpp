#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bhgs/field.hpp"

namespace bhgs {

/// Confining nonnegative potentials, potentials whose negative part splits into
/// L^{p1} + L^{p2} pieces with a negative infimum, or neither.
enum class PotentialClass { V1, V2, Neither };
std::string to_string(PotentialClass c);

/// External potential built from a few closed-form families.
class Potential {
 public:
  enum class Family { Zero, Harmonic, GaussianWell, PowerWell, Sum };

  static Potential zero();
  /// omega |x|^2. omega = 0 collapses to Zero; omega < 0 is rejected.
  static Potential harmonic(double omega);
  /// -depth exp(-|x - center|^2 / width^2), depth > 0, width > 0.
  static Potential gaussian_well(double depth, double width, Point center = {0.0, 0.0});
  /// -depth |x - center|^{-alpha}, depth > 0, alpha > 0.
  static Potential power_well(double depth, double alpha, Point center = {0.0, 0.0});
  static Potential sum(std::vector<Potential> terms);

  /// {"family": "gaussian_well", "depth": 1.0, "width": 1.0, "center": [0.0]}, "harmonic"
  /// with "strength", "power_well" with "depth", "exponent", "center", "sum" with "terms",
  /// or "zero". Throws std::invalid_argument with a description on malformed input.
  static Potential from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Family family() const { return family_; }
  const std::vector<Potential>& terms() const { return terms_; }
  double strength() const { return a_; }  ///< omega or depth
  double width() const { return b_; }      ///< width or exponent
  const Point& center() const { return center_; }

  /// Pointwise value (d-dimensional). Singular points of PowerWell give -inf.
  double value(const Point& x, int d) const;
  /// Grid samples. A PowerWell singularity sitting on a node is replaced by its cell average.
  Field sample(const Grid& g) const;

  /// Essential infimum over R^d: closed form for single families, numerical
  /// minimization for sums. -inf whenever a PowerWell is present.
  double ess_inf(int d) const;
  PotentialClass classify(int d) const;
  bool is_nonnegative() const;

  std::string describe() const;

 private:
  Family family_ = Family::Zero;
  double a_ = 0;
  double b_ = 0;
  Point center_{0.0, 0.0};
  std::vector<Potential> terms_;
};

/// min{V,0} = v1 + v2 + v3 on the grid: v1 holds the deep values (|f| >= cut_level),
/// v2 the shallow tail (|f| < tail_level), v3 the bounded remainder.
struct PotentialSplit {
  Field v1_part;
  Field v2_part;
  Field v3_part;
  double p1;
  double p2;
  double cut_level;   ///< L
  double tail_level;  ///< eta
  double v1_norm;     ///< ||v1||_{L^p1}
  double v2_norm;     ///< ||v2||_{L^p2}
  double v3_sup;      ///< ||v3||_{L^inf}
};

/// Grid L^p norm.
double lp_norm(const Field& f, double p);

/// Splits min{V,0} with ||v1||_{p1} <= eps and ||v2||_{p2} <= eps, choosing the smallest
/// admissible cut level and the largest admissible tail level by bisection.
/// Requires max{1, d/4} < p1 < p2 and eps > 0; throws std::invalid_argument otherwise,
/// and std::runtime_error when no finite cut level meets the tolerance on this grid.
PotentialSplit level_split(const Potential& V, const Grid& g, double p1, double p2, double eps);

/// Constant C with eps * int |Lap u|^2 + int V |u|^2 >= -C for every unit-mass grid field.
/// Built from level splits of min{V,0} and numerically computed operator norms of
/// multiplication by |v1|, |v2| against the (1 + |k|^4)^{1/2} weight, padded by 1.1.
/// Nonnegative V gives 0. Non-increasing in eps by construction.
double sobolev_lower_bound(const Potential& V, const Grid& g, double eps, double p1 = 2.0,
                           double p2 = 4.0);

/// Top eigenvalue of (1 + |k|^4)^{-1/2} m (1 + |k|^4)^{-1/2} for a pointwise nonnegative
/// multiplier m, by power iteration.
double weighted_multiplier_norm(const Field& m);

}  // namespace bhgs
