#pragma once

// Minimization of a smooth functional over the unit-mass sphere {||u||_2 = 1}.

#include <functional>
#include <vector>

#include "bhgs/field.hpp"
#include "bhgs/groundstate.hpp"

namespace bhgs::detail {

class SphereObjective {
 public:
  virtual ~SphereObjective() = default;
  virtual double value(const Field& u) const = 0;
  /// value(un) - value(u), computed without cancellation.
  virtual double difference(const Field& un, const Field& u) const = 0;
  /// Euclidean L2 gradient.
  virtual Field gradient(const Field& u) const = 0;
  /// Euclidean second derivative at u.
  virtual std::function<Field(const Field&)> hessian_at(const Field& u) const = 0;
};

struct DescentOptions {
  SolveMethod method = SolveMethod::Newton;
  double step0 = 0.5;
  double shrink = 0.5;
  double grow = 1.2;
  double tol_grad = 1e-7;
  int max_iters = 2000;
  /// Stop with DivergedBelowFloor once the objective drops below this value.
  double floor = -1e300;
  /// Keep doubling an accepted step while the objective keeps decreasing.
  bool expand_steps = false;
  int max_cg = 200;
};

struct DescentOutcome {
  Field u;
  double value;
  double grad_residual;
  int iterations;
  SolveStatus status;
  std::vector<IterationRecord> log;
};

DescentOutcome minimize_on_sphere(const SphereObjective& f, Field u0, const DescentOptions& opt);

}  // namespace bhgs::detail
