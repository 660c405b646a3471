#pragma once

#include <functional>

#include "bhgs/field.hpp"
#include "bhgs/potential.hpp"

namespace bhgs {

struct EnergyBreakdown {
  double kinetic = 0;    ///< int |Lap u|^2
  double potential = 0;  ///< int V u^2
  double nonlinear = 0;  ///< int |u|^q
  double total = 0;      ///< kinetic + potential - a * nonlinear
  double a = 0;
  double q = 0;
};

/// The energy int |Lap u|^2 + int V u^2 - a int |u|^q at the critical power
/// q = 2(1 + 4/d), with V sampled once on the grid.
///
/// The nonlinear integral is taken on the 2x refined grid (see Field::lq_integral);
/// gradients and Hessians below are exact derivatives of this discrete energy.
class EnergyFunctional {
 public:
  EnergyFunctional(const Grid& g, const Potential& V, double a);
  /// Directly from samples (must live on g).
  EnergyFunctional(const Grid& g, Field V_samples, double a);

  const Grid& grid() const { return grid_; }
  const Field& potential_samples() const { return V_; }
  double coupling() const { return a_; }
  double power() const { return q_; }

  EnergyBreakdown breakdown(const Field& u) const;
  double value(const Field& u) const { return breakdown(u).total; }
  /// value(un) - value(u) without cancellation: each term is factored through un - u.
  double difference(const Field& un, const Field& u) const;
  /// L2 gradient 2 Lap^2 u + 2 V u - a q N(u) with N(u) the dealiased |u|^{q-2} u.
  Field gradient(const Field& u) const;
  /// Second derivative at u applied to directions.
  std::function<Field(const Field&)> hessian_at(const Field& u) const;

 private:
  Grid grid_;
  Field V_;
  double a_;
  double q_;
};

/// Dealiased |u|^{q-2} u: evaluated on the refined grid and projected back, so that
/// <nonlinear_term(u), v> is the derivative of (1/q) lq_integral along v.
Field nonlinear_term(const Field& u, double q);

/// Refined-grid difference lq_integral(un) - lq_integral(u), accurate for nearby fields.
/// Exact polynomial factorization for even integer q.
double lq_difference(const Field& un, const Field& u, double q);

EnergyBreakdown energy(const Field& u, const Potential& V, double a);

/// Gradient with its component along u removed; <G, u> = 0.
Field constrained_gradient(const Field& u, const Potential& V, double a);
/// Unprojected L2 gradient.
Field energy_gradient(const Field& u, const Potential& V, double a);

/// Removes the component of v along u.
Field project_tangent(const Field& v, const Field& u);

/// J(u) = K(u) M(u)^{(q-2)/2} / N(u). Throws std::invalid_argument if N(u) = 0.
double gn_quotient(const Field& u);

struct ElFit {
  double c1;
  double c2;
  double residual;  ///< ||Lap^2 u + c1 u - c2 N(u)|| / ||Lap^2 u||
};
/// Least-squares fit of Lap^2 u + c1 u - c2 |u|^{q-2} u = 0. Throws std::domain_error when
/// u and |u|^{q-2}u are (numerically) collinear.
ElFit el_residual(const Field& u);

/// <u, Lap^2 u + V u - (a q / 2) N(u)> for unit-mass u.
double chemical_potential(const Field& u, const Potential& V, double a);

/// ||Lap^2 u + V u - (a q/2) N(u) - mu u|| for the multiplier mu above.
double stationarity_residual(const Field& u, const Potential& V, double a);

/// |E(dilate(u, l)) - l^4 (K(u) - a N(u))| with V = 0.
double scaled_energy_identity_check(const Field& u, double a, double l);

}  // namespace bhgs
