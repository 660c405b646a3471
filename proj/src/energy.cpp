#include "bhgs/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "util.hpp"

namespace bhgs {

namespace {

bool even_integer(double q) { return q == std::floor(q) && std::fmod(q, 2.0) == 0.0; }

double sum_vec(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

Field nonlinear_term(const Field& u, double q) {
  const Grid& g = u.grid();
  auto fine = g.to_refined(u.spectrum());
  for (auto& v : fine) v = signed_pow(v, q);
  return Field::from_spectrum(g, g.from_refined(fine));
}

double lq_difference(const Field& un, const Field& u, double q) {
  const Grid& g = u.grid();
  const auto a = g.to_refined(un.spectrum());
  const auto b = g.to_refined(u.spectrum());
  const Field diff = un - u;
  const auto d = g.to_refined(diff.spectrum());
  std::vector<double> terms(a.size());
  if (even_integer(q)) {
    const int qi = int(q);
    for (std::size_t i = 0; i < a.size(); ++i) {
      // a^q - b^q = (a - b) h with h = sum_{j<q} a^j b^{q-1-j}, built by the recursion
      // h_k = a h_{k-1} + b^k.
      double h = 1.0, bk = 1.0;
      for (int k = 1; k < qi; ++k) {
        bk *= b[i];
        h = a[i] * h + bk;
      }
      const double s = h;
      terms[i] = d[i] * s;
    }
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = abs_pow(a[i], q) - abs_pow(b[i], q);
  }
  return sum_vec(terms) * g.refined().cell_volume();
}

EnergyFunctional::EnergyFunctional(const Grid& g, const Potential& V, double a)
    : EnergyFunctional(g, V.sample(g), a) {}

EnergyFunctional::EnergyFunctional(const Grid& g, Field V_samples, double a)
    : grid_(g), V_(std::move(V_samples)), a_(a), q_(critical_power(g.dim())) {
  if (!V_.grid().same_as(g)) throw std::invalid_argument("potential samples live on another grid");
  if (!std::isfinite(a)) throw std::invalid_argument("coupling must be finite");
}

EnergyBreakdown EnergyFunctional::breakdown(const Field& u) const {
  EnergyBreakdown e;
  e.a = a_;
  e.q = q_;
  e.kinetic = u.bilap_energy();
  e.potential = V_.dot(u.hadamard(u));
  e.nonlinear = u.lq_integral(q_);
  e.total = e.kinetic + e.potential - a_ * e.nonlinear;
  return e;
}

double EnergyFunctional::difference(const Field& un, const Field& u) const {
  const Field d = un - u;
  const Field s = un + u;
  // K(un) - K(u) = <Lap^2 d, s>, evaluated on coefficients.
  const auto k4 = grid_.symbol_k4();
  const auto w = grid_.multiplicity();
  const auto& cd = d.spectrum();
  const auto& cs = s.spectrum();
  double dk = 0;
  for (std::size_t i = 0; i < cd.size(); ++i)
    dk += w[i] * k4[i] * (cd[i].real() * cs[i].real() + cd[i].imag() * cs[i].imag());
  dk *= grid_.box_volume();
  double dv = 0;
  const auto vs = V_.values();
  for (std::size_t i = 0; i < vs.size(); ++i) dv += vs[i] * d[i] * s[i];
  dv *= grid_.cell_volume();
  const double dn = a_ != 0 ? lq_difference(un, u, q_) : 0.0;
  return dk + dv - a_ * dn;
}

Field EnergyFunctional::gradient(const Field& u) const {
  Field g = u.bilap() * 2.0 + V_.hadamard(u) * 2.0;
  if (a_ != 0) g = g - nonlinear_term(u, q_) * (a_ * q_);
  return g;
}

std::function<Field(const Field&)> EnergyFunctional::hessian_at(const Field& u) const {
  // |Pu|^{q-2} on the refined grid, reused for every product.
  auto w = grid_.to_refined(u.spectrum());
  for (auto& v : w) v = abs_pow(v, q_ - 2.0);
  const double c = a_ * q_ * (q_ - 1.0);
  return [this, w = std::move(w), c](const Field& v) {
    Field h = v.bilap() * 2.0 + V_.hadamard(v) * 2.0;
    if (c != 0) {
      auto fv = grid_.to_refined(v.spectrum());
      for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= w[i];
      h = h - Field::from_spectrum(grid_, grid_.from_refined(fv)) * c;
    }
    return h;
  };
}

EnergyBreakdown energy(const Field& u, const Potential& V, double a) {
  return EnergyFunctional(u.grid(), V, a).breakdown(u);
}

Field project_tangent(const Field& v, const Field& u) {
  const double uu = u.dot(u);
  if (!(uu > 0)) throw std::invalid_argument("cannot project against a zero field");
  return v - u * (v.dot(u) / uu);
}

Field energy_gradient(const Field& u, const Potential& V, double a) {
  return EnergyFunctional(u.grid(), V, a).gradient(u);
}

Field constrained_gradient(const Field& u, const Potential& V, double a) {
  return project_tangent(energy_gradient(u, V, a), u);
}

double gn_quotient(const Field& u) {
  const double q = critical_power(u.grid().dim());
  const double N = u.lq_integral(q);
  if (!(N > 0)) throw std::invalid_argument("gn_quotient of a zero field");
  return u.bilap_energy() * std::pow(u.l2_norm_sq(), 0.5 * (q - 2.0)) / N;
}

ElFit el_residual(const Field& u) {
  const double q = critical_power(u.grid().dim());
  const Field b = u.bilap();
  const Field n = nonlinear_term(u, q);
  const double uu = u.dot(u), nn = n.dot(n), un = u.dot(n);
  const double ub = u.dot(b), nb = n.dot(b), bb = b.dot(b);
  if (!(uu > 0)) throw std::domain_error("el_residual of a zero field");
  // minimize |b + c1 u - c2 n|^2: [uu -un; -un nn] [c1; c2] = [-ub; nb]
  const double det = uu * nn - un * un;
  if (!(det > 1e-10 * uu * nn) || !(bb > 0))
    throw std::domain_error("el_residual: u and |u|^{q-2}u are collinear; fit is degenerate");
  const double c1 = (-ub * nn + un * nb) / det;
  const double c2 = (uu * nb - un * ub) / det;
  const Field r = b + u * c1 - n * c2;
  return {c1, c2, std::sqrt(r.dot(r) / bb)};
}

double chemical_potential(const Field& u, const Potential& V, double a) {
  const EnergyFunctional E(u.grid(), V, a);
  return 0.5 * E.gradient(u).dot(u);
}

double stationarity_residual(const Field& u, const Potential& V, double a) {
  const EnergyFunctional E(u.grid(), V, a);
  const Field h = E.gradient(u) * 0.5;
  const double mu = h.dot(u);
  const Field r = h - u * mu;
  return std::sqrt(r.dot(r));
}

double scaled_energy_identity_check(const Field& u, double a, double l) {
  const double q = critical_power(u.grid().dim());
  const EnergyFunctional E(u.grid(), Potential::zero(), a);
  const double lhs = E.value(dilate(u, l));
  const double rhs = std::pow(l, 4) * (u.bilap_energy() - a * u.lq_integral(q));
  return std::abs(lhs - rhs);
}

}  // namespace bhgs
