#include "bhgs/battery.hpp"
#include "bhgs/energy.hpp"
#include "bhgs/groundstate.hpp"
#include "support.hpp"

using namespace bhgs;
using bhgs::test::gaussian;
using bhgs::test::rel;

namespace {
const double kPi = std::numbers::pi;
Field unit_cos(const Grid& g) {
  return Field::from_function(g, [](const Point& x) { return std::sqrt(1.0 / kPi) * std::cos(x[0]); });
}
}  // namespace

TEST_CASE("energy on trivial states") {
  const Grid g = Grid::make(1, 64, kPi);
  const auto c = energy(Field::constant(g, 1.0 / std::sqrt(2 * kPi)), Potential::zero(), 1.0);
  CHECK(rel(c.total, -std::pow(2 * kPi, -4)) < 1e-12);
  CHECK(c.kinetic == doctest::Approx(0).epsilon(1e-28));
  const auto e = energy(unit_cos(g), Potential::zero(), 0.0);
  CHECK(rel(e.total, 1.0) < 1e-12);
  CHECK(e.total == e.kinetic);
}

TEST_CASE("energy of a Gaussian in a harmonic trap") {
  // u = pi^{-1/4} e^{-x^2/2}: K = 3/4, int x^2 u^2 = 1/2, int u^10 = pi^{-2} / sqrt(5)
  const double exact = 0.75 + 0.5 - 0.5 / (kPi * kPi * std::sqrt(5.0));
  const auto V = Potential::harmonic(1);
  const auto at = [&](int n) { return energy(renormalize_mass(gaussian(Grid::make(1, n, 16))), V, 0.5); };
  const auto coarse = at(512);
  CHECK(std::abs(coarse.total - at(4096).total) < 1e-9);
  CHECK(rel(coarse.total, exact) < 1e-11);
  CHECK(coarse.total == doctest::Approx(coarse.kinetic + coarse.potential - 0.5 * coarse.nonlinear).epsilon(1e-15));
  CHECK(coarse.kinetic >= 0);
  CHECK(coarse.nonlinear >= 0);
}

TEST_CASE("energy difference agrees with direct subtraction") {
  const Grid g = Grid::make(1, 256, 16);
  const auto fields = random_battery(g, 2, 4);
  const EnergyFunctional E(g, Potential::gaussian_well(1, 1), 7.0);
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const double direct = E.value(fields[i]) - E.value(fields[0]);
    CHECK(std::abs(E.difference(fields[i], fields[0]) - direct) < 1e-12 * (1 + std::abs(direct)));
  }
  // lq_difference keeps its relative accuracy where plain subtraction cannot.
  const Field u = fields[0];
  const Field v = u + fields[1] * 1e-9;
  const double dn = lq_difference(v, u, 10);
  const double first_order = 10 * nonlinear_term(u, 10).dot(fields[1] * 1e-9);
  CHECK(rel(dn, first_order) < 1e-6);
}

TEST_CASE("scaling identity with V = 0") {
  const Grid g = Grid::make(1, 512, 16);
  const Field gau = renormalize_mass(gaussian(g));
  CHECK(scaled_energy_identity_check(gau, 3.0, 1.0) < 1e-15);
  CHECK(scaled_energy_identity_check(gau, 3.0, 2.0) < 1e-8);
  for (const Field& u : random_battery(g, 9, 10)) {
    const auto b = energy(u, Potential::zero(), 3.0);
    CHECK(scaled_energy_identity_check(u, 3.0, 1.5) < 1e-8 * std::pow(1.5, 4) * std::abs(b.total));
  }
}

TEST_CASE("gradient") {
  const Grid g = Grid::make(1, 256, 16);
  const auto V = Potential::gaussian_well(1, 1);
  const double a = 8.0;
  const auto fields = random_battery(g, 4, 3);
  for (const Field& u : random_battery(g, 13, 10))
    CHECK(std::abs(constrained_gradient(u, V, a).dot(u)) < 1e-12 * (1 + std::abs(energy_gradient(u, V, a).dot(u))));

  const EnergyFunctional E(g, V, a);
  const Field& u = fields[0];
  const Field& phi = fields[1];
  const double exact = energy_gradient(u, V, a).dot(phi);
  auto err = [&](double h) { return std::abs(E.difference(u + phi * h, u - phi * h) / (2 * h) - exact); };
  const double ratio = err(1e-3) / err(1e-4);
  CHECK(ratio > 60);
  CHECK(ratio < 140);

  // Second derivative against a difference of gradients.
  const auto H = E.hessian_at(u);
  const double h = 1e-5;
  const Field fd = (E.gradient(u + phi * h) - E.gradient(u - phi * h)) * (0.5 / h);
  const Field Hv = H(phi);
  CHECK(std::sqrt((fd - Hv).dot(fd - Hv)) < 1e-6 * std::sqrt(Hv.dot(Hv)));
}

TEST_CASE("GN quotient") {
  const Grid g = Grid::make(1, 512, 16);
  const Field u = gaussian(g);
  CHECK(rel(gn_quotient(u), 0.75 * std::sqrt(5.0) * kPi * kPi) < 1e-9);
  CHECK(gn_quotient(u * 3.7) == doctest::Approx(gn_quotient(u)).epsilon(1e-14));
  for (const Field& v : random_battery(g, 21, 5))
    for (double l : {0.5, 0.8, 1.6, 2.0}) CHECK(rel(gn_quotient(dilate(v, l)), gn_quotient(v)) < 1e-8);
  CHECK_THROWS_AS(gn_quotient(Field::zeros(g)), std::invalid_argument);
}

TEST_CASE("Euler-Lagrange fit") {
  const Grid g = Grid::make(1, 512, 16);
  CHECK_THROWS_AS(el_residual(Field::constant(g, 0.1)), std::domain_error);
  const Field& Q = test::gn_1d().Q;
  const auto fit = el_residual(Q);
  CHECK(fit.residual < 1e-6);
  CHECK(fit.c1 > 0);
  CHECK(fit.c2 > 0);
  const auto neg = el_residual(-Q);
  CHECK(neg.c1 == doctest::Approx(fit.c1));
  CHECK(neg.c2 == doctest::Approx(fit.c2));
}

TEST_CASE("chemical potential") {
  const Grid g = Grid::make(1, 64, kPi);
  CHECK(rel(chemical_potential(unit_cos(g), Potential::zero(), 0.0), 1.0) < 1e-12);
  const Grid big = Grid::make(1, 256, 12);
  const auto V = Potential::harmonic(1);
  const Field u = renormalize_mass(gaussian(big));
  const auto b = energy(u, V, 0.0);
  CHECK(rel(chemical_potential(u, V, 0.0), b.kinetic + b.potential) < 1e-12);

  SolveConfig cfg;
  const auto r = solve(Grid::make(1, 512, 16), V, 4.0, cfg);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(stationarity_residual(r.minimizer, V, 4.0) < 1e-6);
  CHECK(rel(r.mu, chemical_potential(r.minimizer, V, 4.0)) < 1e-12);
}
