#include "bhgs/battery.hpp"
#include "bhgs/energy.hpp"
#include "bhgs/potential.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bhgs;
using bhgs::test::rel;

TEST_CASE("values") {
  CHECK(Potential::zero().value({1.3, 0.0}, 1) == 0);
  CHECK(Potential::harmonic(1).value({2.0, 0.0}, 1) == 4);
  CHECK(Potential::harmonic(1).value({1.0, 2.0}, 2) == 5);
  CHECK(Potential::gaussian_well(1, 1).value({0.0, 0.0}, 1) == -1);
  CHECK(Potential::gaussian_well(1, 1).value({1.0, 0.0}, 1) == doctest::Approx(-std::exp(-1.0)));
  CHECK(Potential::gaussian_well(2, 0.5, {1.0, 0.0}).value({1.5, 0.0}, 1) == doctest::Approx(-2 * std::exp(-1.0)));
  const auto s = Potential::sum({Potential::harmonic(1), Potential::gaussian_well(1, 1)});
  CHECK(s.value({1.0, 0.0}, 1) == doctest::Approx(1 - std::exp(-1.0)));
  const auto p = Potential::power_well(1, 0.5);
  CHECK(p.value({4.0, 0.0}, 1) == doctest::Approx(-0.5));
}

TEST_CASE("sampling") {
  const Grid g = Grid::make(1, 64, 4);
  CHECK(Potential::zero().sample(g).l2_norm_sq() == 0);
  const Field h = Potential::harmonic(2).sample(g);
  CHECK(h[10] == doctest::Approx(2 * g.coordinate(10) * g.coordinate(10)));
  // The power well is singular at its center; the node there gets the cell average.
  const Field p = Potential::power_well(1, 0.5).sample(g);
  for (double x : p.values()) CHECK(std::isfinite(x));
  CHECK(p[32] < p[31]);
}

TEST_CASE("essential infimum") {
  CHECK(Potential::zero().ess_inf(1) == 0);
  CHECK(Potential::harmonic(2).ess_inf(1) == 0);
  CHECK(Potential::gaussian_well(1.5, 1).ess_inf(1) == -1.5);
  CHECK(Potential::power_well(1, 0.5).ess_inf(1) == -INFINITY);
  // x^2 - e^{-x^2} has its minimum -1 at the origin.
  const auto s = Potential::sum({Potential::harmonic(1), Potential::gaussian_well(1, 1)});
  CHECK(s.ess_inf(1) == doctest::Approx(-1).epsilon(1e-12));
  // Off-center well on a harmonic trap: compare with an independent scan + Brent.
  const auto t = Potential::sum({Potential::harmonic(0.3), Potential::gaussian_well(2, 0.7, {1.5, 0.0})});
  const double ref = test::scan_minimum([&](double x) { return t.value({x, 0.0}, 1); }, -10, 10);
  CHECK(rel(t.ess_inf(1), ref) < 1e-10);
  // Grid minimum is within dx-resolution of the analytic value.
  const Grid g = Grid::make(1, 512, 16);
  const Field v = t.sample(g);
  const double grid_min = *std::min_element(v.values().begin(), v.values().end());
  CHECK(grid_min >= t.ess_inf(1) - 1e-12);
  CHECK(grid_min - t.ess_inf(1) < 10 * g.dx() * g.dx());
  // Two overlapping wells without a trap: the minimum sits between the wells' centers.
  const auto u = Potential::sum({Potential::gaussian_well(1, 1), Potential::gaussian_well(2, 1, {1.0, 0.0})});
  const double ref_u = test::scan_minimum([&](double x) { return u.value({x, 0.0}, 1); }, -20, 20);
  CHECK(rel(u.ess_inf(1), ref_u) < 1e-10);
  CHECK(u.ess_inf(1) < -2);
}

TEST_CASE("classification") {
  CHECK(Potential::harmonic(1).classify(1) == PotentialClass::V1);
  CHECK(Potential::harmonic(1).classify(2) == PotentialClass::V1);
  CHECK(Potential::zero().classify(1) == PotentialClass::Neither);
  CHECK(Potential::harmonic(0).classify(1) == PotentialClass::Neither);
  CHECK(Potential::gaussian_well(1, 1).classify(1) == PotentialClass::V2);
  CHECK(Potential::gaussian_well(1, 1).classify(2) == PotentialClass::V2);
  CHECK(Potential::power_well(1, 0.5).classify(1) == PotentialClass::V2);
  CHECK(Potential::power_well(1, 0.99).classify(1) == PotentialClass::V2);
  CHECK(Potential::power_well(1, 1.0).classify(1) == PotentialClass::Neither);
  CHECK(Potential::power_well(1, 1.9).classify(2) == PotentialClass::V2);
  CHECK(Potential::sum({Potential::harmonic(1), Potential::gaussian_well(1, 1)}).classify(1) ==
        PotentialClass::V2);
  CHECK(to_string(PotentialClass::V1) == "V1");
}

TEST_CASE("json round trip and validation") {
  const auto s = Potential::sum({Potential::harmonic(1), Potential::gaussian_well(1, 0.5, {0.25, 0.0})});
  const auto back = Potential::from_json(s.to_json());
  CHECK(back.value({0.3, 0.0}, 1) == s.value({0.3, 0.0}, 1));
  CHECK_THROWS_AS(Potential::from_json({{"family", "nope"}}), std::invalid_argument);
  CHECK_THROWS_AS(Potential::from_json({{"family", "gaussian_well"}, {"depth", 1}, {"width", -1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Potential::from_json({{"family", "harmonic"}, {"strength", -1}}), std::invalid_argument);
  CHECK_THROWS_AS(Potential::from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST_CASE("level_split") {
  const Grid g = Grid::make(1, 512, 16);
  SUBCASE("nonnegative potential splits into zeros") {
    const auto s = level_split(Potential::harmonic(1), g, 2, 4, 0.1);
    CHECK(s.v1_part.l2_norm_sq() == 0);
    CHECK(s.v2_part.l2_norm_sq() == 0);
    CHECK(s.v3_part.l2_norm_sq() == 0);
  }
  SUBCASE("generous tolerance puts everything in the L^p1 piece") {
    const auto s = level_split(Potential::gaussian_well(1, 1), g, 2, 4, 10);
    CHECK(s.cut_level == 0);
    CHECK(s.v2_part.l2_norm_sq() == 0);
    CHECK(s.v3_sup == 0);
    CHECK(s.v1_norm == doctest::Approx(std::pow(std::numbers::pi / 2, 0.25)).epsilon(1e-10));
  }
  SUBCASE("tight tolerance") {
    const auto V = Potential::gaussian_well(1, 1);
    const auto s = level_split(V, g, 2, 4, 0.05);
    const Field neg = V.sample(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(s.v1_part[i] + s.v2_part[i] + s.v3_part[i] == std::min(neg[i], 0.0));
    CHECK(s.v1_norm <= 0.05);
    CHECK(s.v2_norm <= 0.05);
    CHECK(lp_norm(s.v1_part, 2) == doctest::Approx(s.v1_norm));
    CHECK(lp_norm(s.v2_part, 4) == doctest::Approx(s.v2_norm));
    CHECK(std::isfinite(s.v3_sup));
  }
  CHECK_THROWS_AS(level_split(Potential::gaussian_well(1, 1), g, 1.0, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(level_split(Potential::gaussian_well(1, 1), g, 3, 2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(level_split(Potential::gaussian_well(1, 1), g, 2, 4, 0.0), std::invalid_argument);
}

TEST_CASE("sobolev_lower_bound") {
  const Grid g = Grid::make(1, 256, 16);
  CHECK(sobolev_lower_bound(Potential::harmonic(1), g, 0.1) == 0);
  CHECK(sobolev_lower_bound(Potential::zero(), g, 0.01) == 0);
  const auto V = Potential::gaussian_well(1, 1);
  for (double eps : {0.1, 0.01}) {
    const double C = sobolev_lower_bound(V, g, eps);
    CAPTURE(eps);
    CHECK(std::isfinite(C));
    CHECK(C <= 1.0 + 1e-12);  // never worse than the trivial bound -ess inf V
    CHECK(C >= test::sharp_sobolev_constant(V, g, eps) - 1e-9);
    const EnergyFunctional E(g, V, 0.0);
    for (const Field& u : random_battery(g, 5, 100)) {
      const auto b = E.breakdown(u);
      CHECK(eps * b.kinetic + b.potential >= -C);
    }
  }
}
