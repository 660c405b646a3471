#include <random>

#include "bhgs/battery.hpp"
#include "bhgs/energy.hpp"
#include "bhgs/field.hpp"
#include "support.hpp"

using namespace bhgs;
using bhgs::test::gaussian;
using bhgs::test::rel;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
Grid box_pi(int n = 64) { return Grid::make(1, n, std::numbers::pi); }
Field unit_cos(const Grid& g) {
  return Field::from_function(g, [](const Point& x) { return std::sqrt(2.0 / (2 * std::numbers::pi)) * std::cos(x[0]); });
}
}  // namespace

TEST_CASE("Gaussian closed forms, d = 1") {
  const Grid g = Grid::make(1, 512, 16);
  const Field u = gaussian(g);
  CHECK(rel(u.l2_norm_sq(), kSqrtPi) < 1e-12);
  CHECK(rel(u.l2_norm_sq_spectral(), kSqrtPi) < 1e-12);
  CHECK(rel(u.bilap_energy(), 0.75 * kSqrtPi) < 1e-11);
  CHECK(rel(u.h2_norm_sq(), 1.75 * kSqrtPi) < 1e-11);
  CHECK(rel(u.lq_integral(10), std::sqrt(std::numbers::pi / 5)) < 1e-12);
  CHECK(rel(u.lq_integral_nodal(10), std::sqrt(std::numbers::pi / 5)) < 1e-12);
}

TEST_CASE("Gaussian closed forms, d = 2") {
  // int e^{-r^2} = pi, int |Lap e^{-r^2/2}|^2 = 2 pi, int e^{-3 r^2} = pi / 3
  const Grid g = Grid::make(2, 128, 12);
  const Field u = gaussian(g);
  CHECK(rel(u.l2_norm_sq(), std::numbers::pi) < 1e-12);
  CHECK(rel(u.bilap_energy(), 2 * std::numbers::pi) < 1e-11);
  CHECK(rel(u.lq_integral(6), std::numbers::pi / 3) < 1e-12);
}

TEST_CASE("trivial norms") {
  const Grid g = box_pi();
  const Field c = Field::constant(g, 1.0 / std::sqrt(2 * std::numbers::pi));
  CHECK(rel(c.l2_norm_sq(), 1.0) < 1e-13);
  CHECK(c.bilap_energy() == doctest::Approx(0.0).epsilon(1e-28));
  CHECK(rel(c.h2_norm_sq(), 1.0) < 1e-13);
  CHECK(rel(c.lq_integral(10), std::pow(2 * std::numbers::pi, -4)) < 1e-12);
  CHECK(rel(unit_cos(g).bilap_energy(), 1.0) < 1e-12);
  const Field z = Field::zeros(g);
  CHECK(z.l2_norm_sq() == 0);
  CHECK(z.bilap_energy() == 0);
  CHECK(z.h2_norm_sq() == 0);
  CHECK(z.lq_integral(10) == 0);
}

TEST_CASE("non-finite values are rejected") {
  const Grid g = box_pi(8);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  CHECK_THROWS_AS(Field(g, v), std::invalid_argument);
  v[3] = INFINITY;
  CHECK_THROWS_AS(Field(g, v), std::invalid_argument);
  CHECK_THROWS_AS(Field(g, std::vector<double>(7)), std::invalid_argument);
}

TEST_CASE("dilation") {
  const Grid g = Grid::make(1, 512, 16);
  const Field u = gaussian(g);
  CHECK(dilate(u, 1.0).values()[100] == u.values()[100]);
  const Field v = dilate(u, 2.0);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const double x = g.coordinate(int(i));
    CHECK(std::abs(v[i] - std::sqrt(2.0) * std::exp(-2 * x * x)) < 1e-12);
  }
  CHECK(rel(v.l2_norm_sq(), kSqrtPi) < 1e-10);
  for (const Field& w : random_battery(g, 11, 5))
    for (double l : {0.5, 0.7, 1.3, 2.0}) {
      const Field wl = dilate(w, l);
      CHECK(rel(wl.bilap_energy(), std::pow(l, 4) * w.bilap_energy()) < 1e-8);
      CHECK(rel(wl.l2_norm_sq(), 1.0) < 1e-10);
    }
  CHECK_THROWS_AS(dilate(u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dilate(u, -1.0), std::invalid_argument);
}

TEST_CASE("dilation in 2D is separable") {
  const Grid g = Grid::make(2, 64, 8);
  const Field u = gaussian(g);
  const Field v = dilate(u, 1.5);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const Point x = g.node(i);
    CHECK(std::abs(v[i] - 1.5 * std::exp(-0.5 * 2.25 * (x[0] * x[0] + x[1] * x[1]))) < 1e-11);
  }
}

TEST_CASE("renormalize_mass") {
  const Grid g = box_pi(32);
  const Field u = Field::constant(g, 2.0 / std::sqrt(2 * std::numbers::pi));  // mass 4
  const Field h = renormalize_mass(u, 1.0);
  CHECK(std::abs(h[5] - 0.5 * u[5]) < 1e-15);
  const Field again = renormalize_mass(h, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(again[i] - h[i]) < 1e-15);
  CHECK_THROWS_AS(renormalize_mass(Field::zeros(g)), std::invalid_argument);
}

TEST_CASE("translation, reflection and derivatives") {
  const Grid g = Grid::make(1, 256, 10);
  const Field u = gaussian(g, 1.0);
  const Field t = translate(u, {0.37, 0.0});
  for (std::size_t i = 0; i < g.size(); i += 5) {
    const double x = g.coordinate(int(i));
    CHECK(std::abs(t[i] - std::exp(-0.5 * (x - 1.37) * (x - 1.37))) < 1e-12);
  }
  const Field r = reflect(u);
  CHECK(std::abs(r[g.size() / 2 + 10] - u[g.size() / 2 - 10]) < 1e-15);
  const Field du = partial(u, 0);
  for (std::size_t i = 0; i < g.size(); i += 5) {
    const double x = g.coordinate(int(i));
    CHECK(std::abs(du[i] + (x - 1.0) * std::exp(-0.5 * (x - 1.0) * (x - 1.0))) < 1e-11);
  }
  const Field s = symmetrize(gaussian(g));
  CHECK(std::abs(s[40] - gaussian(g)[40]) < 1e-15);
  CHECK_THROWS_AS(partial(u, 1), std::invalid_argument);
}

TEST_CASE("recenter") {
  const Grid g = Grid::make(1, 512, 16);
  auto even = recenter(gaussian(g));
  CHECK(std::abs(even.shift[0]) < 1e-12);
  auto moved = recenter(gaussian(g, 3.0));
  CHECK(std::abs(moved.shift[0] + 3.0) < g.dx());
  CHECK(std::abs(recenter(moved.field).shift[0]) < g.dx());
  auto am = recenter(gaussian(g, -2.0), RecenterMode::Argmax);
  CHECK(std::abs(am.shift[0] - 2.0) < g.dx());
  CHECK(std::abs(density_center(gaussian(g, 2.5))[0] - 2.5) < 1e-10);

  const Grid g2 = Grid::make(2, 64, 8);
  const Field b = Field::from_function(g2, [](const Point& x) {
    return std::exp(-0.5 * ((x[0] - 1) * (x[0] - 1) + (x[1] + 2) * (x[1] + 2)));
  });
  const auto c = recenter(b);
  CHECK(std::abs(c.shift[0] + 1) < g2.dx());
  CHECK(std::abs(c.shift[1] - 2) < g2.dx());
}

TEST_CASE("h2 distance") {
  const Grid g = Grid::make(1, 256, 12);
  const Field u = gaussian(g);
  CHECK(h2_distance(u, u) == 0);
  const Field v = u * 1.5;
  CHECK(rel(h2_distance(u, v), std::sqrt(0.25 * 1.75 * kSqrtPi)) < 1e-11);
  CHECK_THROWS_AS(h2_distance(u, gaussian(Grid::make(1, 128, 12))), std::invalid_argument);
}

TEST_CASE("resample between grids") {
  const Field u = gaussian(Grid::make(1, 128, 12));
  const Field v = resample(u, Grid::make(1, 512, 16));
  CHECK(rel(v.l2_norm_sq(), kSqrtPi) < 1e-11);
  CHECK(rel(v.bilap_energy(), 0.75 * kSqrtPi) < 1e-10);
}
