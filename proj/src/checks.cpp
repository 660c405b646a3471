#include "bhgs/checks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bhgs/battery.hpp"
#include "bhgs/energy.hpp"
#include "util.hpp"

namespace bhgs {

CheckRow check_spectral_modes(const Grid& g) {
  const int d = g.dim();
  const int n = g.n();
  double worst = 0;
  std::vector<std::pair<int, int>> modes = {{1, 0}, {3, 0}, {n / 4, 0}, {n / 2 - 1, 0}};
  if (d == 2) {
    modes.push_back({0, 1});
    modes.push_back({2, 5});
    modes.push_back({n / 2 - 1, n / 2 - 1});
  }
  for (auto [m0, m1] : modes) {
    const double k0 = std::numbers::pi * m0 / g.half_width();
    const double k1 = std::numbers::pi * m1 / g.half_width();
    const double k4 = std::pow(k0 * k0 + k1 * k1, 2);
    const Field u = Field::from_function(g, [&](const Point& x) {
      return std::cos(k0 * x[0] + (d == 2 ? k1 * x[1] : 0.0) + 0.3);
    });
    // Compare the mode's own coefficient: pointwise values would also carry the FFT
    // round-off of every other coefficient amplified by its |k|^4, which is up to
    // k_max^4 / k^4 times the signal for low modes.
    const Field b = u.bilap();
    const std::size_t nh = std::size_t(n / 2 + 1);
    const std::size_t idx = d == 1 ? std::size_t(m0) : std::size_t(m0) * nh + std::size_t(m1);
    const Complex want = k4 * u.spectrum()[idx];
    worst = std::max(worst, std::abs(b.spectrum()[idx] - want) / std::abs(want));
    const double e = std::abs(u.bilap_energy() - k4 * u.l2_norm_sq()) / (k4 * u.l2_norm_sq());
    worst = std::max(worst, e);
  }
  return {"spectral_modes", worst <= 1e-12, worst, 1e-12, "relative error of Lap^2 on pure modes (mode coefficient and quadratic form)"};
}

CheckRow check_parseval(const Grid& g, const CheckOptions& opt) {
  double worst = 0;
  for (const auto& u : random_battery(g, opt.seed, opt.fields)) {
    const double m = u.l2_norm_sq();
    worst = std::max(worst, std::abs(m - u.l2_norm_sq_spectral()) / m);
    const auto back = g.inverse(g.forward(u.values()));
    double e = 0, s = 0;
    for (std::size_t i = 0; i < back.size(); ++i) {
      e = std::max(e, std::abs(back[i] - u[i]));
      s = std::max(s, std::abs(u[i]));
    }
    worst = std::max(worst, e / s);
  }
  return {"parseval_roundtrip", worst <= 1e-12, worst, 1e-12,
          fmt::format("{} random fields", opt.fields)};
}

CheckRow check_scaling_identity(const Grid& g, const CheckOptions& opt, double a) {
  const double q = critical_power(g.dim());
  double worst = 0;
  for (const auto& u : random_battery(g, opt.seed + 1, opt.fields)) {
    for (double l : {0.5, 0.8, 1.25, 2.0}) {
      const double ref = std::pow(l, 4) * (u.bilap_energy() - a * u.lq_integral(q));
      worst = std::max(worst, scaled_energy_identity_check(u, a, l) / std::abs(ref));
    }
  }
  return {"scaling_identity", worst < 1e-8, worst, 1e-8,
          fmt::format("{} fields x l in {{0.5, 0.8, 1.25, 2}}, a = {}", opt.fields, a)};
}

CheckRow check_gradient(const Grid& g, const Potential& V, double a, const CheckOptions& opt) {
  const EnergyFunctional E(g, V, a);
  const double q = critical_power(g.dim());
  const auto us = random_battery(g, opt.seed + 2, opt.directions);
  const auto phis = random_battery(g, opt.seed + 3, opt.directions);
  // A direction along which the third derivative nearly vanishes leaves the h = 1e-4 error
  // at the round-off floor, where no order can be measured; such directions must instead
  // agree to round-off already at h = 1e-3 (a wrong gradient is off by O(1) there).
  constexpr double kRoundoffAgreement = 1e-8;
  double worst = std::numeric_limits<double>::infinity();
  int flat = 0;
  bool flat_ok = true;
  for (int i = 0; i < opt.directions; ++i) {
    const Field& u = us[std::size_t(i)];
    const Field& phi = phis[std::size_t(i)];
    Field G = E.gradient(u);
    if (opt.inject_gradient_sign_error) G = G + nonlinear_term(u, q) * (2.0 * a * q);
    const double exact = G.dot(phi);
    double err[2];
    const double hs[2] = {1e-3, 1e-4};
    for (int j = 0; j < 2; ++j) {
      const double h = hs[j];
      const double fd = E.difference(u + phi * h, u - phi * h) / (2 * h);
      err[j] = std::abs(fd - exact);
    }
    if (err[0] <= kRoundoffAgreement * (1 + std::abs(exact))) {
      ++flat;
      flat_ok = flat_ok && err[1] <= kRoundoffAgreement * (1 + std::abs(exact));
      continue;
    }
    const double order = std::log10(err[0] / err[1]);
    worst = std::min(worst, std::isfinite(order) ? order : 0.0);
  }
  if (!std::isfinite(worst)) worst = 2.0;  // every direction agreed to round-off
  return {"gradient_fd_order", worst >= 1.9 && flat_ok, worst, 1.9,
          fmt::format("{} directions, h = 1e-3 vs 1e-4 ({} agree to round-off)", opt.directions, flat)};
}

CheckRow check_gn_inequality(const Grid& g, double a_star, const CheckOptions& opt) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& v : random_battery(g, opt.seed + 4, opt.gn_fields))
    worst = std::min(worst, gn_quotient(v) / a_star);
  return {"gn_inequality", worst >= 1.0 - 1e-6, worst, 1.0 - 1e-6,
          fmt::format("min J / a_star over {} fields", opt.gn_fields)};
}

std::vector<CheckRow> run_checks(const Grid& g, const Potential& V, double a, const CheckOptions& opt) {
  std::vector<CheckRow> rows;
  rows.push_back(check_spectral_modes(g));
  rows.push_back(check_parseval(g, opt));
  rows.push_back(check_scaling_identity(g, opt, a));
  rows.push_back(check_gradient(g, V, a, opt));
  if (opt.a_star) rows.push_back(check_gn_inequality(g, *opt.a_star, opt));
  return rows;
}

}  // namespace bhgs
