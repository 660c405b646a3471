#include "bhgs/blowup.hpp"

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "util.hpp"

namespace bhgs {

std::vector<double> geometric_schedule(double a_star, double start, int count, double ratio) {
  if (!(a_star > 0)) throw std::invalid_argument("a_star must be positive");
  if (!(start > 0 && start < 1)) throw std::invalid_argument("schedule start must lie in (0, 1)");
  if (!(ratio > 0 && ratio < 1)) throw std::invalid_argument("schedule ratio must lie in (0, 1)");
  if (count < 1) throw std::invalid_argument("schedule count must be >= 1");
  std::vector<double> s;
  for (int j = 0; j < count; ++j) s.push_back(a_star * (1.0 - start * std::pow(ratio, j)));
  return s;
}

namespace {

// Weighted cross-correlation sum_k (1 + |k|^4) Re(conj(w_k) Q_k e^{-i k.s}) over the full
// spectrum, times (2L)^d: the H2 inner product <w, translate(Q, s)>.
double h2_overlap(const Field& w, const Field& Q, const Point& s) {
  const Grid& g = w.grid();
  const int n = g.n();
  const int nh = n / 2 + 1;
  const auto k = g.wavenumbers();
  const auto k4 = g.symbol_k4();
  const auto mult = g.multiplicity();
  const double kn = std::numbers::pi * (n / 2) / g.half_width();
  auto phase = [&](int j, double shift) -> Complex {
    if (j == n / 2) return {std::cos(kn * shift), 0.0};
    return std::polar(1.0, -k[j] * shift);
  };
  const int rows = g.dim() == 1 ? 1 : n;
  const double s_last = g.dim() == 1 ? s[0] : s[1];
  std::vector<Complex> col(nh);
  for (int c = 0; c < nh; ++c) col[c] = phase(c, s_last);
  double acc = 0;
  for (int r = 0; r < rows; ++r) {
    const Complex pr = g.dim() == 1 ? Complex(1.0) : phase(r, s[0]);
    for (int c = 0; c < nh; ++c) {
      const std::size_t i = std::size_t(r) * nh + c;
      const Complex z = std::conj(w.spectrum()[i]) * Q.spectrum()[i] * pr * col[c];
      acc += mult[i] * (1.0 + k4[i]) * z.real();
    }
  }
  return acc * g.box_volume();
}

}  // namespace

TranslationFit h2_distance_translated(const Field& w, const Field& Q) {
  const Grid& g = w.grid();
  if (!g.same_as(Q.grid())) throw std::invalid_argument("h2_distance_translated: grids differ");
  const int d = g.dim();
  // Coarse search over whole-cell shifts via one inverse transform of the weighted
  // cross-spectrum: the value at node j is the overlap for the shift -j dx (periodic).
  Spectrum X(g.spectral_size());
  const auto k4 = g.symbol_k4();
  for (std::size_t i = 0; i < X.size(); ++i)
    X[i] = std::conj(w.spectrum()[i]) * Q.spectrum()[i] * (1.0 + k4[i]);
  const auto corr = g.inverse(X);
  const std::size_t jbest = std::size_t(std::max_element(corr.begin(), corr.end()) - corr.begin());
  const int n = g.n();
  auto wrap = [&](int j) { return j <= n / 2 ? -j * g.dx() : (n - j) * g.dx(); };
  Point s{0.0, 0.0};
  if (d == 1) {
    s[0] = wrap(int(jbest));
  } else {
    s[0] = wrap(int(jbest / n));
    s[1] = wrap(int(jbest % n));
  }
  // Brent refinement within one cell, coordinate cycles in 2D.
  const int bits = std::numeric_limits<double>::digits / 2;
  for (int cycle = 0; cycle < (d == 1 ? 1 : 6); ++cycle) {
    for (int axis = 0; axis < d; ++axis) {
      auto f = [&](double t) {
        Point p = s;
        p[axis] = t;
        return -h2_overlap(w, Q, p);
      };
      const auto r = boost::math::tools::brent_find_minima(f, s[axis] - g.dx(), s[axis] + g.dx(), bits);
      s[axis] = r.first;
    }
  }
  return {h2_distance(w, translate(Q, s)), s};
}

std::vector<SweepRecord> sweep(const Grid& g, const Potential& V, const std::vector<double>& schedule,
                               const SolveConfig& cfg, const GNResult& gn, const SweepOptions& opt) {
  if (schedule.empty()) throw std::invalid_argument("sweep schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0 && schedule[i] < gn.a_star))
      throw std::invalid_argument(fmt::format(
          "schedule entry {} = {} is outside (0, a_star = {})", i, schedule[i], gn.a_star));
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("schedule must be strictly increasing");
  }
  if (gn.Q.grid().dim() != g.dim()) throw std::invalid_argument("GN profile has the wrong dimension");
  const Field Q = gn.Q.grid().same_as(g) ? gn.Q : resample(gn.Q, g);
  const double q = critical_power(g.dim());

  std::vector<SweepRecord> out;
  SolveConfig c = cfg;
  for (double a : schedule) {
    const SolveResult sr = solve(g, V, a, c);
    SweepRecord r;
    r.a = a;
    r.gap_to_threshold = 1.0 - a / gn.a_star;
    r.energy = sr.breakdown.total;
    r.kinetic = sr.breakdown.kinetic;
    r.eps = std::pow(r.kinetic, -0.25);
    r.mu = sr.mu;
    r.grad_residual = sr.grad_residual;
    r.iterations = sr.iterations;
    r.status = sr.status;
    r.resolved = r.eps > 4.0 * g.dx();
    const auto rc = recenter(sr.minimizer, opt.recenter);
    r.center = {-rc.shift[0], -rc.shift[1]};
    const Field w = normalize_gn(dilate(rc.field, r.eps));
    r.h2_dist_to_Q = h2_distance_translated(w, Q).distance;
    r.gn_value = gn.a_star * w.lq_integral(q);
    if (opt.keep_fields) {
      r.u = sr.minimizer;
      r.w = w;
    }
    if (opt.on_record) opt.on_record(r);
    out.push_back(std::move(r));
    if (sr.status != SolveStatus::DivergedBelowFloor) c.init = InitWarmStart{sr.minimizer};
  }
  return out;
}

EnergyLimitCheck energy_limit_check(const std::vector<SweepRecord>& records, const Potential& V,
                                    int d, double tolerance) {
  const double target = V.ess_inf(d);
  if (!std::isfinite(target))
    throw std::invalid_argument("energy_limit_check needs a potential with finite ess inf");
  EnergyLimitCheck c{};
  for (const auto& r : records)
    if (r.resolved) c.gaps.push_back(std::abs(r.energy - target));
  if (c.gaps.size() < 3)
    throw std::invalid_argument(fmt::format(
        "energy_limit_check needs at least 3 resolved records, got {}; increase n", c.gaps.size()));
  c.gap = c.gaps.back();
  const std::size_t m = c.gaps.size();
  c.monotone = c.gaps[m - 1] < c.gaps[m - 2] && c.gaps[m - 2] < c.gaps[m - 3];
  c.pass = c.monotone && c.gap < tolerance;
  return c;
}

std::vector<double> gn_sequence_check(const std::vector<SweepRecord>& records, const GNResult& gn) {
  const double q = critical_power(gn.Q.grid().dim());
  std::vector<double> v;
  for (const auto& r : records) {
    if (!r.resolved) continue;
    v.push_back(r.w ? gn.a_star * r.w->lq_integral(q) : r.gn_value);
  }
  return v;
}

CrossCheck sweep_cross_check(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cross-check needs sweeps of equal length");
  CrossCheck c{0.0, "none"};
  auto cmp = [&](double x, double y, const char* name, std::size_t i) {
    const double dlt = std::abs(x - y) / std::max(1.0, std::abs(x));
    if (dlt > c.max_discrepancy) {
      c.max_discrepancy = dlt;
      c.worst = fmt::format("{} at record {}", name, i);
    }
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].a - b[i].a) > 1e-12 * std::abs(a[i].a))
      throw std::invalid_argument("cross-check sweeps use different schedules");
    if (!a[i].resolved || !b[i].resolved) continue;
    cmp(a[i].energy, b[i].energy, "energy", i);
    cmp(a[i].kinetic, b[i].kinetic, "kinetic", i);
    cmp(a[i].eps, b[i].eps, "eps", i);
    cmp(a[i].center[0], b[i].center[0], "center", i);
    cmp(a[i].h2_dist_to_Q, b[i].h2_dist_to_Q, "h2_dist_to_Q", i);
    cmp(a[i].gn_value, b[i].gn_value, "gn_value", i);
    cmp(a[i].mu, b[i].mu, "mu", i);
  }
  return c;
}

}  // namespace bhgs
