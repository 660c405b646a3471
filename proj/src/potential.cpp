#include "bhgs/potential.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bhgs {

using nlohmann::json;

std::string to_string(PotentialClass c) {
  switch (c) {
    case PotentialClass::V1: return "V1";
    case PotentialClass::V2: return "V2";
    case PotentialClass::Neither: return "neither";
  }
  return "?";
}

Potential Potential::zero() { return {}; }

Potential Potential::harmonic(double omega) {
  if (!(omega >= 0) || !std::isfinite(omega))
    throw std::invalid_argument("harmonic strength must be finite and >= 0");
  Potential p;
  if (omega == 0) return p;
  p.family_ = Family::Harmonic;
  p.a_ = omega;
  return p;
}

Potential Potential::gaussian_well(double depth, double width, Point center) {
  if (!(depth > 0) || !(width > 0) || !std::isfinite(depth) || !std::isfinite(width))
    throw std::invalid_argument("gaussian well needs depth > 0 and width > 0");
  Potential p;
  p.family_ = Family::GaussianWell;
  p.a_ = depth;
  p.b_ = width;
  p.center_ = center;
  return p;
}

Potential Potential::power_well(double depth, double alpha, Point center) {
  if (!(depth > 0) || !(alpha > 0) || !std::isfinite(depth) || !std::isfinite(alpha))
    throw std::invalid_argument("power well needs depth > 0 and exponent > 0");
  Potential p;
  p.family_ = Family::PowerWell;
  p.a_ = depth;
  p.b_ = alpha;
  p.center_ = center;
  return p;
}

Potential Potential::sum(std::vector<Potential> terms) {
  std::vector<Potential> kept;
  for (auto& t : terms) {
    if (t.family_ == Family::Zero) continue;
    if (t.family_ == Family::Sum) {
      for (auto& s : t.terms_) kept.push_back(s);
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (kept.empty()) return zero();
  if (kept.size() == 1) return kept.front();
  Potential p;
  p.family_ = Family::Sum;
  p.terms_ = std::move(kept);
  return p;
}

namespace {

double number(const json& j, const char* key, double fallback, bool required) {
  if (!j.contains(key)) {
    if (required) throw std::invalid_argument(fmt::format("potential: missing \"{}\"", key));
    return fallback;
  }
  if (!j.at(key).is_number())
    throw std::invalid_argument(fmt::format("potential: \"{}\" must be a number", key));
  return j.at(key).get<double>();
}

Point point(const json& j, const char* key) {
  Point c{0.0, 0.0};
  if (!j.contains(key)) return c;
  const auto& a = j.at(key);
  if (a.is_number()) {
    c[0] = a.get<double>();
    return c;
  }
  if (!a.is_array() || a.empty() || a.size() > 2)
    throw std::invalid_argument(fmt::format("potential: \"{}\" must be an array of 1 or 2 numbers", key));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw std::invalid_argument("potential: center entries must be numbers");
    c[i] = a[i].get<double>();
  }
  return c;
}

}  // namespace

Potential Potential::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("potential must be a JSON object");
  if (!j.contains("family") || !j.at("family").is_string())
    throw std::invalid_argument("potential: missing string \"family\"");
  const auto fam = j.at("family").get<std::string>();
  if (fam == "zero") return zero();
  if (fam == "harmonic") return harmonic(number(j, "strength", 1.0, false));
  if (fam == "gaussian_well")
    return gaussian_well(number(j, "depth", 1.0, true), number(j, "width", 1.0, false),
                         point(j, "center"));
  if (fam == "power_well")
    return power_well(number(j, "depth", 1.0, true), number(j, "exponent", 0.5, true),
                      point(j, "center"));
  if (fam == "sum") {
    if (!j.contains("terms") || !j.at("terms").is_array())
      throw std::invalid_argument("potential: sum needs a \"terms\" array");
    std::vector<Potential> terms;
    for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
    return sum(std::move(terms));
  }
  throw std::invalid_argument(fmt::format("potential: unknown family \"{}\"", fam));
}

json Potential::to_json() const {
  switch (family_) {
    case Family::Zero: return {{"family", "zero"}};
    case Family::Harmonic: return {{"family", "harmonic"}, {"strength", a_}};
    case Family::GaussianWell:
      return {{"family", "gaussian_well"}, {"depth", a_}, {"width", b_},
              {"center", {center_[0], center_[1]}}};
    case Family::PowerWell:
      return {{"family", "power_well"}, {"depth", a_}, {"exponent", b_},
              {"center", {center_[0], center_[1]}}};
    case Family::Sum: {
      json t = json::array();
      for (const auto& p : terms_) t.push_back(p.to_json());
      return {{"family", "sum"}, {"terms", t}};
    }
  }
  return {};
}

std::string Potential::describe() const { return to_json().dump(); }

namespace {

double dist_sq(const Point& x, const Point& c, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return s;
}

// Average of |x|^{-alpha} over the cell [-h, h]^d.
double singular_cell_average(double alpha, double h, int d) {
  if (d == 1) return std::pow(h, -alpha) / (1.0 - alpha);
  // By symmetry, eight triangles 0 <= y <= x <= h; polar integration in r is closed form.
  auto f = [alpha](double th) { return std::pow(std::cos(th), alpha - 2.0); };
  const double ang = boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, std::numbers::pi / 4);
  return 2.0 * std::pow(h, -alpha) / (2.0 - alpha) * ang;
}

}  // namespace

double Potential::value(const Point& x, int d) const {
  switch (family_) {
    case Family::Zero: return 0.0;
    case Family::Harmonic: return a_ * dist_sq(x, {0.0, 0.0}, d);
    case Family::GaussianWell: return -a_ * std::exp(-dist_sq(x, center_, d) / (b_ * b_));
    case Family::PowerWell: {
      const double r2 = dist_sq(x, center_, d);
      if (r2 == 0) return -std::numeric_limits<double>::infinity();
      return -a_ * std::pow(r2, -0.5 * b_);
    }
    case Family::Sum: {
      double s = 0;
      for (const auto& t : terms_) s += t.value(x, d);
      return s;
    }
  }
  return 0.0;
}

Field Potential::sample(const Grid& g) const {
  const int d = g.dim();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point x = g.node(i);
    double s = 0;
    auto add = [&](const Potential& t) {
      if (t.family_ == Family::PowerWell && dist_sq(x, t.center_, d) < 1e-24 * g.dx() * g.dx()) {
        if (t.b_ >= d)
          throw std::invalid_argument("power well singularity on a grid node is not integrable");
        s += -t.a_ * singular_cell_average(t.b_, 0.5 * g.dx(), d);
      } else {
        s += t.value(x, d);
      }
    };
    if (family_ == Family::Sum) {
      for (const auto& t : terms_) add(t);
    } else {
      add(*this);
    }
    v[i] = s;
  }
  return Field(g, std::move(v));
}

bool Potential::is_nonnegative() const {
  switch (family_) {
    case Family::Zero:
    case Family::Harmonic: return true;
    case Family::GaussianWell:
    case Family::PowerWell: return false;
    case Family::Sum:
      return std::all_of(terms_.begin(), terms_.end(),
                         [](const Potential& t) { return t.is_nonnegative(); });
  }
  return false;
}

namespace {

bool has_family(const Potential& p, Potential::Family f) {
  if (p.family() == f) return true;
  return std::any_of(p.terms().begin(), p.terms().end(),
                     [f](const Potential& t) { return t.family() == f; });
}

// Numerical minimum of a sum: dense scan, then Brent refinement of the best candidates
// (coordinate cycles in 2D).
double numerical_min(const Potential& V, int d) {
  double R = 1.0;
  for (const auto& t : V.terms()) {
    if (t.family() == Potential::Family::GaussianWell)
      R = std::max(R, std::sqrt(dist_sq(t.center(), {0.0, 0.0}, d)) + 4.0 * t.width());
  }
  const int bits = std::numeric_limits<double>::digits / 2 + 4;
  auto f = [&](const Point& x) { return V.value(x, d); };

  struct Cand {
    Point x;
    double v;
  };
  std::vector<Cand> cands;
  const int m = d == 1 ? 4001 : 301;
  const double h = 2 * R / (m - 1);
  if (d == 1) {
    for (int i = 0; i < m; ++i) {
      const Point x{-R + i * h, 0.0};
      cands.push_back({x, f(x)});
    }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Point x{-R + i * h, -R + j * h};
        cands.push_back({x, f(x)});
      }
  }
  std::partial_sort(cands.begin(), cands.begin() + std::min<std::size_t>(8, cands.size()),
                    cands.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
  double best = cands.front().v;
  for (std::size_t c = 0; c < std::min<std::size_t>(8, cands.size()); ++c) {
    Point x = cands[c].x;
    for (int cycle = 0; cycle < (d == 1 ? 1 : 12); ++cycle) {
      for (int axis = 0; axis < d; ++axis) {
        auto g = [&](double t) {
          Point y = x;
          y[axis] = t;
          return f(y);
        };
        auto r = boost::math::tools::brent_find_minima(g, x[axis] - 2 * h, x[axis] + 2 * h, bits);
        x[axis] = r.first;
      }
    }
    best = std::min(best, f(x));
  }
  return best;
}

}  // namespace

double Potential::ess_inf(int d) const {
  switch (family_) {
    case Family::Zero:
    case Family::Harmonic: return 0.0;
    case Family::GaussianWell: return -a_;
    case Family::PowerWell: return -std::numeric_limits<double>::infinity();
    case Family::Sum: {
      if (has_family(*this, Family::PowerWell)) return -std::numeric_limits<double>::infinity();
      const double interior = numerical_min(*this, d);
      // Wells vanish at infinity; a harmonic term sends V to +inf there.
      const double at_infinity = has_family(*this, Family::Harmonic)
                                     ? std::numeric_limits<double>::infinity()
                                     : 0.0;
      return std::min(interior, at_infinity);
    }
  }
  return 0.0;
}

PotentialClass Potential::classify(int d) const {
  if (is_nonnegative())
    return has_family(*this, Family::Harmonic) ? PotentialClass::V1 : PotentialClass::Neither;
  // Negative part: Gaussian wells lie in every L^p; a power well lies in L^{p1} + L^{p2}
  // with max{1, d/4} < p1 < p2 exactly when its exponent is below d / max{1, d/4}.
  const double pmin = std::max(1.0, d / 4.0);
  auto ok = [&](const Potential& t) {
    return t.family() != Family::PowerWell || t.width() < d / pmin;
  };
  if (family_ == Family::Sum)
    return std::all_of(terms_.begin(), terms_.end(), ok) ? PotentialClass::V2
                                                         : PotentialClass::Neither;
  return ok(*this) ? PotentialClass::V2 : PotentialClass::Neither;
}

double lp_norm(const Field& f, double p) {
  double s = 0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

namespace {

// ||f chi(pred(|f|))||_p without materializing the field.
template <class Pred>
double masked_norm(std::span<const double> f, double p, double cell, Pred pred) {
  double s = 0;
  for (double v : f)
    if (pred(std::abs(v))) s += std::pow(std::abs(v), p);
  return std::pow(s * cell, 1.0 / p);
}

}  // namespace

PotentialSplit level_split(const Potential& V, const Grid& g, double p1, double p2, double eps) {
  const int d = g.dim();
  if (!(p1 > std::max(1.0, d / 4.0)) || !(p2 > p1) || !std::isfinite(p2))
    throw std::invalid_argument(fmt::format(
        "level_split needs max(1, d/4) < p1 < p2 < inf, got p1 = {}, p2 = {}", p1, p2));
  if (!(eps > 0)) throw std::invalid_argument("level_split tolerance must be positive");
  const auto cls = V.classify(d);
  if (cls != PotentialClass::V2 && !V.is_nonnegative())
    throw std::invalid_argument("level_split needs a V2 potential or a nonnegative one");

  const Field samples = V.sample(g);
  std::vector<double> f(samples.size());
  double fmax = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::min(samples[i], 0.0);
    if (!std::isfinite(f[i]))
      throw std::runtime_error("level_split: unbounded samples; no finite cut level exists");
    fmax = std::max(fmax, std::abs(f[i]));
  }
  const double cell = g.cell_volume();

  // Smallest L with ||f chi(|f| >= L)||_{p1} <= eps. The norm is non-increasing in L.
  double L = 0;
  if (masked_norm(f, p1, cell, [](double) { return true; }) > eps) {
    double lo = 0, hi = std::nextafter(fmax, std::numeric_limits<double>::infinity());
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (masked_norm(f, p1, cell, [mid](double a) { return a >= mid; }) <= eps)
        hi = mid;
      else
        lo = mid;
    }
    L = hi;
  }
  // Largest eta <= L with ||f chi(|f| < eta)||_{p2} <= eps. Non-decreasing in eta.
  double eta = L;
  if (masked_norm(f, p2, cell, [L](double a) { return a < L; }) > eps) {
    double lo = 0, hi = L;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (masked_norm(f, p2, cell, [mid](double a) { return a < mid; }) <= eps)
        lo = mid;
      else
        hi = mid;
    }
    eta = lo;
  }

  std::vector<double> a(f.size(), 0.0), b(f.size(), 0.0), c(f.size(), 0.0);
  double sup3 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::abs(f[i]);
    if (m >= L && m > 0)
      a[i] = f[i];
    else if (m < eta)
      b[i] = f[i];
    else {
      c[i] = f[i];
      sup3 = std::max(sup3, m);
    }
  }
  Field v1(g, std::move(a)), v2(g, std::move(b)), v3(g, std::move(c));
  const double n1 = lp_norm(v1, p1), n2 = lp_norm(v2, p2);
  return {v1, v2, v3, p1, p2, L, eta, n1, n2, sup3};
}

double weighted_multiplier_norm(const Field& m) {
  const Grid& g = m.grid();
  const auto k4 = g.symbol_k4();
  std::vector<double> w(k4.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / std::sqrt(1.0 + k4[i]);
  bool any = false;
  for (double v : m.values()) {
    if (v < 0) throw std::invalid_argument("weighted_multiplier_norm needs a nonnegative multiplier");
    any = any || v > 0;
  }
  if (!any) return 0.0;

  auto apply = [&](const Spectrum& x) {
    Spectrum y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= w[i];
    auto vals = g.inverse(y);
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= m[i];
    Spectrum z = g.forward(vals);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= w[i];
    return z;
  };
  // Start from the multiplier itself: it overlaps the top eigenvector.
  Spectrum x = g.forward(m.values());
  double nx = std::sqrt(g.spectral_inner(x, x));
  for (auto& c : x) c /= nx;
  double prev = 0, est = 0;
  for (int it = 0; it < 5000; ++it) {
    Spectrum y = apply(x);
    const double rq = g.spectral_inner(x, y);
    // For unit x, rq <= ||A x|| <= lambda_max; keep the larger estimate.
    est = std::sqrt(g.spectral_inner(y, y));
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / est;
    if (it > 10 && std::abs(rq - prev) <= 1e-10 * rq) break;
    prev = rq;
  }
  return est;
}

double sobolev_lower_bound(const Potential& V, const Grid& g, double eps, double p1, double p2) {
  if (!(eps > 0)) throw std::invalid_argument("sobolev_lower_bound: eps must be positive");
  if (V.is_nonnegative()) return 0.0;
  const auto cls = V.classify(g.dim());
  if (cls != PotentialClass::V2)
    throw std::invalid_argument("sobolev_lower_bound needs a V1 or V2 potential");

  constexpr double pad = 1.1;
  const Field samples = V.sample(g);
  double fsup = 0;
  for (double v : samples.values()) fsup = std::max(fsup, -std::min(v, 0.0));

  // Everything in the bounded part is always admissible.
  double best = fsup;
  // Fixed ladder of split tolerances independent of eps, so C(eps) is a minimum over a
  // set that only grows with eps.
  const double scale = std::max(1.0, fsup);
  for (int j = 0; j <= 24; ++j) {
    const double tol = scale * std::ldexp(1.0, -j);
    const auto split = level_split(V, g, p1, p2, tol);
    auto absf = [](const Field& f) {
      std::vector<double> v(f.values().begin(), f.values().end());
      for (auto& x : v) x = std::abs(x);
      return Field(f.grid(), std::move(v));
    };
    const double lam = pad * (weighted_multiplier_norm(absf(split.v1_part)) +
                              weighted_multiplier_norm(absf(split.v2_part)));
    // eps K - lam (1 + K) - sup|v3| >= -(lam + sup|v3|) once lam <= eps.
    if (lam <= eps) best = std::min(best, lam + split.v3_sup);
  }
  return best;
}

}  // namespace bhgs
