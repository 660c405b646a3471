#include "bhgs/gn.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "bhgs/io.hpp"
#include "sphere_descent.hpp"
#include "util.hpp"

namespace bhgs {

using nlohmann::json;

namespace {

// log K(u) - log N(u) + (beta/2) (log K(u))^2 on unit-mass fields. The first two terms are
// log J, which is flat along mass-preserving dilations; the penalty pins the scale to
// K = 1 without moving the minimum value, so Newton does not wander along that valley.
class LogQuotient final : public detail::SphereObjective {
 public:
  explicit LogQuotient(double q, double beta = 1.0) : q_(q), beta_(beta) {}

  double value(const Field& u) const override {
    const double lk = std::log(u.bilap_energy());
    return lk - std::log(u.lq_integral(q_)) + 0.5 * beta_ * lk * lk;
  }

  double difference(const Field& un, const Field& u) const override {
    const Field d = un - u;
    const Field s = un + u;
    const Grid& g = u.grid();
    const auto k4 = g.symbol_k4();
    const auto w = g.multiplicity();
    double dk = 0;
    for (std::size_t i = 0; i < d.spectrum().size(); ++i) {
      const Complex a = d.spectrum()[i], b = s.spectrum()[i];
      dk += w[i] * k4[i] * (a.real() * b.real() + a.imag() * b.imag());
    }
    dk *= g.box_volume();
    const double lk = std::log(u.bilap_energy());
    const double dl = std::log1p(dk / u.bilap_energy());
    const double dn = lq_difference(un, u, q_);
    return dl - std::log1p(dn / u.lq_integral(q_)) + 0.5 * beta_ * dl * (2 * lk + dl);
  }

  Field gradient(const Field& u) const override {
    const double K = u.bilap_energy(), N = u.lq_integral(q_);
    const double c = 1.0 + beta_ * std::log(K);
    return u.bilap() * (2.0 * c / K) - nonlinear_term(u, q_) * (q_ / N);
  }

  std::function<Field(const Field&)> hessian_at(const Field& u) const override {
    const double K = u.bilap_energy(), N = u.lq_integral(q_);
    const double c = 1.0 + beta_ * std::log(K);
    const Grid& g = u.grid();
    const Field b = u.bilap();
    const Field n = nonlinear_term(u, q_);
    auto w = g.to_refined(u.spectrum());
    for (auto& v : w) v = abs_pow(v, q_ - 2.0);
    const double q = q_, beta = beta_;
    return [=, w = std::move(w)](const Field& v) {
      auto fv = g.to_refined(v.spectrum());
      for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= w[i];
      const Field nv = Field::from_spectrum(g, g.from_refined(fv));
      const double bv = b.dot(v);
      return v.bilap() * (2.0 * c / K) + b * ((4.0 * beta - 4.0 * c) * bv / (K * K)) -
             nv * (q * (q - 1.0) / N) + n * (q * q * n.dot(v) / (N * N));
    };
  }

 private:
  double q_;
  double beta_;
};

struct Candidate {
  Field u;
  double J;
  double grad;
  SolveStatus status;
};

detail::DescentOptions descent_options(const SolveConfig& cfg) {
  detail::DescentOptions o;
  o.method = cfg.method;
  o.step0 = cfg.step0;
  o.shrink = cfg.shrink;
  o.grow = cfg.grow;
  o.tol_grad = cfg.tol_grad;
  o.max_iters = cfg.max_iters;
  return o;
}

Field tidy(const Field& u, bool symmetric) {
  Field v = u;
  if (symmetric) v = symmetrize(recenter(v).field);
  return normalize_gn(v);
}

Candidate run_restart(const Grid& g, const SolveConfig& cfg, const GNOptions& opt, double width) {
  const double q = critical_power(g.dim());
  const LogQuotient f(q);
  const auto dopt = descent_options(cfg);
  for (int attempt = 0; attempt < 3; ++attempt, width *= 2) {
    Field u = make_initial(g, Potential::zero(), InitGaussian{width, opt.center});
    auto first = detail::minimize_on_sphere(f, u, dopt);
    // A profile narrower than a few cells has collapsed toward the grid scale; retry wider.
    if (std::pow(first.u.bilap_energy(), -0.25) < 4 * g.dx()) continue;
    u = tidy(first.u, opt.symmetrize);
    auto polish = detail::minimize_on_sphere(f, u, dopt);
    u = tidy(polish.u, opt.symmetrize);
    return {u, gn_quotient(u), polish.grad_residual, polish.status};
  }
  throw std::runtime_error("GN minimization collapsed to the grid scale from every initial width");
}

}  // namespace

Field normalize_gn(const Field& u) {
  const double M0 = u.l2_norm_sq();
  const double K0 = u.bilap_energy();
  if (!(M0 > 0)) throw std::invalid_argument("cannot normalize a zero field");
  if (!(K0 > 1e-300 * M0)) throw std::invalid_argument("cannot normalize a field with Lap u = 0");
  Field v = renormalize_mass(u, 1.0);
  for (int it = 0; it < 4; ++it) {
    const double K = v.bilap_energy();
    if (std::abs(K - 1.0) < 1e-14) break;
    v = renormalize_mass(dilate(v, std::pow(K, -0.25)), 1.0);
  }
  return v;
}

Field normalize_to_el(const Field& u) {
  const auto fit = el_residual(u);
  if (!(fit.c1 > 0) || !(fit.c2 > 0))
    throw std::domain_error(
        fmt::format("normalize_to_el needs positive constants, got c1 = {}, c2 = {}", fit.c1, fit.c2));
  const int d = u.grid().dim();
  const double q = critical_power(d);
  const double l = std::pow(fit.c1, -0.25);  // v(x) = mu u(l x)
  const double mu = std::pow(fit.c2 / fit.c1, 1.0 / (q - 2.0));
  // Sampling v on the box scaled by 1/l hits exactly the nodes of u: no interpolation,
  // and no tail is pushed across the seam when l < 1.
  const Grid& g = u.grid();
  std::vector<double> v(u.values().begin(), u.values().end());
  for (auto& x : v) x *= mu;
  return Field(Grid::make(d, g.n(), g.half_width() / l), std::move(v));
}

GNResult compute_gn(const Grid& g, const SolveConfig& cfg, const GNOptions& opt) {
  if (opt.restarts < 1) throw std::invalid_argument("gn.restarts must be >= 1");
  std::vector<double> widths;
  for (int i = 0; i < opt.restarts; ++i) widths.push_back(0.6 * std::pow(1.5, i));

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = opt.threads > 0 ? std::size_t(opt.threads) : hw;
  std::vector<Candidate> cands;
  for (std::size_t start = 0; start < widths.size(); start += threads) {
    std::vector<std::future<Candidate>> batch;
    for (std::size_t i = start; i < std::min(widths.size(), start + threads); ++i)
      batch.push_back(std::async(std::launch::async, run_restart, std::cref(g), std::cref(cfg),
                                 std::cref(opt), widths[i]));
    for (auto& f : batch) cands.push_back(f.get());
  }
  const auto best = std::min_element(cands.begin(), cands.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.J < b.J; });

  GNResult r{.a_star = best->J, .Q = best->u};
  r.grad_residual = best->grad;
  r.status = best->status;
  for (const auto& c : cands) r.restart_values.push_back(c.J);
  r.nonlinear_check = r.a_star * r.Q.lq_integral(critical_power(g.dim()));
  r.el = el_residual(r.Q);
  r.el_normalized = el_residual(normalize_to_el(r.Q));
  r.resolutions.emplace_back(g.n(), r.a_star);

  if (opt.resolution_check && g.n() >= 16) {
    const Grid coarse = Grid::make(g.dim(), g.n() / 2, g.half_width());
    const LogQuotient f(critical_power(g.dim()));
    auto c = detail::minimize_on_sphere(f, resample(r.Q, coarse), descent_options(cfg));
    r.resolutions.emplace_back(coarse.n(), gn_quotient(c.u));
  }
  return r;
}

void save_gn(const std::filesystem::path& dir, const GNResult& r, const std::string& stem) {
  const auto qpath = dir / (stem + "_Q.bhf");
  write_field(qpath, r.Q);
  const Grid& g = r.Q.grid();
  json res = json::array();
  for (const auto& [n, a] : r.resolutions) res.push_back({{"n", n}, {"a_star", a}});
  const json j = {
      {"a_star", r.a_star},
      {"d", g.dim()},
      {"n", g.n()},
      {"half_width", g.half_width()},
      {"q", critical_power(g.dim())},
      {"Q_file", qpath.filename().string()},
      {"nonlinear_check", r.nonlinear_check},
      {"el_constants", {r.el.c1, r.el.c2}},
      {"residuals",
       {{"el_fit", r.el.residual},
        {"el_normalized", r.el_normalized.residual},
        {"el_normalized_constants", {r.el_normalized.c1, r.el_normalized.c2}},
        {"grad", r.grad_residual},
        {"mass_minus_one", r.Q.l2_norm_sq() - 1.0},
        {"kinetic_minus_one", r.Q.bilap_energy() - 1.0}}},
      {"status", to_string(r.status)},
      {"resolutions", res},
      {"restart_values", r.restart_values},
  };
  write_json(dir / (stem + ".json"), j);
}

GNResult load_gn(const std::filesystem::path& json_path) {
  const json j = read_json(json_path);
  for (const char* key : {"a_star", "Q_file"})
    if (!j.contains(key))
      throw std::runtime_error(fmt::format("{} lacks \"{}\"", json_path.string(), key));
  GNResult r{.a_star = j.at("a_star").get<double>(),
             .Q = read_field(json_path.parent_path() / j.at("Q_file").get<std::string>())};
  r.nonlinear_check = j.value("nonlinear_check", 0.0);
  if (j.contains("el_constants")) {
    r.el.c1 = j["el_constants"][0].get<double>();
    r.el.c2 = j["el_constants"][1].get<double>();
  }
  if (j.contains("residuals")) {
    r.el.residual = j["residuals"].value("el_fit", 0.0);
    r.grad_residual = j["residuals"].value("grad", 0.0);
  }
  r.status = parse_status(j.value("status", std::string("converged")));
  if (j.contains("resolutions"))
    for (const auto& e : j["resolutions"]) r.resolutions.emplace_back(e["n"].get<int>(), e["a_star"].get<double>());
  return r;
}

}  // namespace bhgs
