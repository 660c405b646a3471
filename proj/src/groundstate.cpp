#include "bhgs/groundstate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhgs/io.hpp"
#include "sphere_descent.hpp"
#include "util.hpp"

namespace bhgs {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Gradient: return "gradient";
    case SolveMethod::Preconditioned: return "preconditioned";
    case SolveMethod::Newton: return "newton";
  }
  return "?";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::DivergedBelowFloor: return "diverged_below_floor";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Stalled: return "stalled";
  }
  return "?";
}

SolveMethod parse_method(const std::string& s) {
  if (s == "gradient") return SolveMethod::Gradient;
  if (s == "preconditioned") return SolveMethod::Preconditioned;
  if (s == "newton") return SolveMethod::Newton;
  throw std::invalid_argument(fmt::format("unknown solver method \"{}\"", s));
}

SolveStatus parse_status(const std::string& s) {
  for (auto st : {SolveStatus::Converged, SolveStatus::DivergedBelowFloor, SolveStatus::MaxIters,
                  SolveStatus::Stalled})
    if (to_string(st) == s) return st;
  throw std::invalid_argument(fmt::format("unknown solver status \"{}\"", s));
}

void SolveConfig::validate() const {
  if (!(step0 > 0)) throw std::invalid_argument("solver.step0 must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("solver.shrink must lie in (0, 1)");
  if (!(grow > 1)) throw std::invalid_argument("solver.grow must be > 1");
  if (!(tol_grad > 0)) throw std::invalid_argument("solver.tol_grad must be > 0");
  if (max_iters < 1) throw std::invalid_argument("solver.max_iters must be >= 1");
  if (!(energy_floor < 0)) throw std::invalid_argument("solver.energy_floor must be < 0");
  if (const auto* gi = std::get_if<InitGaussian>(&init); gi && !(gi->width > 0))
    throw std::invalid_argument("gaussian initial width must be > 0");
  if (const auto* di = std::get_if<InitDilatedProfile>(&init); di && !(di->l > 0))
    throw std::invalid_argument("dilated profile scale must be > 0");
}

std::string describe(const SolveInit& init) {
  struct V {
    std::string operator()(const InitGaussian& g) const {
      return g.center ? fmt::format("gaussian(width={}, center=[{}, {}])", g.width, (*g.center)[0],
                                    (*g.center)[1])
                      : fmt::format("gaussian(width={}, center=potential minimum)", g.width);
    }
    std::string operator()(const InitConstant&) const { return "constant"; }
    std::string operator()(const InitFile& f) const { return fmt::format("file({})", f.path); }
    std::string operator()(const InitDilatedProfile& p) const {
      return fmt::format("dilated_profile(l={})", p.l);
    }
    std::string operator()(const InitWarmStart&) const { return "warm_start"; }
  };
  return std::visit(V{}, init);
}

namespace {

Point potential_argmin(const Grid& g, const Potential& V) {
  if (V.is_nonnegative()) return {0.0, 0.0};
  const Field s = V.sample(g);
  const auto v = s.values();
  const auto it = std::min_element(v.begin(), v.end());
  return g.node(std::size_t(it - v.begin()));
}

Field onto(const Grid& g, const Field& f) {
  if (f.grid().dim() != g.dim())
    throw std::invalid_argument("initial field has the wrong dimension");
  return f.grid().same_as(g) ? f : resample(f, g);
}

}  // namespace

Field make_initial(const Grid& g, const Potential& V, const SolveInit& init) {
  const int d = g.dim();
  Field u = std::visit(
      [&](const auto& in) -> Field {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, InitGaussian>) {
          const Point c = in.center ? *in.center : potential_argmin(g, V);
          const double w2 = in.width * in.width;
          return Field::from_function(g, [&](const Point& x) {
            double r2 = 0;
            for (int i = 0; i < d; ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
            return std::exp(-0.5 * r2 / w2);
          });
        } else if constexpr (std::is_same_v<T, InitConstant>) {
          return Field::constant(g, 1.0);
        } else if constexpr (std::is_same_v<T, InitFile>) {
          return onto(g, read_field(in.path));
        } else if constexpr (std::is_same_v<T, InitDilatedProfile>) {
          return dilate(onto(g, in.profile), in.l);
        } else {
          return onto(g, in.field);
        }
      },
      init);
  return renormalize_mass(u, 1.0);
}

namespace {

class EnergyObjective final : public detail::SphereObjective {
 public:
  explicit EnergyObjective(const EnergyFunctional& E) : E_(E) {}
  double value(const Field& u) const override { return E_.value(u); }
  double difference(const Field& un, const Field& u) const override { return E_.difference(un, u); }
  Field gradient(const Field& u) const override { return E_.gradient(u); }
  std::function<Field(const Field&)> hessian_at(const Field& u) const override {
    return E_.hessian_at(u);
  }

 private:
  const EnergyFunctional& E_;
};

}  // namespace

SolveResult solve(const Grid& g, const Potential& V, double a, const SolveConfig& cfg) {
  cfg.validate();
  if (!(a >= 0) || !std::isfinite(a)) throw std::invalid_argument("coupling must be finite and >= 0");
  const EnergyFunctional E(g, V, a);
  const EnergyObjective obj(E);
  detail::DescentOptions opt;
  opt.method = cfg.method;
  opt.step0 = cfg.step0;
  opt.shrink = cfg.shrink;
  opt.grow = cfg.grow;
  opt.tol_grad = cfg.tol_grad;
  opt.max_iters = cfg.max_iters;
  opt.floor = cfg.energy_floor;
  // Doubling accepted steps lets a descent that runs away along dilations reach the floor
  // quickly; it never changes where a bounded descent converges.
  opt.expand_steps = true;

  auto out = detail::minimize_on_sphere(obj, make_initial(g, V, cfg.init), opt);
  SolveResult r{out.u, E.breakdown(out.u), 0.0, out.grad_residual, out.iterations, out.status,
                describe(cfg.init), std::move(out.log)};
  r.mu = 0.5 * E.gradient(r.minimizer).dot(r.minimizer);
  return r;
}

SolveResult solve_from_dilated_profiles(const Grid& g, const Potential& V, double a,
                                        const SolveConfig& cfg, const Field& Q,
                                        const std::vector<double>& scales) {
  if (scales.empty()) throw std::invalid_argument("no dilation scales given");
  std::optional<SolveResult> last;
  for (double l : scales) {
    SolveConfig c = cfg;
    c.init = InitDilatedProfile{Q, l};
    last = solve(g, V, a, c);
    if (last->status == SolveStatus::DivergedBelowFloor) break;
  }
  return std::move(*last);
}

Field trial_state(const Grid& g, const Field& Q, double eps, Point x0) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("trial profile parameter must lie in (0, 1)");
  if (Q.grid().dim() != g.dim()) throw std::invalid_argument("profile has the wrong dimension");
  const int d = g.dim();
  const double R = std::pow(eps, -1.0 / 6.0);
  const double l = std::pow(eps, -1.0 / 5.0);
  if (R > Q.grid().half_width())
    throw std::invalid_argument(fmt::format(
        "cutoff radius {:.4g} exceeds the profile's box half-width {:.4g}; enlarge the box",
        R, Q.grid().half_width()));
  if (R / l > g.half_width())
    throw std::invalid_argument("trial state support does not fit in the target box");

  std::vector<double> ax0(g.n()), ax1(d == 2 ? g.n() : 0);
  for (int i = 0; i < g.n(); ++i) {
    ax0[i] = l * (g.coordinate(i) - x0[0]);
    if (d == 2) ax1[i] = l * (g.coordinate(i) - x0[1]);
  }
  auto v = evaluate_tensor(Q, ax0, ax1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point x = g.node(i);
    double r2 = 0;
    for (int k = 0; k < d; ++k) r2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    v[i] *= smooth_step(2.0 * (l * std::sqrt(r2) / R - 0.5));
  }
  return renormalize_mass(Field(g, std::move(v)), 1.0);
}

double trial_upper_bound(const Grid& g, const Potential& V, double a, double a_star,
                         const Field& Q, Point x0, std::optional<double> eps) {
  if (!(a_star > 0)) throw std::invalid_argument("a_star must be positive");
  if (!(a < a_star)) throw std::invalid_argument("trial bound needs a < a_star");
  const double e = eps ? *eps : 1.0 - a / a_star;
  return EnergyFunctional(g, V, a).value(trial_state(g, Q, e, x0));
}

}  // namespace bhgs
