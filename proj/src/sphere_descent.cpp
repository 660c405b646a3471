#include "sphere_descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bhgs::detail {

namespace {

Field unit(const Field& u) { return renormalize_mass(u, 1.0); }

// (c + 1)/(c + 1 + |k|^4) with c = K(u): an approximate inverse of the Hessian's
// leading part, scaled to act as the identity on the low modes.
Field precondition(const Field& r, const Field& u, double c) {
  const Grid& g = r.grid();
  Spectrum s = r.spectrum();
  const auto k4 = g.symbol_k4();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= c / (c + k4[i]);
  return project_tangent(Field::from_spectrum(g, s), u);
}

}  // namespace

DescentOutcome minimize_on_sphere(const SphereObjective& f, Field u0, const DescentOptions& opt) {
  Field u = unit(u0);
  double E = f.value(u);
  double step = opt.step0;
  double last_step = 0;
  std::vector<IterationRecord> log;

  for (int it = 0;; ++it) {
    const Field gfull = f.gradient(u);
    const double lam = gfull.dot(u);
    const Field g = gfull - u * lam;
    const double gr = std::sqrt(g.dot(g));
    log.push_back({it, E, gr, last_step});

    auto done = [&](SolveStatus s) { return DescentOutcome{u, E, gr, it, s, std::move(log)}; };
    if (!(E >= opt.floor)) return done(SolveStatus::DivergedBelowFloor);
    if (gr <= opt.tol_grad) return done(SolveStatus::Converged);
    if (it >= opt.max_iters) return done(SolveStatus::MaxIters);

    const double c = u.bilap_energy() + 1.0;
    Field d = g;
    double tau = step;
    switch (opt.method) {
      case SolveMethod::Gradient:
        d = -g;
        break;
      case SolveMethod::Preconditioned:
        d = -precondition(g, u, c);
        break;
      case SolveMethod::Newton: {
        // Truncated CG on the Riemannian Newton system Hess d = -g, where
        // Hess v = P(f''(u) v) - <f'(u), u> v on the tangent space.
        const auto H = f.hessian_at(u);
        auto Hv = [&](const Field& v) { return project_tangent(H(v), u) - v * lam; };
        Field x = Field::zeros(u.grid());
        Field r = -g;
        Field z = precondition(r, u, c);
        Field p = z;
        double rz = r.dot(z);
        bool have = false;
        for (int k = 0; k < opt.max_cg; ++k) {
          const Field Hp = Hv(p);
          const double pHp = p.dot(Hp);
          if (!(pHp > 0)) {
            // Negative curvature: fall back to the preconditioned gradient if nothing
            // has been accumulated yet, otherwise keep the current iterate.
            if (k == 0) {
              x = z;
              have = true;
            }
            break;
          }
          const double alpha = rz / pHp;
          x = x + p * alpha;
          have = true;
          r = r - Hp * alpha;
          if (std::sqrt(r.dot(r)) < std::min(0.1, std::sqrt(gr)) * gr) break;
          z = precondition(r, u, c);
          const double rz_new = r.dot(z);
          p = z + p * (rz_new / rz);
          rz = rz_new;
        }
        d = have ? x : precondition(-g, u, c);
        tau = 1.0;
        break;
      }
    }

    // Decreases within a few ulps of the objective are round-off, not progress.
    const double noise = 8 * std::numeric_limits<double>::epsilon() * (1 + std::abs(E));
    bool accepted = false;
    Field un = u;
    double dE = 0;
    for (int k = 0; k < 60; ++k) {
      un = unit(u + d * tau);
      dE = f.difference(un, u);
      if (dE < -noise) {
        accepted = true;
        break;
      }
      tau *= opt.shrink;
    }
    if (!accepted && opt.method == SolveMethod::Newton) {
      // Near the minimum the predicted decrease 0.5 |<g, d>| can sink below the round-off
      // of the objective while stiff modes still carry gradient; the Newton step is then
      // judged by the gradient norm instead.
      un = unit(u + d);
      const Field gn = f.gradient(un);
      const Field gt = gn - un * gn.dot(un);
      if (std::sqrt(gt.dot(gt)) < 0.5 * gr) {
        accepted = true;
        dE = f.difference(un, u);
        tau = 1.0;
      }
    }
    if (!accepted) {
      log.back().step_size = 0;
      return done(SolveStatus::Stalled);
    }
    if (opt.expand_steps) {
      for (int k = 0; k < 60 && E + dE >= opt.floor; ++k) {
        const Field trial = unit(u + d * (2 * tau));
        const double dT = f.difference(trial, u);
        if (!(dT < dE)) break;
        un = trial;
        dE = dT;
        tau *= 2;
      }
    }
    u = un;
    E += dE;
    last_step = tau;
    if (opt.method != SolveMethod::Newton) step = tau * opt.grow;
  }
}

}  // namespace bhgs::detail
