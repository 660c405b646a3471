// Acceptance runner: one PASS/FAIL line per criterion. Exit status 0 iff every selected
// criterion passes.
//
//   bhgs_acceptance                 all criteria
//   bhgs_acceptance --criterion 9ii one criterion (1..8, 9i, 9ii, 9iii, 9iv, 9x, 10)

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bhgs/battery.hpp"
#include "bhgs/blowup.hpp"
#include "bhgs/checks.hpp"
#include "bhgs/cli.hpp"
#include "bhgs/io.hpp"

using namespace bhgs;

namespace {

const double kPi = std::numbers::pi;

struct Verdict {
  bool pass;
  std::string measured;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<Verdict()> run;
};

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

const Grid& grid_1d() {
  static const Grid g = Grid::make(1, 512, 16);
  return g;
}

const GNResult& gn_1d() {
  static const GNResult r = compute_gn(grid_1d(), SolveConfig{});
  return r;
}

Potential well() { return Potential::gaussian_well(1, 1); }

Verdict spectral() {
  CheckOptions opt;
  opt.fields = 50;
  bool ok = true;
  double worst_modes = 0, worst_parseval = 0;
  for (const Grid& g : {grid_1d(), Grid::make(2, 128, 12)}) {
    const auto m = check_spectral_modes(g);
    const auto p = check_parseval(g, opt);
    ok = ok && m.value < 1e-12 && p.value < 1e-12;
    worst_modes = std::max(worst_modes, m.value);
    worst_parseval = std::max(worst_parseval, p.value);
  }
  return {ok, fmt::format("modes {:.2e}, Parseval {:.2e} (d = 1 and 2; tol 1e-12)", worst_modes, worst_parseval)};
}

Verdict gaussian_oracle() {
  const Field u = Field::from_function(grid_1d(), [](const Point& x) { return std::exp(-0.5 * x[0] * x[0]); });
  const double sp = std::sqrt(kPi);
  const double e1 = rel(u.l2_norm_sq(), sp);
  const double e2 = rel(u.bilap_energy(), 0.75 * sp);
  const double e3 = rel(u.lq_integral(10), std::sqrt(kPi / 5));
  const double e4 = rel(gn_quotient(u), 0.75 * std::sqrt(5.0) * kPi * kPi);
  const double worst = std::max({e1, e2, e3});
  return {worst < 1e-11 && e4 < 1e-9,
          fmt::format("norms {:.2e} (tol 1e-11), J {:.2e} (tol 1e-9)", worst, e4)};
}

Verdict scaling() {
  CheckOptions opt;
  opt.fields = 50;
  const auto r = check_scaling_identity(grid_1d(), opt, 8.0);
  return {r.value < 1e-8, fmt::format("max relative residual {:.2e} (tol 1e-8)", r.value)};
}

Verdict gradient() {
  CheckOptions opt;
  opt.directions = 20;
  const auto r = check_gradient(grid_1d(), well(), 8.0, opt);
  return {r.pass, fmt::format("min observed order {:.4f} (tol 1.9); {}", r.value, r.detail)};
}

Verdict gn_stability() {
  GNOptions o;
  o.resolution_check = false;
  const double a256 = compute_gn(Grid::make(1, 256, 16), SolveConfig{}, o).a_star;
  const double a512 = gn_1d().a_star;
  CheckOptions opt;
  opt.gn_fields = 1000;
  const auto ineq = check_gn_inequality(grid_1d(), a512, opt);
  const double d = rel(a256, a512);
  return {d < 1e-6 && ineq.value >= 1 - 1e-6,
          fmt::format("a* = {:.13g}, |a*(256)/a*(512) - 1| = {:.2e} (tol 1e-6); min J/a* over 1000 = {:.6f}",
                      a512, d, ineq.value)};
}

Verdict normalization() {
  const auto& r = gn_1d();
  const double m = std::abs(std::sqrt(r.Q.l2_norm_sq()) - 1);
  const double k = std::abs(std::sqrt(r.Q.bilap_energy()) - 1);
  const double nl = std::abs(r.a_star * r.Q.lq_integral(10) - 1);
  const double res = el_residual(normalize_to_el(r.Q)).residual;
  return {m < 1e-8 && k < 1e-8 && nl < 1e-6 && res < 1e-5,
          fmt::format("| ||Q|| - 1 | = {:.1e}, | ||Lap Q|| - 1 | = {:.1e} (tol 1e-8); "
                      "|a* int Q^q - 1| = {:.1e} (tol 1e-6); EL residual {:.2e} (tol 1e-5)",
                      m, k, nl, res)};
}

Verdict existence() {
  const double a_star = gn_1d().a_star;
  bool ok = true;
  std::string s;
  double prev = std::numeric_limits<double>::infinity();
  for (double f : {0.6, 0.8, 0.9, 0.95}) {
    const auto r = solve(grid_1d(), well(), f * a_star, SolveConfig{});
    const bool conv = r.status == SolveStatus::Converged;
    ok = ok && conv && r.breakdown.total < 0 && r.breakdown.total <= prev + 1e-8;
    prev = r.breakdown.total;
    s += fmt::format("{}{}: E = {:.6f} ({})", s.empty() ? "" : ", ", f, r.breakdown.total, to_string(r.status));
  }
  return {ok, s};
}

Verdict non_existence() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt::format("bhgs_acceptance_{}", std::random_device{}());
  fs::create_directories(dir);
  const nlohmann::json cfg = {{"potential", {{"family", "gaussian_well"}, {"depth", 1.0}, {"width", 1.0}}},
                              {"solve", {{"a", "1.05*astar"}}},
                              {"solver", {{"init", {{"kind", "dilated_q"}, {"scale", 1.0}}}}},
                              {"output_dir", (dir / "out").string()}};
  write_json(dir / "config.json", cfg);
  std::ostringstream sink;
  auto call = [&](const char* cmd) {
    const std::string path = (dir / "config.json").string();
    const char* argv[] = {"bhgs", cmd, "--config", path.c_str()};
    return run_cli(4, argv, sink, sink);
  };
  const int gn_code = call("gn");
  const int code = call("solve");
  double energy = NAN;
  if (fs::exists(dir / "out" / "solve.json"))
    energy = read_json(dir / "out" / "solve.json")["breakdown"]["total"].get<double>();
  std::error_code ec;
  fs::remove_all(dir, ec);
  return {gn_code == kExitOk && code == kExitNonExistence && energy < -1e3,
          fmt::format("solve exit {} (want 3), final energy {:.4g} (want < -1e3)", code, energy)};
}

struct Sweep {
  std::vector<SweepRecord> fine, cross;
};

const Sweep& blowup_sweep() {
  static const Sweep s = [] {
    const auto schedule = geometric_schedule(gn_1d().a_star, 0.5, 8, 0.5);
    Sweep out;
    out.fine = sweep(grid_1d(), well(), schedule, SolveConfig{}, gn_1d());
    SweepOptions o;
    o.keep_fields = false;
    out.cross = sweep(Grid::make(1, 1024, 16), well(), schedule, SolveConfig{}, gn_1d(), o);
    return out;
  }();
  return s;
}

std::vector<const SweepRecord*> resolved(const std::vector<SweepRecord>& rs) {
  std::vector<const SweepRecord*> v;
  for (const auto& r : rs)
    if (r.resolved) v.push_back(&r);
  return v;
}

Verdict blowup_kinetic() {
  const auto res = resolved(blowup_sweep().fine);
  if (res.size() < 5) return {false, fmt::format("only {} resolved records", res.size())};
  bool inc = true;
  for (std::size_t i = res.size() - 4; i < res.size(); ++i) inc = inc && res[i]->kinetic > res[i - 1]->kinetic;
  return {inc, fmt::format("last 5 kinetic: {:.4f} ... {:.4f}, strictly increasing: {}",
                           res[res.size() - 5]->kinetic, res.back()->kinetic, inc)};
}

Verdict blowup_energy() {
  const auto c = energy_limit_check(blowup_sweep().fine, well(), 1, 0.05);
  return {c.pass, fmt::format("final |E - ess inf V| = {:.5f} (tol 0.05), monotone: {}", c.gap, c.monotone)};
}

Verdict blowup_gn() {
  const auto v = gn_sequence_check(blowup_sweep().fine, gn_1d());
  if (v.empty()) return {false, "no resolved records"};
  return {v.back() > 0.95 && v.back() < 1.001,
          fmt::format("a* int |w|^q at the last record = {:.7f} (window (0.95, 1.001))", v.back())};
}

Verdict blowup_h2() {
  const auto res = resolved(blowup_sweep().fine);
  if (res.empty()) return {false, "no resolved records"};
  bool dec = true;
  for (std::size_t i = 1; i < res.size(); ++i) dec = dec && res[i]->h2_dist_to_Q < res[i - 1]->h2_dist_to_Q;
  return {dec && res.back()->h2_dist_to_Q < 0.05,
          fmt::format("final H2 distance {:.5f} (tol 0.05), decreasing: {}", res.back()->h2_dist_to_Q, dec)};
}

Verdict blowup_cross() {
  const auto c = sweep_cross_check(blowup_sweep().fine, blowup_sweep().cross);
  return {c.max_discrepancy <= 1e-3,
          fmt::format("n = 512 vs 1024: max discrepancy {:.2e} ({}) (tol 1e-3)", c.max_discrepancy, c.worst)};
}

Verdict potential_machinery() {
  const Grid& g = grid_1d();
  const std::vector<Potential> Vs = {
      well(), Potential::sum({Potential::gaussian_well(2, 0.5, {-3.0, 0.0}), Potential::gaussian_well(1, 1.5, {2.0, 0.0})})};
  double split_err = 0, worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& V : Vs) {
    const Field s = V.sample(g);
    for (double tol : {0.5, 0.1, 0.01}) {
      const auto sp = level_split(V, g, 2, 4, tol);
      for (std::size_t i = 0; i < g.size(); ++i)
        split_err = std::max(split_err, std::abs(sp.v1_part[i] + sp.v2_part[i] + sp.v3_part[i] - std::min(s[i], 0.0)));
    }
    const auto fields = random_battery(g, 10, 1000);
    for (double eps : {0.1, 0.01}) {
      const double C = sobolev_lower_bound(V, g, eps);
      for (const auto& u : fields)
        worst_margin = std::min(worst_margin, eps * u.bilap_energy() + s.hadamard(u).dot(u) + C);
    }
  }
  return {split_err == 0 && worst_margin >= 0,
          fmt::format("level_split max pointwise defect {:.1e} (want 0); min eps K + int V u^2 + C = {:.4g} (want >= 0)",
                      split_err, worst_margin)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only;
  app.add_option("--criterion", only, "run one criterion");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"1", "spectral exactness", 1, spectral},
      {"2", "closed-form Gaussian oracle", 1, gaussian_oracle},
      {"3", "scaling identity", 5, scaling},
      {"4", "gradient consistency", 10, gradient},
      {"5", "GN constant stability", 120, gn_stability},
      {"6", "GN normalization", 60, normalization},
      {"7", "existence window", 120, existence},
      {"8", "non-existence above a*", 60, non_existence},
      {"9i", "blow-up: kinetic increasing", 900, blowup_kinetic},
      {"9ii", "blow-up: energy -> ess inf V", 900, blowup_energy},
      {"9iii", "blow-up: GN value of the profile", 900, blowup_gn},
      {"9iv", "blow-up: H2 distance to Q", 900, blowup_h2},
      {"9x", "blow-up: resolution cross-check", 900, blowup_cross},
      {"10", "potential machinery", 60, potential_machinery},
  };
  bool any = false, ok = true;
  for (const auto& c : all) {
    if (!only.empty() && c.id != only) continue;
    any = true;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.pass && secs < c.budget_s;
    ok = ok && pass;
    fmt::print("criterion {:<5} {}  {}: {} [{:.2f} s, budget {} s]\n", c.id, pass ? "PASS" : "FAIL", c.title,
               v.measured, secs, c.budget_s);
  }
  if (!any) {
    fmt::print(stderr, "unknown criterion \"{}\"\n", only);
    return 2;
  }
  return ok ? 0 : 1;
}
