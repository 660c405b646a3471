#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "bhgs/blowup.hpp"
#include "bhgs/checks.hpp"
#include "bhgs/cli.hpp"
#include "bhgs/config.hpp"
#include "bhgs/io.hpp"
#include "bhgs/log.hpp"

#ifndef BHGS_VERSION
#define BHGS_VERSION "unknown"
#endif

namespace bhgs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig cfg;
  std::string command;
  std::ostream& out;
  std::ostream& err;
  json outputs = json::array();

  void note_output(const fs::path& p) { outputs.push_back(p.string()); }

  void write_manifest(const json& summary) {
    const json m = {
        {"command", command},
        {"artifact_version", BHGS_VERSION},
        {"config_input", cfg.raw},
        {"config", cfg.to_json()},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"outputs", outputs},
        {"summary", summary},
    };
    write_json(cfg.output_dir / "manifest.json", m);
  }
};

fs::path gn_path(const RunConfig& c) {
  return c.gn_artifact ? *c.gn_artifact : c.output_dir / "gn.json";
}

std::optional<GNResult> try_load_gn(const RunConfig& c) {
  const fs::path p = gn_path(c);
  if (!fs::exists(p)) return std::nullopt;
  std::optional<GNResult> r;
  try {
    r = load_gn(p);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("cannot read GN artifact {}: {}", p.string(), e.what()));
  }
  if (r->Q.grid().dim() != c.d)
    throw ConfigError(fmt::format("GN artifact {} is for d = {}, config has d = {}", p.string(),
                                  r->Q.grid().dim(), c.d));
  return r;
}

GNResult require_gn(const RunConfig& c, const char* why) {
  auto r = try_load_gn(c);
  if (!r)
    throw ConfigError(fmt::format(
        "{} needs a GN result, but {} does not exist; run `bhgs gn` with the same output "
        "directory first, or set \"gn_artifact\" in the config",
        why, gn_path(c).string()));
  return std::move(*r);
}

// Resolves "dilated_q" initials once the profile is known.
SolveConfig solver_config(const RunConfig& c, const std::optional<GNResult>& gn) {
  SolveConfig s = c.solver;
  if (c.dilated_q_scale) {
    if (!gn) throw ConfigError("solver.init.kind \"dilated_q\" needs a GN result");
    s.init = InitDilatedProfile{gn->Q, *c.dilated_q_scale};
  }
  return s;
}

bool gn_accepted(const GNResult& r, const SolveConfig& s) {
  // At the round-off floor the line search can stall slightly above tol_grad.
  return r.status == SolveStatus::Converged ||
         (r.status == SolveStatus::Stalled && r.grad_residual <= 100 * s.tol_grad);
}

int cmd_gn(Context& ctx) {
  const auto& c = ctx.cfg;
  const Grid g = c.make_grid();
  GNOptions opt = c.gn;
  opt.threads = c.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const GNResult r = compute_gn(g, c.solver, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_gn(c.output_dir, r);
  ctx.note_output(c.output_dir / "gn.json");
  ctx.note_output(c.output_dir / "gn_Q.bhf");

  fmt::print(ctx.out, "a_star            {:.15g}\n", r.a_star);
  fmt::print(ctx.out, "status            {} (|grad log J| = {:.3e})\n", to_string(r.status), r.grad_residual);
  fmt::print(ctx.out, "||Q||^2 - 1       {:.3e}\n", r.Q.l2_norm_sq() - 1.0);
  fmt::print(ctx.out, "||Lap Q||^2 - 1   {:.3e}\n", r.Q.bilap_energy() - 1.0);
  fmt::print(ctx.out, "a_star int Q^q    {:.15g}\n", r.nonlinear_check);
  fmt::print(ctx.out, "EL fit            c1 = {:.10g}, c2 = {:.10g}, residual {:.3e}\n", r.el.c1, r.el.c2,
             r.el.residual);
  fmt::print(ctx.out, "EL normalized     c1 = {:.10g}, c2 = {:.10g}, residual {:.3e}\n",
             r.el_normalized.c1, r.el_normalized.c2, r.el_normalized.residual);
  fmt::print(ctx.out, "resolution cross-check:\n  {:>6}  {:>20}  {:>10}\n", "n", "a_star", "rel.diff");
  for (const auto& [n, a] : r.resolutions)
    fmt::print(ctx.out, "  {:>6}  {:>20.15g}  {:>10.2e}\n", n, a, std::abs(a - r.a_star) / r.a_star);
  fmt::print(ctx.out, "time              {:.2f} s\n", secs);

  const bool ok = gn_accepted(r, c.solver);
  ctx.write_manifest({{"a_star", r.a_star}, {"status", to_string(r.status)}, {"accepted", ok}});
  if (!ok) {
    fmt::print(ctx.err, "GN minimization did not converge (status {})\n", to_string(r.status));
    return kExitCheckFailed;
  }
  return kExitOk;
}

json breakdown_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"potential", e.potential}, {"nonlinear", e.nonlinear},
          {"total", e.total},     {"a", e.a},                 {"q", e.q}};
}

int cmd_solve(Context& ctx) {
  const auto& c = ctx.cfg;
  const Grid g = c.make_grid();
  const Potential V = c.make_potential();
  const bool need_gn = c.solve_a.needs_astar() || c.dilated_q_scale || c.trial_eps;
  std::optional<GNResult> gn = need_gn ? std::optional(require_gn(c, "solve")) : try_load_gn(c);
  const double a = c.solve_a.resolve(gn ? std::optional(gn->a_star) : std::nullopt);
  if (!(a >= 0)) throw ConfigError("solve.a must be >= 0");
  const auto cls = V.classify(g.dim());
  if (cls == PotentialClass::Neither && !V.is_nonnegative())
    throw ConfigError(fmt::format("potential {} satisfies neither (V1) nor (V2)", V.describe()));
  if (c.trial_eps && gn && !(a < gn->a_star))
    throw ConfigError("solve.trial_eps needs a < astar");

  const SolveConfig s = solver_config(c, gn);
  SolveResult r = solve(g, V, a, s);
  bool witness_search = false;
  if (gn && a > gn->a_star && r.status != SolveStatus::DivergedBelowFloor && !c.dilated_q_scale) {
    // Above the threshold: look for a divergent descent from concentrated copies of Q.
    witness_search = true;
    r = solve_from_dilated_profiles(g, V, a, s, gn->Q);
  }

  write_field(c.output_dir / "solution.bhf", r.minimizer);
  write_iteration_log(c.output_dir / "iterations.csv", r.log);
  ctx.note_output(c.output_dir / "solution.bhf");
  ctx.note_output(c.output_dir / "iterations.csv");
  json res = {{"a", a},
              {"a_over_astar", gn ? json(a / gn->a_star) : json(nullptr)},
              {"status", to_string(r.status)},
              {"breakdown", breakdown_json(r.breakdown)},
              {"mu", r.mu},
              {"grad_residual", r.grad_residual},
              {"iterations", r.iterations},
              {"init", r.init_description},
              {"witness_search", witness_search},
              {"potential_class", to_string(cls)},
              {"ess_inf", V.ess_inf(g.dim())}};
  if (c.trial_eps) {
    const double bound = trial_upper_bound(g, V, a, gn->a_star, gn->Q, c.trial_center, *c.trial_eps);
    res["trial_upper_bound"] = bound;
    fmt::print(ctx.out, "trial bound   {:.12g}\n", bound);
  }
  write_json(c.output_dir / "solve.json", res);
  ctx.note_output(c.output_dir / "solve.json");

  fmt::print(ctx.out, "a             {:.15g}{}\n", a,
             gn ? fmt::format(" ({:.6g} a_star)", a / gn->a_star) : std::string());
  fmt::print(ctx.out, "status        {}\n", to_string(r.status));
  fmt::print(ctx.out, "energy        {:.15g}\n", r.breakdown.total);
  fmt::print(ctx.out, "  kinetic     {:.15g}\n  potential   {:.15g}\n  int |u|^q   {:.15g}\n",
             r.breakdown.kinetic, r.breakdown.potential, r.breakdown.nonlinear);
  fmt::print(ctx.out, "mu            {:.15g}\n", r.mu);
  fmt::print(ctx.out, "|grad|        {:.3e} after {} iterations\n", r.grad_residual, r.iterations);
  ctx.write_manifest(res);

  switch (r.status) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::DivergedBelowFloor:
      fmt::print(ctx.err, "energy fell below the floor {}: no minimizer exists at this coupling\n",
                 s.energy_floor);
      return kExitNonExistence;
    default:
      fmt::print(ctx.err, "solver stopped without converging ({})\n", to_string(r.status));
      return kExitCheckFailed;
  }
}

std::vector<std::string> record_row(const SweepRecord& r) {
  return {format_double(r.a),          format_double(r.gap_to_threshold), format_double(r.energy),
          format_double(r.kinetic),    format_double(r.eps),              format_double(r.center[0]),
          format_double(r.center[1]),  format_double(r.h2_dist_to_Q),     format_double(r.gn_value),
          format_double(r.mu),         format_double(r.grad_residual),    std::to_string(r.iterations),
          to_string(r.status),         r.resolved ? "1" : "0"};
}

const std::vector<std::string> kSweepHeader = {
    "a",   "one_minus_a_over_astar", "energy", "kinetic",       "eps",        "center_x", "center_y",
    "h2_dist_to_Q", "gn_value", "mu", "grad_residual", "iterations", "status", "resolved"};

struct SweepVerdict {
  json checks = json::object();
  bool pass = true;
  void add(const std::string& name, bool ok, json detail) {
    detail["pass"] = ok;
    checks[name] = detail;
    pass = pass && ok;
  }
};

int cmd_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  const Grid g = c.make_grid();
  const Potential V = c.make_potential();
  const GNResult gn = require_gn(c, "sweep");
  const auto cls = V.classify(g.dim());
  if (cls == PotentialClass::Neither && !V.is_nonnegative())
    throw ConfigError(fmt::format("potential {} satisfies neither (V1) nor (V2)", V.describe()));
  std::vector<double> schedule;
  if (c.raw.contains("sweep") && c.raw["sweep"].contains("couplings")) {
    for (const auto& e : c.raw["sweep"]["couplings"]) schedule.push_back(Coupling::parse(e).resolve(gn.a_star));
  } else {
    schedule = geometric_schedule(gn.a_star, c.schedule.start, c.schedule.count, c.schedule.ratio);
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0 && schedule[i] < gn.a_star))
      throw ConfigError(fmt::format("sweep coupling {} = {} is not in (0, astar = {})", i, schedule[i], gn.a_star));
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw ConfigError("sweep couplings must be strictly increasing");
  }
  const SolveConfig s = solver_config(c, gn);

  SweepOptions opt;
  opt.on_record = [&](const SweepRecord& r) {
    fmt::print(ctx.out, "  1-a/a*={:<12.6g} E={:<18.12g} K={:<14.8g} eps={:<10.5g} h2={:<10.4g} "
               "a*N(w)={:<12.9g} {}{}\n",
               r.gap_to_threshold, r.energy, r.kinetic, r.eps, r.h2_dist_to_Q, r.gn_value,
               to_string(r.status), r.resolved ? "" : " (unresolved)");
    ctx.out.flush();
  };
  fmt::print(ctx.out, "sweep at n = {}:\n", g.n());
  const auto recs = sweep(g, V, schedule, s, gn, opt);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    rows.push_back(record_row(recs[i]));
    if (recs[i].u) write_field(c.output_dir / "sweep" / fmt::format("u_{:02d}.bhf", i), *recs[i].u);
    if (recs[i].w) write_field(c.output_dir / "sweep" / fmt::format("w_{:02d}.bhf", i), *recs[i].w);
  }
  write_csv(c.output_dir / "sweep.csv", kSweepHeader, rows);
  ctx.note_output(c.output_dir / "sweep.csv");
  ctx.note_output(c.output_dir / "sweep");

  SweepVerdict v;
  std::vector<const SweepRecord*> res;
  for (const auto& r : recs)
    if (r.resolved) res.push_back(&r);
  if (res.empty()) {
    v.add("resolution", false,
          {{"message", fmt::format("no record has eps > 4 dx = {:.4g}; increase grid.n", 4 * g.dx())}});
  } else {
    const int tail = std::min<int>(c.sweep_checks.kinetic_tail, int(res.size()));
    bool kin = tail >= 2;
    for (int i = int(res.size()) - tail + 1; i < int(res.size()); ++i)
      kin = kin && res[i]->kinetic > res[i - 1]->kinetic;
    v.add("kinetic_increasing", kin, {{"records", tail}});

    try {
      const auto el = energy_limit_check(recs, V, g.dim(), c.sweep_checks.energy_gap_tolerance);
      v.add("energy_limit", el.pass,
            {{"gap", el.gap}, {"monotone", el.monotone}, {"tolerance", c.sweep_checks.energy_gap_tolerance},
             {"gaps", el.gaps}, {"ess_inf", V.ess_inf(g.dim())}});
    } catch (const std::invalid_argument& e) {
      v.add("energy_limit", false, {{"message", e.what()}});
    }

    const double gl = res.back()->gn_value;
    v.add("gn_sequence", gl > c.sweep_checks.gn_low && gl < c.sweep_checks.gn_high,
          {{"last", gl}, {"window", {c.sweep_checks.gn_low, c.sweep_checks.gn_high}},
           {"values", gn_sequence_check(recs, gn)}});

    bool dec = true;
    for (std::size_t i = 1; i < res.size(); ++i) dec = dec && res[i]->h2_dist_to_Q < res[i - 1]->h2_dist_to_Q;
    v.add("h2_to_Q", dec && res.back()->h2_dist_to_Q < c.sweep_checks.h2_tolerance,
          {{"final", res.back()->h2_dist_to_Q}, {"decreasing", dec}, {"tolerance", c.sweep_checks.h2_tolerance}});
  }

  if (c.sweep_checks.cross_check_n > 0) {
    const Grid g2 = Grid::make(c.d, c.sweep_checks.cross_check_n, c.half_width);
    fmt::print(ctx.out, "cross-check sweep at n = {}:\n", g2.n());
    SweepOptions o2 = opt;
    o2.keep_fields = false;
    const auto recs2 = sweep(g2, V, schedule, s, gn, o2);
    const auto cc = sweep_cross_check(recs, recs2);
    v.add("cross_check", cc.max_discrepancy <= c.sweep_checks.cross_check_tolerance,
          {{"n", g2.n()}, {"max_discrepancy", cc.max_discrepancy}, {"worst", cc.worst},
           {"tolerance", c.sweep_checks.cross_check_tolerance}});
  }

  json summary = {{"records", recs.size()}, {"resolved", res.size()}, {"checks", v.checks}, {"pass", v.pass}};
  write_json(c.output_dir / "sweep_summary.json", summary);
  ctx.note_output(c.output_dir / "sweep_summary.json");
  fmt::print(ctx.out, "summary ({} of {} records resolved):\n", res.size(), recs.size());
  for (const auto& [name, d] : v.checks.items())
    fmt::print(ctx.out, "  {:<20} {}  {}\n", name, d["pass"].get<bool>() ? "PASS" : "FAIL", d.dump());
  ctx.write_manifest(summary);
  return v.pass ? kExitOk : kExitCheckFailed;
}

int cmd_check(Context& ctx) {
  const auto& c = ctx.cfg;
  const Grid g = c.make_grid();
  const Potential V = c.make_potential();
  auto gn = try_load_gn(c);
  if (!gn) {
    fmt::print(ctx.out, "no GN artifact at {}; computing a_star on this grid\n", gn_path(c).string());
    GNOptions o = c.gn;
    o.threads = c.threads;
    gn = compute_gn(g, c.solver, o);
  }
  CheckOptions opt;
  opt.seed = c.seed;
  opt.fields = c.check_fields;
  opt.gn_fields = c.check_gn_fields;
  opt.directions = c.check_directions;
  opt.a_star = gn->a_star;
  opt.inject_gradient_sign_error = c.inject_gradient_sign_error;
  const double a = c.check_a.resolve(gn->a_star);
  const auto rows = run_checks(g, V, a, opt);
  bool all = true;
  json jr = json::array();
  fmt::print(ctx.out, "{:<22} {:<6} {:>14} {:>14}  {}\n", "check", "result", "observed", "threshold", "detail");
  for (const auto& r : rows) {
    all = all && r.pass;
    fmt::print(ctx.out, "{:<22} {:<6} {:>14.6e} {:>14.6e}  {}\n", r.name, r.pass ? "PASS" : "FAIL", r.value,
               r.tolerance, r.detail);
    jr.push_back({{"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"tolerance", r.tolerance},
                  {"detail", r.detail}});
  }
  const json summary = {{"pass", all}, {"rows", jr}, {"a", a}, {"a_star", gn->a_star}};
  write_json(c.output_dir / "check.json", summary);
  ctx.note_output(c.output_dir / "check.json");
  ctx.write_manifest(summary);
  return all ? kExitOk : kExitCheckFailed;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  return f;
}

int cmd_plotdata(Context& ctx) {
  const auto& c = ctx.cfg;
  const Potential V = c.make_potential();
  const fs::path src = c.output_dir / "sweep.csv";
  std::ifstream in(src);
  if (!in) throw ConfigError(fmt::format("{} not found; run `bhgs sweep` first", src.string()));
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError(fmt::format("{} lacks column {}", src.string(), name));
    return std::size_t(it - header.begin());
  };
  const auto ig = col("one_minus_a_over_astar"), ie = col("eps"), iE = col("energy"),
             ih = col("h2_dist_to_Q"), ir = col("resolved");
  const double target = V.ess_inf(c.d);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    rows.push_back({f.at(ig), f.at(ie), format_double(std::stod(f.at(iE)) - target), f.at(ih), f.at(ir)});
  }
  write_csv(c.output_dir / "plotdata.csv",
            {"one_minus_a_over_astar", "eps", "energy_minus_ess_inf", "h2_dist_to_Q", "resolved"}, rows);
  ctx.note_output(c.output_dir / "plotdata.csv");
  fmt::print(ctx.out, "wrote {} rows to {}\n", rows.size(), (c.output_dir / "plotdata.csv").string());
  ctx.write_manifest({{"rows", rows.size()}});
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of the mass-constrained biharmonic NLS energy at the critical power"};
  app.require_subcommand(1);
  std::string config_path, output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--output", output, "output directory (overrides output_dir)");
  app.add_option("--seed", seed, "seed for randomized batteries");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(Context&);
  };
  const Cmd cmds[] = {
      {"gn", "compute a_star and the normalized optimizer Q", cmd_gn},
      {"solve", "minimize the energy at one coupling", cmd_solve},
      {"sweep", "continuation in a toward a_star with blow-up diagnostics", cmd_sweep},
      {"check", "run the property batteries", cmd_check},
      {"plotdata", "emit plotting columns from a finished sweep", cmd_plotdata},
  };
  for (const auto& c : cmds) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::stringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  try {
    RunConfig cfg = config_path.empty() ? RunConfig::from_json(json::object()) : RunConfig::load(config_path);
    if (!output.empty()) cfg.output_dir = output;
    if (seed) cfg.seed = *seed;
    if (threads) {
      if (*threads < 0) throw ConfigError("--threads must be >= 0");
      cfg.threads = *threads;
    }
    Context ctx{std::move(cfg), sub->get_name(), out, err};
    for (const auto& c : cmds)
      if (sub->get_name() == c.name) return c.fn(ctx);
    return kExitFailure;
  } catch (const ConfigError& e) {
    fmt::print(err, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
}

}  // namespace bhgs
