#include "bhgs/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <regex>

namespace bhgs {

using nlohmann::json;

Coupling Coupling::parse(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_string()) throw ConfigError("coupling must be a number or a string like \"0.5*astar\"");
  const auto s = j.get<std::string>();
  static const std::regex re(R"(^\s*(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?astar\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re))
    throw ConfigError(fmt::format("cannot parse coupling \"{}\"; expected e.g. \"0.5*astar\"", s));
  return {std::nullopt, m[1].matched ? std::stod(m[1].str()) : 1.0};
}

double Coupling::resolve(std::optional<double> a_star) const {
  if (literal) return *literal;
  if (!a_star) throw ConfigError("coupling is given relative to astar but no GN result is loaded");
  return factor * *a_star;
}

std::string Coupling::describe() const {
  return literal ? fmt::format("{}", *literal) : fmt::format("{}*astar", factor);
}

namespace {

template <class T>
T get(const json& obj, const char* key, T fallback, const char* where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}.{} has the wrong type", where, key));
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(fmt::format("\"{}\" must be an object", key));
  return j.at(key);
}

SolveInit parse_init(const json& j, std::optional<double>& dilated_scale) {
  if (!j.is_object()) throw ConfigError("solver.init must be an object");
  const auto kind = get<std::string>(j, "kind", "gaussian", "solver.init");
  if (kind == "gaussian") {
    InitGaussian g;
    g.width = get<double>(j, "width", 1.0, "solver.init");
    if (j.contains("center")) {
      const auto c = j.at("center");
      if (!c.is_array() || c.empty() || c.size() > 2)
        throw ConfigError("solver.init.center must be an array of 1 or 2 numbers");
      Point p{0.0, 0.0};
      for (std::size_t i = 0; i < c.size(); ++i) p[i] = c[i].get<double>();
      g.center = p;
    }
    return g;
  }
  if (kind == "constant") return InitConstant{};
  if (kind == "file") {
    if (!j.contains("path")) throw ConfigError("solver.init.path is required for kind \"file\"");
    return InitFile{get<std::string>(j, "path", "", "solver.init")};
  }
  if (kind == "dilated_q") {
    dilated_scale = get<double>(j, "scale", 1.0, "solver.init");
    return InitGaussian{};  // replaced once the GN profile is loaded
  }
  throw ConfigError(fmt::format("unknown solver.init.kind \"{}\"", kind));
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  c.raw = j;

  const auto& g = section(j, "grid");
  c.d = get<int>(g, "d", 1, "grid");
  c.n = get<int>(g, "n", c.d == 2 ? 128 : 512, "grid");
  c.half_width = get<double>(g, "half_width", c.d == 2 ? 12.0 : 16.0, "grid");

  if (j.contains("potential")) c.potential = j.at("potential");

  const auto& s = section(j, "solver");
  c.solver.step0 = get<double>(s, "step0", c.solver.step0, "solver");
  c.solver.shrink = get<double>(s, "shrink", c.solver.shrink, "solver");
  c.solver.grow = get<double>(s, "grow", c.solver.grow, "solver");
  c.solver.tol_grad = get<double>(s, "tol_grad", c.solver.tol_grad, "solver");
  c.solver.max_iters = get<int>(s, "max_iters", c.solver.max_iters, "solver");
  c.solver.energy_floor = get<double>(s, "energy_floor", c.solver.energy_floor, "solver");
  try {
    c.solver.method = parse_method(get<std::string>(s, "method", "newton", "solver"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (s.contains("init")) c.solver.init = parse_init(s.at("init"), c.dilated_q_scale);

  const auto& gn = section(j, "gn");
  c.gn.restarts = get<int>(gn, "restarts", c.gn.restarts, "gn");
  c.gn.resolution_check = get<bool>(gn, "resolution_check", c.gn.resolution_check, "gn");
  c.gn.symmetrize = get<bool>(gn, "symmetrize", c.gn.symmetrize, "gn");
  if (j.contains("gn_artifact")) c.gn_artifact = get<std::string>(j, "gn_artifact", "", "config");

  const auto& so = section(j, "solve");
  if (so.contains("a")) c.solve_a = Coupling::parse(so.at("a"));
  if (so.contains("trial_eps")) c.trial_eps = get<double>(so, "trial_eps", 0.0, "solve");
  if (so.contains("trial_center")) {
    const auto& tc = so.at("trial_center");
    if (!tc.is_array() || tc.empty() || tc.size() > 2)
      throw ConfigError("solve.trial_center must be an array of 1 or 2 numbers");
    for (std::size_t i = 0; i < tc.size(); ++i) c.trial_center[i] = tc[i].get<double>();
  }

  const auto& sw = section(j, "sweep");
  const auto& sch = section(sw, "schedule");
  c.schedule.start = get<double>(sch, "start", c.schedule.start, "sweep.schedule");
  c.schedule.count = get<int>(sch, "count", c.schedule.count, "sweep.schedule");
  c.schedule.ratio = get<double>(sch, "ratio", c.schedule.ratio, "sweep.schedule");
  const auto& ck = section(sw, "checks");
  auto& sc = c.sweep_checks;
  sc.energy_gap_tolerance = get<double>(ck, "energy_gap_tolerance", sc.energy_gap_tolerance, "sweep.checks");
  sc.h2_tolerance = get<double>(ck, "h2_tolerance", sc.h2_tolerance, "sweep.checks");
  sc.gn_low = get<double>(ck, "gn_low", sc.gn_low, "sweep.checks");
  sc.gn_high = get<double>(ck, "gn_high", sc.gn_high, "sweep.checks");
  sc.kinetic_tail = get<int>(ck, "kinetic_tail", sc.kinetic_tail, "sweep.checks");
  sc.cross_check_n = get<int>(ck, "cross_check_n", sc.cross_check_n, "sweep.checks");
  sc.cross_check_tolerance = get<double>(ck, "cross_check_tolerance", sc.cross_check_tolerance, "sweep.checks");

  const auto& chk = section(j, "check");
  if (chk.contains("a")) c.check_a = Coupling::parse(chk.at("a"));
  c.check_fields = get<int>(chk, "fields", c.check_fields, "check");
  c.check_gn_fields = get<int>(chk, "gn_fields", c.check_gn_fields, "check");
  c.check_directions = get<int>(chk, "directions", c.check_directions, "check");
  c.inject_gradient_sign_error =
      get<bool>(chk, "inject_gradient_sign_error", c.inject_gradient_sign_error, "check");

  c.output_dir = get<std::string>(j, "output_dir", c.output_dir.string(), "config");
  c.seed = get<std::uint64_t>(j, "seed", c.seed, "config");
  c.threads = get<int>(j, "threads", c.threads, "config");

  // Validation that needs no computation.
  (void)c.make_grid();
  (void)c.make_potential();
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.dilated_q_scale && !(*c.dilated_q_scale > 0)) throw ConfigError("solver.init.scale must be > 0");
  if (c.gn.restarts < 1) throw ConfigError("gn.restarts must be >= 1");
  if (!(c.schedule.start > 0 && c.schedule.start < 1))
    throw ConfigError("sweep.schedule.start (= 1 - a/astar of the first point) must lie in (0, 1)");
  if (!(c.schedule.ratio > 0 && c.schedule.ratio < 1))
    throw ConfigError("sweep.schedule.ratio must lie in (0, 1)");
  if (c.schedule.count < 1) throw ConfigError("sweep.schedule.count must be >= 1");
  if (c.trial_eps && !(*c.trial_eps > 0 && *c.trial_eps < 1))
    throw ConfigError("solve.trial_eps must lie in (0, 1)");
  if (c.trial_eps && std::pow(*c.trial_eps, -1.0 / 6.0) > c.half_width)
    throw ConfigError(fmt::format("solve.trial_eps = {} puts the cutoff radius {:.3g} outside the box "
                                  "(half_width {}); enlarge grid.half_width",
                                  *c.trial_eps, std::pow(*c.trial_eps, -1.0 / 6.0), c.half_width));
  if (c.check_fields < 1 || c.check_gn_fields < 1 || c.check_directions < 1)
    throw ConfigError("check battery sizes must be >= 1");
  if (sc.cross_check_n != 0 && (sc.cross_check_n < 8 || (sc.cross_check_n & (sc.cross_check_n - 1))))
    throw ConfigError("sweep.checks.cross_check_n must be 0 or a power of two >= 8");
  if (c.threads < 0) throw ConfigError("threads must be >= 0");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed JSON in {}: {}", path.string(), e.what()));
  }
  return from_json(j);
}

Grid RunConfig::make_grid() const {
  try {
    return Grid::make(d, n, half_width);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("grid: {}", e.what()));
  }
}

Potential RunConfig::make_potential() const {
  try {
    return Potential::from_json(potential);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json RunConfig::to_json() const {
  json init;
  if (dilated_q_scale) {
    init = {{"kind", "dilated_q"}, {"scale", *dilated_q_scale}};
  } else {
    init = {{"description", describe(solver.init)}};
  }
  return {
      {"grid", {{"d", d}, {"n", n}, {"half_width", half_width}}},
      {"potential", potential},
      {"solver",
       {{"step0", solver.step0},
        {"shrink", solver.shrink},
        {"grow", solver.grow},
        {"tol_grad", solver.tol_grad},
        {"max_iters", solver.max_iters},
        {"energy_floor", solver.energy_floor},
        {"method", to_string(solver.method)},
        {"init", init}}},
      {"gn", {{"restarts", gn.restarts}, {"resolution_check", gn.resolution_check},
              {"symmetrize", gn.symmetrize}}},
      {"gn_artifact", gn_artifact ? gn_artifact->string() : ""},
      {"solve", {{"a", solve_a.describe()}}},
      {"sweep",
       {{"schedule", {{"start", schedule.start}, {"count", schedule.count}, {"ratio", schedule.ratio}}},
        {"checks",
         {{"energy_gap_tolerance", sweep_checks.energy_gap_tolerance},
          {"h2_tolerance", sweep_checks.h2_tolerance},
          {"gn_low", sweep_checks.gn_low},
          {"gn_high", sweep_checks.gn_high},
          {"kinetic_tail", sweep_checks.kinetic_tail},
          {"cross_check_n", sweep_checks.cross_check_n},
          {"cross_check_tolerance", sweep_checks.cross_check_tolerance}}}}},
      {"check",
       {{"a", check_a.describe()},
        {"fields", check_fields},
        {"gn_fields", check_gn_fields},
        {"directions", check_directions},
        {"inject_gradient_sign_error", inject_gradient_sign_error}}},
      {"output_dir", output_dir.string()},
      {"seed", seed},
      {"threads", threads},
  };
}

}  // namespace bhgs
