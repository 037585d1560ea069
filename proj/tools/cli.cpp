#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "omegascale/classical_scale.hpp"
#include "omegascale/closed_forms.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/fluctuation.hpp"
#include "omegascale/mc_oracle.hpp"
#include "omegascale/scale_table.hpp"

namespace omegascale::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail("unknown key `" + key + "` in " + where);
  }
}

double num(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing `" + key + "`");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + ": `" + key + "` must be a number");
  return v.get<double>();
}

std::optional<double> opt_num(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return num(obj, key, where);
}

std::string str(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing `" + key + "`");
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + ": `" + key + "` must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing `" + key + "`");
  const json& v = obj.at(key);
  if (!v.is_array()) fail(where + ": `" + key + "` must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(where + ": `" + key + "` must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::uint64_t uint_value(const json& obj, const std::string& key, const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(where + ": `" + key + "` must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool flag(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + ": `" + key + "` must be true or false");
  return v.get<bool>();
}

std::string one_of(const json& obj, const std::string& key, const std::string& where,
                   std::initializer_list<std::string_view> choices) {
  const std::string v = str(obj, key, where);
  if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
    std::string list;
    for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
    fail(where + ": `" + key + "` must be one of " + list);
  }
  return v;
}

std::pair<LevyModel, std::optional<double>> parse_model(const json& m, const std::filesystem::path& base) {
  const std::string w = "model";
  if (!m.is_object()) fail("model must be a JSON object");
  const std::string type = one_of(m, "type", w, {"bm", "cl", "table"});
  if (type == "bm") {
    check_keys(m, w, {"type", "mu", "sigma"});
    return {BrownianDrift{num(m, "mu", w), num(m, "sigma", w)}, std::nullopt};
  }
  if (type == "cl") {
    check_keys(m, w, {"type", "mu", "vartheta", "rho"});
    return {CramerLundberg{num(m, "mu", w), num(m, "vartheta", w), num(m, "rho", w)}, std::nullopt};
  }
  check_keys(m, w, {"type", "scale_csv", "phi_csv", "q"});
  const double q = num(m, "q", w);
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() ? path : base / path).string();
  };
  Tabulated t{std::make_shared<ScaleTable>(load_scale_table_csv(resolve(str(m, "scale_csv", w)), q)),
              std::make_shared<PhiTable>(load_phi_table_csv(resolve(str(m, "phi_csv", w))))};
  return {t, q};
}

OmegaSpec parse_omega(const json& o) {
  const std::string w = "omega";
  if (!o.is_object()) fail("omega must be a JSON object");
  const std::string type = one_of(o, "type", w, {"constant", "band", "linear_band", "exponential", "step", "table"});
  if (type == "constant") {
    check_keys(o, w, {"type", "q"});
    return OmegaSpec(ConstantOmega{num(o, "q", w)});
  }
  if (type == "band") {
    check_keys(o, w, {"type", "p", "q", "a", "b"});
    return OmegaSpec(BandOmega{num(o, "p", w), num(o, "q", w), num(o, "a", w), num(o, "b", w)});
  }
  if (type == "linear_band") {
    check_keys(o, w, {"type", "gamma0", "gamma1", "d"});
    return OmegaSpec(LinearBandOmega{num(o, "gamma0", w), num(o, "gamma1", w), num(o, "d", w)});
  }
  if (type == "exponential") {
    check_keys(o, w, {"type", "varrho", "xi"});
    return OmegaSpec(ExponentialOmega{num(o, "varrho", w), num(o, "xi", w)});
  }
  if (type == "step") {
    check_keys(o, w, {"type", "levels", "cuts"});
    return OmegaSpec(StepOmega{num_array(o, "levels", w), num_array(o, "cuts", w)});
  }
  check_keys(o, w, {"type", "x", "values"});
  return OmegaSpec(TableOmega{num_array(o, "x", w), num_array(o, "values", w)});
}

// x positions: "x" as a number or array, else "points" evenly spaced on [lo, hi].
std::vector<double> positions(const json& q, double lo, double hi, std::size_t default_points) {
  if (q.contains("x")) {
    if (q.at("x").is_number()) return {q.at("x").get<double>()};
    return num_array(q, "x", "query");
  }
  const std::size_t n = uint_value(q, "points", "query", default_points);
  if (n == 0) fail("query: `points` must be >= 1");
  if (n == 1) return {lo};
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  xs.back() = hi;
  return xs;
}

void validate_query(JobConfig& cfg, bool has_grid) {
  const json& q = cfg.query;
  const std::string w = "query";
  const std::string& cmd = cfg.command;
  auto need_omega = [&] {
    if (!cfg.omega) fail(cmd + " needs an `omega` block");
  };
  auto need_grid = [&] {
    if (!has_grid) fail(cmd + " needs a `grid` block");
  };
  auto check_x = [&] {
    if (q.contains("x") && !q.at("x").is_number()) num_array(q, "x", w);
    uint_value(q, "points", w, 1);
  };
  auto check_c = [&](double c) {
    if (!(c > 0.0)) fail("query: `c` must be positive");
    if (c > cfg.grid.x_max) fail("query: `c` lies beyond grid.x_max");
  };

  if (cmd == "scale") {
    check_keys(q, w, {"q", "points", "x"});
    need_omega();
    need_grid();
    opt_num(q, "q", w);
    check_x();
  } else if (cmd == "exit") {
    check_keys(q, w, {"kind", "c", "x", "points"});
    need_omega();
    need_grid();
    const std::string kind = one_of(
        q, "kind", w, {"two_sided_up", "two_sided_down", "one_sided_up", "one_sided_down", "reflected", "reflected_dual"});
    if (kind != "one_sided_down") check_c(num(q, "c", w));
    if (kind == "one_sided_down" && !q.contains("x")) fail("query: one_sided_down needs `x`");
    check_x();
  } else if (cmd == "resolvent") {
    check_keys(q, w, {"kind", "x", "c", "nodes", "y_lo", "y_hi"});
    need_omega();
    need_grid();
    const std::string kind = one_of(q, "kind", w, {"u", "xi", "theta", "l", "l_hat"});
    num(q, "x", w);
    if (kind != "theta") check_c(num(q, "c", w));
    uint_value(q, "nodes", w, 1);
    opt_num(q, "y_lo", w);
    opt_num(q, "y_hi", w);
  } else if (cmd == "occupation") {
    check_keys(q, w, {"kind", "c", "x", "points"});
    need_omega();
    need_grid();
    if (!std::holds_alternative<BandOmega>(cfg.omega->variant())) fail("occupation needs a band omega");
    one_of(q, "kind", w, {"two_sided_up", "two_sided_down", "reflected", "one_sided_up"});
    check_c(num(q, "c", w));
    check_x();
  } else if (cmd == "omega-ruin") {
    check_keys(q, w, {"x"});
    need_omega();
    if (!std::holds_alternative<BrownianDrift>(cfg.model)) fail("omega-ruin needs a bm model");
    if (!std::holds_alternative<LinearBandOmega>(cfg.omega->variant())) fail("omega-ruin needs a linear_band omega");
    if (!q.contains("x")) fail("query: missing `x`");
    check_x();
  } else if (cmd == "mc-check") {
    check_keys(q, w, {"quantity", "x", "c", "n_paths", "seed", "dt", "horizon_cap", "estimator", "bridge_correction",
                      "thinning_margin"});
    need_omega();
    const std::string qty = one_of(q, "quantity", w, {"A", "B", "C", "C_hat", "one_sided_up", "bankruptcy"});
    num(q, "x", w);
    if (qty == "bankruptcy") {
      if (!std::holds_alternative<BrownianDrift>(cfg.model)) fail("bankruptcy needs a bm model");
      if (!std::holds_alternative<LinearBandOmega>(cfg.omega->variant())) fail("bankruptcy needs a linear_band omega");
    } else {
      need_grid();
      check_c(num(q, "c", w));
    }
    uint_value(q, "n_paths", w, 1);
    uint_value(q, "seed", w, 1);
    opt_num(q, "dt", w);
    opt_num(q, "horizon_cap", w);
    opt_num(q, "thinning_margin", w);
    flag(q, "bridge_correction", w, true);
    if (q.contains("estimator")) one_of(q, "estimator", w, {"exponential_weight", "poisson_thinning"});
  } else {
    fail("unknown command `" + cmd + "`");
  }
}

void add_meta(Table& t, const std::string& key, double v) { t.meta.emplace_back(key, format_number(v)); }
void add_meta(Table& t, const std::string& key, const std::string& v) { t.meta.emplace_back(key, json(v).dump()); }
void add_meta_raw(Table& t, const std::string& key, const std::string& literal) { t.meta.emplace_back(key, literal); }

void add_provenance(Table& t, const JobConfig& cfg) {
  add_meta(t, "model", std::string(model_name(cfg.model)));
  if (cfg.omega) add_meta(t, "omega", cfg.omega->name());
}

}  // namespace

JobConfig parse_config(const json& doc, const std::string& command, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("configuration must be a JSON object");
  check_keys(doc, "configuration", {"model", "omega", "grid", "solver", "query", "output"});
  JobConfig cfg;
  cfg.command = command;
  if (!doc.contains("model")) fail("configuration: missing `model`");
  try {
    std::tie(cfg.model, cfg.table_q) = parse_model(doc.at("model"), base_dir);
    validate(cfg.model);
    if (doc.contains("omega")) cfg.omega = parse_omega(doc.at("omega"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }

  const bool has_grid = doc.contains("grid");
  if (has_grid) {
    const json& g = doc.at("grid");
    check_keys(g, "grid", {"x_max", "h"});
    cfg.grid.x_max = num(g, "x_max", "grid");
    cfg.grid.h = opt_num(g, "h", "grid").value_or(1e-3);
    if (!(cfg.grid.x_max > 0.0) || !std::isfinite(cfg.grid.x_max)) fail("grid: `x_max` must be positive");
    if (!(cfg.grid.h > 0.0) || cfg.grid.h > cfg.grid.x_max) fail("grid: `h` must lie in (0, x_max]");
  }
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver", {"delta", "extrapolate"});
    cfg.solver.delta = opt_num(s, "delta", "solver");
    if (cfg.solver.delta && !(*cfg.solver.delta >= 0.0)) fail("solver: `delta` must be >= 0");
    cfg.solver.extrapolate = flag(s, "extrapolate", "solver", false);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"format", "path"});
    if (o.contains("format")) cfg.format = one_of(o, "format", "output", {"csv", "json"}) == "csv" ? Format::csv : Format::json;
    if (o.contains("path")) cfg.output_path = str(o, "path", "output");
  }
  if (doc.contains("query")) cfg.query = doc.at("query");
  validate_query(cfg, has_grid);
  return cfg;
}

Table cmd_scale(const JobConfig& cfg) {
  const json& q = cfg.query;
  const double level = opt_num(q, "q", "query").value_or(cfg.table_q.value_or(0.0));
  const ScaleFunctions classical(cfg.model, level);
  const OmegaScale s = build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
  std::optional<OmegaScale> hs;
  if (cfg.omega->floor()) hs = build_h_omega(cfg.model, *cfg.omega, cfg.grid);

  Table t;
  t.columns = {"x", "w_q", "z_q", "w_omega", "z_omega"};
  if (hs) t.columns.push_back("h_omega");
  for (double x : positions(q, 0.0, cfg.grid.x_max, 101)) {
    std::vector<double> row{x, classical.w(x), classical.z(x), s.w(x), s.z(x)};
    if (hs) row.push_back(hs->h(x));
    t.rows.push_back(std::move(row));
  }
  add_provenance(t, cfg);
  add_meta(t, "q", level);
  add_meta(t, "delta", s.delta());
  add_meta(t, "h", cfg.grid.h);
  add_meta(t, "x_max", cfg.grid.x_max);
  return t;
}

Table cmd_exit(const JobConfig& cfg) {
  const json& q = cfg.query;
  const std::string kind = q.at("kind").get<std::string>();
  Table t;
  add_provenance(t, cfg);
  add_meta(t, "kind", kind);
  if (kind == "one_sided_down") {
    const OmegaScale s = build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
    const LimitConstants lim = limit_constants(cfg.model, *cfg.omega, cfg.grid);
    t.columns = {"x", "survival", "ruin"};
    for (double x : positions(q, 0.0, 0.0, 1)) {
      const auto [surv, ruin] = one_sided_down(x, s, lim);
      t.rows.push_back({x, surv, ruin});
    }
    add_meta(t, "c_used", lim.c_used);
    return t;
  }
  const double c = q.at("c").get<double>();
  add_meta(t, "c", c);
  t.columns = {"x", "value"};
  const std::vector<double> xs = positions(q, 0.0, c, 21);
  if (kind == "one_sided_up") {
    const OmegaScale s = build_h_omega(cfg.model, *cfg.omega, cfg.grid);
    for (double x : xs) t.rows.push_back({x, one_sided_up(x, c, s)});
    return t;
  }
  const OmegaScale s = build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
  for (double x : xs) {
    double v = 0.0;
    if (kind == "two_sided_up")
      v = exit_a(x, c, s);
    else if (kind == "two_sided_down")
      v = exit_b(x, c, s);
    else if (kind == "reflected")
      v = reflected_up(x, c, s);
    else
      v = reflected_dual(x, c, s);
    t.rows.push_back({x, v});
  }
  return t;
}

Table cmd_resolvent(const JobConfig& cfg) {
  const json& q = cfg.query;
  const std::string kind = q.at("kind").get<std::string>();
  const double x = q.at("x").get<double>();
  PanelOptions po;
  po.nodes = uint_value(q, "nodes", "query", po.nodes);
  po.y_lo = opt_num(q, "y_lo", "query");
  po.y_hi = opt_num(q, "y_hi", "query");
  const ScaleContext ctx{cfg.model, *cfg.omega, cfg.grid, cfg.solver};
  const bool needs_h = kind == "xi" || kind == "theta";
  const OmegaScale s = needs_h ? build_h_omega(cfg.model, *cfg.omega, cfg.grid)
                               : build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
  ResolventDensity r;
  if (kind == "theta") {
    r = resolvent_theta(ctx, s, x, po);
  } else {
    const double c = q.at("c").get<double>();
    if (kind == "u")
      r = resolvent_u(ctx, s, x, c, po);
    else if (kind == "xi")
      r = resolvent_xi(ctx, s, x, c, po);
    else if (kind == "l")
      r = resolvent_l(ctx, s, x, c, po);
    else
      r = resolvent_l_hat(ctx, s, x, c, po);
  }
  Table t;
  t.columns = {"y", "density"};
  for (std::size_t i = 0; i < r.y.size(); ++i) t.rows.push_back({r.y[i], r.density[i]});
  add_provenance(t, cfg);
  add_meta(t, "kind", kind);
  add_meta(t, "x", x);
  if (kind != "theta") add_meta(t, "c", q.at("c").get<double>());
  if (r.atom_at_zero) add_meta(t, "atom_at_zero", *r.atom_at_zero);
  return t;
}

Table cmd_occupation(const JobConfig& cfg) {
  const json& q = cfg.query;
  const std::string kind = q.at("kind").get<std::string>();
  const double c = q.at("c").get<double>();
  const auto& band = std::get<BandOmega>(cfg.omega->variant());
  const BandOmegaScale exact(cfg.model, band.p, band.q, band.a, band.b);

  const bool up = kind == "one_sided_up";
  const OmegaScale s = up ? build_h_omega(cfg.model, *cfg.omega, cfg.grid)
                          : build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
  Table t;
  t.columns = {"x", "closed_form", "numeric"};
  for (double x : positions(q, 0.0, c, 21)) {
    double closed = 0.0, numeric = 0.0;
    if (kind == "two_sided_up") {
      closed = exact.w(x) / exact.w(c);
      numeric = exit_a(x, c, s);
    } else if (kind == "two_sided_down") {
      closed = exact.z(x) - exact.w(x) * exact.z(c) / exact.w(c);
      numeric = exit_b(x, c, s);
    } else if (kind == "reflected") {
      closed = exact.z(x) / exact.z(c);
      numeric = reflected_up(x, c, s);
    } else {
      closed = exact.h(x) / exact.h(c);
      numeric = one_sided_up(x, c, s);
    }
    t.rows.push_back({x, closed, numeric});
  }
  add_provenance(t, cfg);
  add_meta(t, "kind", kind);
  add_meta(t, "c", c);
  return t;
}

Table cmd_omega_ruin(const JobConfig& cfg) {
  const auto& bm = std::get<BrownianDrift>(cfg.model);
  const auto& lb = std::get<LinearBandOmega>(cfg.omega->variant());
  const OmegaModelSolution sol = omega_model(lb.gamma0, lb.gamma1, lb.d, bm.mu, bm.sigma);
  Table t;
  t.columns = {"x", "bankruptcy", "w_omega"};
  for (double x : positions(cfg.query, 0.0, 0.0, 1)) t.rows.push_back({x, sol.bankruptcy(x), sol.w(x)});
  add_provenance(t, cfg);
  add_meta(t, "m1", sol.m1);
  add_meta(t, "m2", sol.m2);
  add_meta(t, "c", sol.c_w_inv_inf);
  return t;
}

Table cmd_mc_check(const JobConfig& cfg) {
  const json& q = cfg.query;
  const std::string w = "query";
  const std::string qty = q.at("quantity").get<std::string>();
  const double x = q.at("x").get<double>();

  SimConfig sim;
  sim.model = cfg.model;
  sim.omega = *cfg.omega;
  sim.n_paths = uint_value(q, "n_paths", w, sim.n_paths);
  sim.seed = uint_value(q, "seed", w, sim.seed);
  sim.dt = opt_num(q, "dt", w).value_or(sim.dt);
  sim.horizon_cap = opt_num(q, "horizon_cap", w).value_or(sim.horizon_cap);
  sim.thinning_margin = opt_num(q, "thinning_margin", w).value_or(sim.thinning_margin);
  sim.bridge_correction = flag(q, "bridge_correction", w, true);
  if (q.contains("estimator") && q.at("estimator") == "poisson_thinning") sim.estimator = Estimator::poisson_thinning;

  double formula = 0.0;
  MCEstimate est;
  if (qty == "bankruptcy") {
    const auto& bm = std::get<BrownianDrift>(cfg.model);
    const auto& lb = std::get<LinearBandOmega>(cfg.omega->variant());
    formula = omega_model_bankruptcy(lb.gamma0, lb.gamma1, lb.d, bm.mu, bm.sigma, x);
    est = simulate_bankruptcy(sim, lb.gamma0, lb.gamma1, lb.d, x);
  } else {
    const double c = q.at("c").get<double>();
    if (qty == "one_sided_up") {
      formula = one_sided_up(x, c, build_h_omega(cfg.model, *cfg.omega, cfg.grid));
      est = simulate_one_sided_up(sim, x, c);
    } else {
      const OmegaScale s = build_w_omega(cfg.model, *cfg.omega, cfg.grid, cfg.solver);
      if (qty == "A" || qty == "B") {
        formula = qty == "A" ? exit_a(x, c, s) : exit_b(x, c, s);
        const ExitEstimate e = simulate_exit(sim, x, c);
        est = qty == "A" ? e.a : e.b;
      } else {
        const bool dual = qty == "C_hat";
        formula = dual ? reflected_dual(x, c, s) : reflected_up(x, c, s);
        est = simulate_reflected(sim, x, c, dual);
      }
    }
  }
  const double diff = est.mean - formula;
  const double z = est.std_error > 0.0 ? diff / est.std_error : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));

  Table t;
  t.columns = {"formula", "mean", "stderr", "z"};
  t.rows.push_back({formula, est.mean, est.std_error, z});
  add_provenance(t, cfg);
  add_meta(t, "quantity", qty);
  add_meta(t, "mean", est.mean);
  add_meta(t, "stderr", est.std_error);
  add_meta_raw(t, "n", std::to_string(sim.n_paths));
  add_meta_raw(t, "seed", std::to_string(sim.seed));
  add_meta(t, "truncated_fraction", est.truncated_fraction);
  add_meta(t, "formula", formula);
  add_meta(t, "z", z);
  add_meta_raw(t, "flagged", est.flagged() ? "true" : "false");
  t.flagged = est.flagged();
  return t;
}

Table dispatch(const JobConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "scale") return cmd_scale(cfg);
  if (c == "exit") return cmd_exit(cfg);
  if (c == "resolvent") return cmd_resolvent(cfg);
  if (c == "occupation") return cmd_occupation(cfg);
  if (c == "omega-ruin") return cmd_omega_ruin(cfg);
  if (c == "mc-check") return cmd_mc_check(cfg);
  fail("unknown command `" + c + "`");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\r\n";
  }
  return out;
}

std::string render_json(const Table& t, const std::string& command) {
  auto number = [](double v) {
    const std::string s = format_number(v);
    return s.empty() ? std::string("null") : s;
  };
  std::string out = "{\n  \"command\": " + json(command).dump();
  for (const auto& [key, literal] : t.meta) out += ",\n  " + json(key).dump() + ": " + (literal.empty() ? "null" : literal);
  out += ",\n  \"columns\": [";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? ", " : "") + json(t.columns[i]).dump();
  out += "],\n  \"rows\": [";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",\n    [" : "\n    [";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) out += (i ? ", " : "") + number(t.rows[r][i]);
    out += "]";
  }
  out += t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Omega-killed exit identities, scale functions and Monte Carlo checks", "omegascale"};
  std::string command, config_path, output_path;
  bool verbose = false;
  app.add_option("command", command, "scale | exit | resolvent | occupation | omega-ruin | mc-check")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "JSON job configuration")->required();
  app.add_option("--output", output_path, "output file (overrides output.path; default stdout)");
  app.add_flag("--verbose", verbose, "timing and diagnostics on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  JobConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) fail("cannot open " + config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(config_path + ": " + e.what());
    }
    cfg = parse_config(doc, command, std::filesystem::path(config_path).parent_path());
  } catch (const ConfigError& e) {
    err << "omegascale: configuration error: " << e.what() << '\n';
    return 2;
  }

  Table table;
  try {
    table = dispatch(cfg);
  } catch (const ConfigError& e) {
    err << "omegascale: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "omegascale: numeric error: " << e.what() << '\n';
    return 3;
  }

  const std::string text = cfg.format == Format::csv ? render_csv(table) : render_json(table, command);
  const std::string path = !output_path.empty() ? output_path : cfg.output_path.value_or("");
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      err << "omegascale: configuration error: cannot write " << path << '\n';
      return 2;
    }
    file << text;
  }
  if (verbose) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "omegascale: " << command << " finished in " << secs << " s, " << table.rows.size() << " rows\n";
  }
  if (table.flagged) {
    err << "omegascale: Monte Carlo estimate flagged: more than 1% of paths hit horizon_cap\n";
    return 4;
  }
  return 0;
}

}  // namespace omegascale::cli
