#include "hjm/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "hjm/hj_layer.hpp"
#include "hjm/verifier.hpp"
#include "hjm/viscous.hpp"

namespace hjm {

std::string version_string() { return "hjm 0.1.0"; }

double DensityTerm::operator()(double x) const {
  if (type == "constant") return value;
  if (type == "box") return (x >= from && x < to) ? value : 0.0;
  if (type == "ramp") return (x >= from && x < to) ? value + slope * (x - from) : 0.0;
  if (type == "bump") {
    double s = (x - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    double c = std::cos(0.5 * std::numbers::pi * s);
    return value * c * c;
  }
  throw Error(ErrorCode::ConfigError, "unknown density term '" + type + "'");
}

double InitialData::density_at(double x) const {
  double s = 0.0;
  for (const auto& d : density) s += d(x);
  return s;
}

RadonMeasure1D InitialData::discretize(const Grid1D& grid, bool infinite_left, bool infinite_right,
                                       double shift) const {
  RadonMeasure1D m;
  m.grid = grid;
  m.infinite_left = infinite_left;
  m.infinite_right = infinite_right;
  m.density.resize(grid.cells);
  const double dx = grid.dx();
  constexpr int sub = 16;
  for (int i = 0; i < grid.cells; ++i) {
    double s = 0.0;
    for (int q = 0; q < sub; ++q) s += density_at(grid.node(i) + dx * (q + 0.5) / sub - shift);
    m.density(i) = s / sub;
  }
  for (const Atom& a : atoms) {
    double face = grid.a + std::round((a.x - grid.a) / dx) * dx;
    m.atoms.push_back({face, a.mass});
  }
  std::sort(m.atoms.begin(), m.atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  return m;
}

bool Scenario::wants(const std::string& check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

namespace {

const std::vector<std::string>& default_checks(const std::string& kind) {
  static const std::vector<std::string> cauchy{"bounds",     "monotonicity", "correspondence", "entropy",
                                               "compatibility", "envelope", "decay",          "supersolution",
                                               "growth",     "time_lipschitz", "finiteness"};
  static const std::vector<std::string> comparison{"comparison"};
  static const std::vector<std::string> viscous{"viscous"};
  static const std::vector<std::string> adversarial{"compatibility", "entropy"};
  if (kind == "cauchy") return cauchy;
  if (kind == "comparison") return comparison;
  if (kind == "viscous") return viscous;
  if (kind == "adversarial") return adversarial;
  throw Error(ErrorCode::ConfigError, "unknown scenario kind '" + kind + "'");
}

void require_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) {
  if (!n.IsMap()) throw Error(ErrorCode::ConfigError, where + " must be a mapping");
  for (auto it = n.begin(); it != n.end(); ++it) {
    auto key = it->first.as<std::string>();
    if (!allowed.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& n, const char* key, T& out) {
  if (n[key]) out = n[key].as<T>();
}

InitialData parse_initial(const YAML::Node& n, const std::string& where) {
  InitialData d;
  if (!n) return d;
  require_keys(n, {"density", "atoms"}, where);
  if (n["density"]) {
    for (const auto& t : n["density"]) {
      require_keys(t, {"type", "value", "from", "to", "center", "width", "slope"}, where + ".density");
      DensityTerm term;
      term.type = t["type"].as<std::string>();
      read(t, "value", term.value);
      read(t, "from", term.from);
      read(t, "to", term.to);
      read(t, "center", term.center);
      read(t, "width", term.width);
      read(t, "slope", term.slope);
      if (term.type != "constant" && term.type != "box" && term.type != "bump" && term.type != "ramp")
        throw Error(ErrorCode::ConfigError, "unknown density term '" + term.type + "'");
      if (term.type == "bump" && !(term.width > 0.0)) throw Error(ErrorCode::ConfigError, "bump width must be positive");
      d.density.push_back(term);
    }
  }
  if (n["atoms"]) {
    for (const auto& a : n["atoms"]) {
      require_keys(a, {"x", "mass"}, where + ".atoms");
      Atom atom{a["x"].as<double>(), a["mass"].as<double>()};
      if (atom.mass == 0.0) throw Error(ErrorCode::ConfigError, "atom with zero mass");
      d.atoms.push_back(atom);
    }
  }
  return d;
}

Scenario parse_node(const YAML::Node& root, const std::filesystem::path& source) {
  require_keys(root,
               {"name", "kind", "flux", "domain", "infinite", "T_max", "initial", "compare_to", "refine", "checks",
                "tolerances", "expect", "transport", "viscous", "adversarial", "output", "seed"},
               "scenario");
  Scenario s;
  s.source = source;
  if (!root["name"] || !root["flux"] || !root["domain"])
    throw Error(ErrorCode::ConfigError, "scenario needs name, flux and domain");
  s.name = root["name"].as<std::string>();
  if (s.name.empty() || s.name.find('/') != std::string::npos)
    throw Error(ErrorCode::ConfigError, "scenario name must be a plain identifier");
  read(root, "kind", s.kind);
  s.flux = root["flux"].as<std::string>();
  const YAML::Node dom = root["domain"];
  require_keys(dom, {"a", "b", "cells"}, "domain");
  s.grid.a = dom["a"].as<double>();
  s.grid.b = dom["b"].as<double>();
  s.grid.cells = dom["cells"].as<int>();
  if (!(s.grid.b > s.grid.a) || s.grid.cells < 8) throw Error(ErrorCode::ConfigError, "domain needs a < b, cells >= 8");
  if (root["infinite"]) {
    require_keys(root["infinite"], {"left", "right"}, "infinite");
    read(root["infinite"], "left", s.infinite_left);
    read(root["infinite"], "right", s.infinite_right);
  }
  if (root["T_max"] && root["T_max"].as<std::string>() != "auto") {
    s.T_max = root["T_max"].as<double>();
    if (!(*s.T_max > 0.0)) throw Error(ErrorCode::ConfigError, "T_max must be positive");
  }
  s.initial = parse_initial(root["initial"], "initial");
  s.compare_to = parse_initial(root["compare_to"], "compare_to");
  if (const YAML::Node r = root["refine"]) {
    require_keys(r,
                 {"surrogate_factors", "levels", "eps_factor", "cfl", "report_dt", "snapshots", "bracket_rel_tol",
                  "tol_conv", "tol_mass_rel", "tol_mass_cells", "max_steps"},
                 "refine");
    RefineSchedule& q = s.refine;
    read(r, "surrogate_factors", q.surrogate_factors);
    read(r, "levels", q.levels);
    read(r, "eps_factor", q.eps_factor);
    read(r, "cfl", q.cfl);
    read(r, "report_dt", q.report_dt);
    read(r, "snapshots", q.snapshots);
    read(r, "bracket_rel_tol", q.bracket_rel_tol);
    read(r, "tol_conv", q.tol_conv);
    read(r, "tol_mass_rel", q.tol_mass_rel);
    read(r, "tol_mass_cells", q.tol_mass_cells);
    read(r, "max_steps", q.max_steps);
    if (q.surrogate_factors.empty() || !std::is_sorted(q.surrogate_factors.begin(), q.surrogate_factors.end()) ||
        q.surrogate_factors.front() <= 0.0)
      throw Error(ErrorCode::ConfigError, "surrogate_factors must be positive and increasing");
    if (q.levels < 1 || !(q.cfl > 0.0 && q.cfl <= 0.5) || !(q.report_dt > 0.0) || q.snapshots < 2)
      throw Error(ErrorCode::ConfigError, "malformed refinement schedule");
  }
  s.checks = root["checks"] ? root["checks"].as<std::vector<std::string>>() : default_checks(s.kind);
  static const std::set<std::string> known{"bounds",        "monotonicity", "conservation", "correspondence",
                                           "entropy",       "compatibility", "envelope",    "decay",
                                           "supersolution", "growth",       "time_lipschitz", "finiteness",
                                           "transport",     "comparison",   "viscous",     "weak"};
  for (const auto& c : s.checks)
    if (!known.count(c)) throw Error(ErrorCode::ConfigError, "unknown check '" + c + "'");
  default_checks(s.kind);  // validates the kind
  if (const YAML::Node t = root["tolerances"]) {
    require_keys(t,
                 {"conservation", "entropy_per_dx", "entropy_time_levels", "compatibility", "compatibility_cells",
                  "compatibility_skip", "envelope", "supersolution", "growth", "decay_rate", "time_lipschitz", "viscous"},
                 "tolerances");
    read(t, "conservation", s.tol.conservation);
    read(t, "entropy_per_dx", s.tol.entropy_per_dx);
    read(t, "compatibility", s.tol.compatibility);
    read(t, "compatibility_cells", s.tol.compatibility_cells);
    read(t, "compatibility_skip", s.tol.compatibility_skip);
    read(t, "entropy_time_levels", s.tol.entropy_time_levels);
    if (s.tol.compatibility_cells < 1) throw Error(ErrorCode::ConfigError, "compatibility_cells must be >= 1");
    read(t, "envelope", s.tol.envelope);
    read(t, "supersolution", s.tol.supersolution);
    read(t, "growth", s.tol.growth);
    read(t, "decay_rate", s.tol.decay_rate);
    read(t, "time_lipschitz", s.tol.time_lipschitz);
    read(t, "viscous", s.tol.viscous);
  }
  if (const YAML::Node e = root["expect"]) {
    require_keys(e, {"extinction"}, "expect");
    if (e["extinction"]) s.expect_extinction = e["extinction"].as<bool>();
  }
  if (const YAML::Node t = root["transport"]) {
    require_keys(t, {"speed", "constant"}, "transport");
    read(t, "speed", s.transport_speed);
    read(t, "constant", s.transport_constant);
  }
  if (const YAML::Node v = root["viscous"]) {
    require_keys(v, {"eps", "m1", "m2", "piece"}, "viscous");
    read(v, "eps", s.viscous_eps);
    read(v, "m1", s.viscous_m1);
    read(v, "m2", s.viscous_m2);
    read(v, "piece", s.viscous_piece);
  }
  if (const YAML::Node a = root["adversarial"]) {
    require_keys(a, {"state", "speed"}, "adversarial");
    read(a, "state", s.adversarial_state);
    read(a, "speed", s.adversarial_speed);
  }
  if (root["output"]) s.output_dir = root["output"].as<std::string>();
  read(root, "seed", s.seed);
  if ((s.kind == "comparison" || s.kind == "viscous" || s.kind == "adversarial") && !s.T_max)
    throw Error(ErrorCode::ConfigError, "kind " + s.kind + " needs an explicit T_max");
  if (s.kind == "cauchy" && s.initial.atoms.empty() && !s.T_max)
    throw Error(ErrorCode::ConfigError, "T_max is automatic only with atoms");
  return s;
}

// ---- shared helpers -------------------------------------------------------

std::vector<double> state_grid(const GridField& f, int n) {
  double lo = f.values.minCoeff(), hi = f.values.maxCoeff();
  std::vector<double> k;
  for (int i = 0; i < n; ++i) k.push_back(lo + (hi - lo) * i / (n - 1));
  return k;
}

struct Verdict {
  Json checks = Json::object();
  std::vector<std::string> failed;
  void add(const std::string& name, Json body, bool ok) {
    body["ok"] = ok;
    checks[name] = std::move(body);
    if (!ok) failed.push_back(name);
  }
};

TraceSeries truncate(const TraceSeries& tr, double t_end) {
  TraceSeries out = tr;
  out.t.clear();
  out.values.clear();
  out.error.clear();
  for (std::size_t i = 0; i < tr.t.size() && tr.t[i] <= t_end; ++i) {
    out.t.push_back(tr.t[i]);
    out.values.push_back(tr.values[i]);
    out.error.push_back(i < tr.error.size() ? tr.error[i] : 0.0);
  }
  return out;
}

struct Horizon {
  double T = 0.0;
  std::string source;
};

Horizon automatic_horizon(const HamiltonianSpec& h, const HypothesisReport& hyp,
                          const RadonMeasure1D& u0) {
  const Asymptotics& as = h.asymptotics();
  double longest = 0.0;
  std::string source;
  for (const Atom& a : u0.atoms) {
    double mag = std::abs(a.mass);
    double gap = a.mass > 0.0 ? as.hstar_plus - as.hlow_plus : as.hstar_minus - as.hlow_minus;
    double best = 0.0;
    std::string src;
    if (gap > 0.0) {
      best = mag / gap;
      src = "upper bound";
    }
    if (hyp.regime_for(a.mass) == Regime::H5) {
      auto fh = check_finiteness_h5(h, hyp, a.mass, u0, default_k_grid());
      if (fh.horizon && *fh.horizon > best) {
        best = *fh.horizon;
        src = "H5 horizon";
      }
    }
    if (best == 0.0) {
      best = mag / (2.0 * h.sup_norm());
      src = "lower bound";
    }
    if (best > longest) {
      longest = best;
      source = src;
    }
  }
  return {4.0 * longest, "4 x " + source};
}

// ---- kinds ----------------------------------------------------------------

void run_cauchy(const Scenario& s, const HamiltonianSpec& h, const HypothesisReport& hyp, const RadonMeasure1D& u0,
                double T, Verdict& v, Json& summary, const std::filesystem::path& dir, bool write) {
  MeasureSolution msol;
  try {
    msol = solve_measure_cauchy(h, u0, T, s.refine);
  } catch (const NotConvergedError& e) {
    if (write && e.partial()) {
      write_atoms_csv(dir / "atoms.csv", *e.partial());
      write_field_csv(dir / "density.csv", e.partial()->density);
      write_json(dir / "refinement.json", to_json(e.partial()->refinement));
    }
    throw;
  }
  summary["refinement"] = to_json(msol.refinement);
  Json brackets = Json::array();
  for (const auto& a : msol.atoms)
    brackets.push_back({{"x", a.x}, {"c", a.c}, {"tol_mass", a.tol_mass}, {"bracket", to_json(a.bracket)}});
  summary["atoms"] = brackets;

  PiecewiseFunction U0 = primitive_function(u0, u0.grid.a);
  HJSolution hj = reconstruct_hj(msol, U0);
  const double dt = s.refine.report_dt;
  const double dx = msol.grid.dx();
  double max_tol_mass = 0.0;
  for (const auto& a : msol.atoms) max_tol_mass = std::max(max_tol_mass, a.tol_mass);

  if (s.wants("bounds")) {
    WaitingTimeReport w = check_bounds(msol, hj, h, hyp, dt);
    v.add("bounds", to_json(w), w.ok());
  }
  if (s.wants("monotonicity")) {
    // the solver rejects growth or sign change; here the largest increase is recorded
    double worst = 0.0;
    for (const auto& a : msol.atoms)
      for (std::size_t i = 1; i < a.C.size(); ++i) worst = std::max(worst, std::abs(a.C[i]) - std::abs(a.C[i - 1]));
    v.add("monotonicity", Json{{"max_increase", worst}}, true);
  }
  if (s.wants("conservation")) {
    double scale = u0.density.abs().sum() * dx;
    for (const auto& a : u0.atoms) scale += std::abs(a.mass);
    double drift = 0.0, balance = 0.0;
    for (std::size_t r = 0; r < msol.total_mass.size(); ++r) {
      drift = std::max(drift, std::abs(msol.total_mass[r] - msol.total_mass[0]));
      balance = std::max(balance, std::abs(msol.total_mass[r] - msol.total_mass[0] - msol.edge_inflow[r]));
    }
    double rel = drift / std::max(scale, 1e-300);
    v.add("conservation", Json{{"relative_drift", rel}, {"balance_error", balance}, {"tol", s.tol.conservation}},
          rel <= s.tol.conservation);
  }
  if (s.wants("correspondence")) {
    CorrespondenceReport c = check_correspondence(msol, hj);
    Json body = to_json(c);
    body["jump_tol"] = 2.0 * max_tol_mass;
    Json jumps = Json::array();
    for (const auto& j : hj.jumps) jumps.push_back({{"x", j.x}, {"J0", j.J0}, {"tau_bracket", to_json(j.tau)}});
    body["jumps"] = jumps;
    v.add("correspondence", body, c.jump_mismatch <= 2.0 * max_tol_mass);
  }
  if (s.wants("entropy")) {
    double worst = 0.0;
    int tests = 0, skipped = 0;
    Json where = nullptr;
    for (std::size_t i = 0; i < msol.subrectangles.size(); ++i) {
      const SubRectangle& r = msol.subrectangles[i];
      GridField f = msol.subrectangle_field(i);
      double rx = std::max(4 * dx, (r.x_hi - r.x_lo) / 10.0);
      double rt = (r.t_end - r.t_begin) / 4.0;
      double spacing = 0.0;
      for (Eigen::Index l = 0; l + 1 < f.levels(); ++l) spacing = std::max(spacing, f.t(l + 1) - f.t(l));
      // time quadrature of |u - k| phi_t is only trusted with enough levels per radius
      if (r.end_cell - r.first_cell < 16 || f.levels() < 8 || rt < s.tol.entropy_time_levels * spacing) {
        ++skipped;
        continue;
      }
      EntropyReport e = entropy_residual(h, f, state_grid(f, 9), r.x_lo, r.x_hi, r.t_begin, r.t_end, rx, rt);
      tests += e.tests;
      if (e.min_residual < worst) {
        worst = e.min_residual;
        where = {{"k", e.worst_k}, {"x", e.worst_x}, {"t", e.worst_t}};
      }
    }
    const double tol = s.tol.entropy_per_dx * dx;
    v.add("entropy",
          Json{{"min_residual", worst}, {"tests", tests}, {"skipped_rectangles", skipped}, {"worst", where}, {"tol", tol}},
          worst >= -tol && tests > 0);
  }
  if (s.wants("compatibility")) {
    double worst = 0.0;
    Json per = Json::array();
    for (const auto& a : msol.atoms) {
      double t_end = a.bracket.extinguished ? a.bracket.t_lo : a.bracket.horizon;
      CompatibilityReport c = compatibility_diagnostic(h, msol.density, a.x, a.c, state_grid(msol.density, 17),
                                                       (s.tol.compatibility_cells + 0.5) * dx, t_end,
                                                       s.tol.compatibility_skip * t_end);
      per.push_back({{"x", a.x},
                     {"max_violation", c.max_violation},
                     {"worst_k", c.worst_k},
                     {"side", c.worst_side},
                     {"worst_bump", {c.worst_t0, c.worst_t1}}});
      worst = std::max(worst, c.max_violation);
    }
    const double tol = s.tol.compatibility * (h.max_value() - h.min_value());
    v.add("compatibility", Json{{"max_violation", worst}, {"atoms", per}, {"tol", tol}}, worst <= tol);
  }
  if (s.wants("envelope")) {
    double worst = 0.0;
    for (std::size_t j = 0; j < msol.atoms.size(); ++j) {
      const auto& a = msol.atoms[j];
      double t_end = a.bracket.extinguished ? a.bracket.t_lo : a.bracket.horizon;
      for (int side : {-1, 1}) {
        EnvelopeReport e = trace_envelope(h, truncate(msol.trace(j, side), t_end), a.c, msol.refinement.surrogate_k,
                                          s.tol.envelope);
        worst = std::max(worst, e.worst_excess);
      }
    }
    v.add("envelope", Json{{"worst_excess", worst}, {"tol", s.tol.envelope}}, worst <= s.tol.envelope);
  }
  if (s.wants("decay")) {
    auto reps = jump_decay_check(hj, h, s.tol.decay_rate);
    Json per = Json::array();
    bool ok = true;
    for (const auto& r : reps) {
      per.push_back({{"x", r.x}, {"gap", r.gap}, {"min_slack", r.min_slack}, {"vacuous", r.vacuous}, {"ok", r.ok}});
      ok = ok && r.ok;
    }
    v.add("decay", Json{{"jumps", per}, {"rate_tol", s.tol.decay_rate}}, ok);
  }
  if (s.wants("supersolution")) {
    const double tol = s.tol.supersolution;
    auto reps = supersolution_check(hj, h, U0, default_k_grid(), tol);
    Json per = Json::array();
    bool ok = true;
    for (const auto& r : reps) {
      per.push_back({{"x", r.x},
                     {"applicable", r.applicable},
                     {"worst_excess", r.worst_excess},
                     {"best_horizon", r.applicable ? Json(r.best_horizon) : Json(nullptr)},
                     {"ok", r.ok}});
      ok = ok && r.ok;
    }
    v.add("supersolution", Json{{"jumps", per}, {"tol", tol}}, ok);
  }
  if (s.wants("growth")) {
    auto reps = one_sided_growth_check(hj, h, s.tol.growth);
    Json per = Json::array();
    bool ok = true;
    for (const auto& r : reps) {
      per.push_back({{"x", r.x}, {"applicable", r.applicable}, {"worst_excess", r.worst_excess}, {"ok", r.ok}});
      ok = ok && r.ok;
    }
    v.add("growth", Json{{"jumps", per}, {"tol", s.tol.growth}}, ok);
  }
  if (s.wants("time_lipschitz")) {
    // face fluxes carry the viscous term eps (u_{i+1} - u_i) / dx on top of H
    const GridField& d = msol.density;
    double jump = 0.0;
    for (Eigen::Index l = 0; l < d.levels(); ++l)
      for (Eigen::Index i = 0; i + 1 < d.points(); ++i) jump = std::max(jump, std::abs(d.values(l, i + 1) - d.values(l, i)));
    const double tol = msol.refinement.eps * jump / dx + s.tol.time_lipschitz;
    double ex = time_lipschitz_excess(hj, h);
    v.add("time_lipschitz", Json{{"excess", ex}, {"tol", tol}}, ex <= tol);
  }
  if (s.wants("finiteness")) {
    Json per = Json::array();
    bool ok = true;
    for (const auto& a : msol.atoms) {
      Regime reg = hyp.regime_for(a.c);
      Json item{{"x", a.x}, {"regime", to_string(reg)}, {"extinguished", a.bracket.extinguished}};
      bool item_ok = true;
      if (reg == Regime::H5) {
        auto fh = check_finiteness_h5(h, hyp, a.c, u0, default_k_grid());
        item["horizon"] = fh.horizon ? Json(*fh.horizon) : Json(nullptr);
        item["k"] = fh.k;
        item_ok = a.bracket.extinguished && (!fh.horizon || a.bracket.t_hi <= *fh.horizon);
      } else if (reg == Regime::H6) {
        item_ok = a.bracket.extinguished;
      }
      if (s.expect_extinction) item_ok = item_ok && a.bracket.extinguished == *s.expect_extinction;
      item["ok"] = item_ok;
      ok = ok && item_ok;
      per.push_back(item);
    }
    v.add("finiteness", Json{{"atoms", per}}, ok);
  }
  if (s.wants("weak")) {
    double w = weak_residual(h, msol, u0);
    v.add("weak", Json{{"residual", w}}, std::isfinite(w));
  }
  if (s.wants("transport")) {
    const double tf = msol.density.t(msol.density.levels() - 1);
    RadonMeasure1D exact = s.initial.discretize(u0.grid, true, true, s.transport_speed * tf);
    Eigen::ArrayXd last = msol.density.values.row(msol.density.levels() - 1).transpose();
    double err = (last - exact.density).abs().sum() * dx;
    double scale = dx + msol.refinement.eps;
    bool ok = s.transport_constant <= 0.0 || err <= s.transport_constant * scale;
    v.add("transport",
          Json{{"l1_error", err}, {"dx_plus_eps", scale}, {"ratio", err / scale}, {"constant", s.transport_constant}},
          ok);
  }

  if (write) {
    write_atoms_csv(dir / "atoms.csv", msol);
    write_traces_csv(dir / "traces.csv", msol);
    write_field_csv(dir / "density.csv", msol.density);
    write_field_csv(dir / "U.csv", hj.U);
    Json jumps = Json::array();
    for (const auto& j : hj.jumps) jumps.push_back(to_json(j));
    write_json(dir / "hj_report.json", Json{{"jumps", jumps}, {"residuals", to_json(check_correspondence(msol, hj))}});
  }
}

void run_comparison(const Scenario& s, const HamiltonianSpec& h, double T, Verdict& v) {
  RadonMeasure1D u0 = s.initial.discretize(s.grid, s.infinite_left, s.infinite_right);
  RadonMeasure1D v0 = s.compare_to.discretize(s.grid, s.infinite_left, s.infinite_right);
  ComparisonReport c = check_comparison(u0, v0, h, T, s.refine);
  v.add("comparison", to_json(c), c.ok);
}

void run_viscous_kind(const Scenario& s, const HamiltonianSpec& h, double T, Verdict& v, Json& summary,
                      const std::filesystem::path& dir, bool write) {
  RadonMeasure1D u0 = s.initial.discretize(s.grid, false, false);
  PiecewiseFunction U0 = primitive_function(u0, u0.grid.a);
  if (s.viscous_piece < 0 || static_cast<std::size_t>(s.viscous_piece) >= U0.pieces.size())
    throw Error(ErrorCode::ConfigError, "viscous.piece out of range");
  HamiltonianSpec he = mollify(h, s.viscous_eps);
  SmoothedData data = smooth_initial(U0, static_cast<std::size_t>(s.viscous_piece), s.viscous_m1, s.viscous_m2,
                                     s.viscous_eps, s.grid.cells);
  ViscousHJResult r = solve_viscous_hj(he, data, s.viscous_eps, T, s.grid.cells);
  const GridField& u = r.u;
  const double dx = u.x(1) - u.x(0);
  double fd = 0.0;
  for (Eigen::Index l = 0; l < u.levels(); ++l)
    for (Eigen::Index i = 1; i + 1 < u.points(); ++i)
      fd = std::max(fd, std::abs((r.U.values(l, i + 1) - r.U.values(l, i - 1)) / (2 * dx) - u.values(l, i)));
  double fd_tol = 5.0 * dx * r.bv.ux_sup;
  bool ok = fd <= fd_tol && r.Ut_sup <= r.hj_sup_bound + s.tol.viscous && r.bv.max_principle_ok;
  summary["bv"] = to_json(r.bv);
  v.add("viscous",
        Json{{"eps", s.viscous_eps},
             {"dx_U_minus_u", fd},
             {"dx_U_tol", fd_tol},
             {"Ut_sup", r.Ut_sup},
             {"Ut_bound", r.hj_sup_bound},
             {"tol", s.tol.viscous},
             {"max_principle_ok", r.bv.max_principle_ok}},
        ok);
  if (write) {
    write_field_csv(dir / "u_eps.csv", r.u);
    write_field_csv(dir / "U_eps.csv", r.U);
  }
}

void run_adversarial(const Scenario& s, const HamiltonianSpec& h, double T, Verdict& v, Json& summary) {
  if (s.initial.atoms.size() != 1) throw Error(ErrorCode::ConfigError, "adversarial field needs exactly one atom");
  const Atom a = s.initial.atoms.front();
  const int levels = std::max(2, s.refine.snapshots);
  GridField f;
  f.x = s.grid.centers();
  f.t = Eigen::ArrayXd::LinSpaced(levels, 0.0, T);
  f.values.resize(levels, f.x.size());
  f.meta.dx = s.grid.dx();
  f.meta.scheme_id = "synthetic/reversed-shock";
  for (int l = 0; l < levels; ++l)
    for (Eigen::Index i = 0; i < f.x.size(); ++i) {
      double d = f.x(i) - a.x;
      bool inside = a.mass > 0.0 ? (d > 0.0 && d < s.adversarial_speed * f.t(l))
                                 : (d < 0.0 && -d < s.adversarial_speed * f.t(l));
      f.values(l, i) = inside ? s.adversarial_state : s.initial.density_at(f.x(i));
    }
  summary["field"] = f.meta.scheme_id;
  const double dx = s.grid.dx();
  if (s.wants("compatibility")) {
    CompatibilityReport c = compatibility_diagnostic(h, f, a.x, a.mass, state_grid(f, 17),
                                                     (s.tol.compatibility_cells + 0.5) * dx, T,
                                                     s.tol.compatibility_skip * T);
    const double tol = s.tol.compatibility * (h.max_value() - h.min_value());
    v.add("compatibility",
          Json{{"max_violation", c.max_violation}, {"worst_k", c.worst_k}, {"side", c.worst_side}, {"tol", tol}},
          c.max_violation <= tol);
  }
  if (s.wants("entropy")) {
    double x0 = a.mass > 0.0 ? a.x : s.grid.a, x1 = a.mass > 0.0 ? s.grid.b : a.x;
    double rx = std::max(4 * dx, (x1 - x0) / 10.0);
    EntropyReport e = entropy_residual(h, f, state_grid(f, 9), x0, x1, 0.0, T, rx, T / 4.0);
    const double tol = s.tol.entropy_per_dx * dx;
    v.add("entropy",
          Json{{"min_residual", e.min_residual}, {"tests", e.tests}, {"worst_k", e.worst_k}, {"worst_x", e.worst_x},
               {"worst_t", e.worst_t}, {"tol", tol}},
          e.min_residual >= -tol);
  }
}

Json scenario_echo(const Scenario& s, double T, const std::string& T_source) {
  auto initial_json = [](const InitialData& d) {
    Json dens = Json::array();
    for (const auto& t : d.density)
      dens.push_back({{"type", t.type}, {"value", t.value}, {"from", t.from}, {"to", t.to}, {"center", t.center},
                      {"width", t.width}, {"slope", t.slope}});
    Json atoms = Json::array();
    for (const auto& a : d.atoms) atoms.push_back({{"x", a.x}, {"mass", a.mass}});
    return Json{{"density", dens}, {"atoms", atoms}};
  };
  const Tolerances& t = s.tol;
  return Json{{"name", s.name},
              {"kind", s.kind},
              {"flux", s.flux},
              {"domain", {{"a", s.grid.a}, {"b", s.grid.b}, {"cells", s.grid.cells}}},
              {"infinite", {{"left", s.infinite_left}, {"right", s.infinite_right}}},
              {"T_max", T},
              {"T_max_source", T_source},
              {"initial", initial_json(s.initial)},
              {"compare_to", initial_json(s.compare_to)},
              {"checks", s.checks},
              {"tolerances",
               {{"conservation", t.conservation},
                {"entropy_per_dx", t.entropy_per_dx},
                {"compatibility", t.compatibility},
                {"compatibility_cells", t.compatibility_cells},
                {"compatibility_skip", t.compatibility_skip},
                {"entropy_time_levels", t.entropy_time_levels},
                {"envelope", t.envelope},
                {"supersolution", t.supersolution},
                {"growth", t.growth},
                {"decay_rate", t.decay_rate},
                {"time_lipschitz", t.time_lipschitz},
                {"viscous", t.viscous}}},
              {"expect_extinction", s.expect_extinction ? Json(*s.expect_extinction) : Json(nullptr)},
              {"transport", {{"speed", s.transport_speed}, {"constant", s.transport_constant}}},
              {"viscous", {{"eps", s.viscous_eps}, {"m1", s.viscous_m1}, {"m2", s.viscous_m2}, {"piece", s.viscous_piece}}},
              {"adversarial", {{"state", s.adversarial_state}, {"speed", s.adversarial_speed}}}};
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::filesystem::path& source) {
  try {
    return parse_node(YAML::Load(yaml_text), source);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, std::string(e.what()));
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opt) {
  ScenarioResult res;
  res.name = s.name;
  const std::filesystem::path dir = s.output_dir.empty() ? opt.output_root / s.name : s.output_dir;
  Verdict v;
  Json summary = Json::object();
  Json manifest{{"version", version_string()}, {"seed", opt.seed != 0 ? opt.seed : s.seed}};
  double T = s.T_max.value_or(0.0);
  std::string T_source = s.T_max ? "config" : "";
  try {
    HamiltonianSpec h = make_hamiltonian(s.flux);
    manifest["flux"] = to_json(h);
    HypothesisReport hyp;
    try {
      hyp = classify_hypotheses(h, default_k_grid());
      manifest["hypotheses"] = to_json(hyp);
    } catch (const Error& e) {
      manifest["hypotheses"] = std::string(e.what());
    }
    manifest["refine"] = to_json(s.refine);
    if (s.kind == "cauchy") {
      RadonMeasure1D u0 = s.initial.discretize(s.grid, s.infinite_left, s.infinite_right);
      if (!s.T_max) {
        Horizon hz = automatic_horizon(h, hyp, u0);
        T = hz.T;
        T_source = hz.source;
      }
      manifest["scenario"] = scenario_echo(s, T, T_source);
      if (opt.write_artifacts) std::filesystem::create_directories(dir);
      run_cauchy(s, h, hyp, u0, T, v, summary, dir, opt.write_artifacts);
    } else {
      manifest["scenario"] = scenario_echo(s, T, T_source);
      if (opt.write_artifacts) std::filesystem::create_directories(dir);
      if (s.kind == "comparison")
        run_comparison(s, h, T, v);
      else if (s.kind == "viscous")
        run_viscous_kind(s, h, T, v, summary, dir, opt.write_artifacts);
      else
        run_adversarial(s, h, T, v, summary);
    }
  } catch (const Error& e) {
    res.error = e.what();
    if (e.code() == ErrorCode::ConfigError) {
      res.passed = false;
      res.verdict = Json{{"name", s.name}, {"passed", false}, {"error", res.error}};
      return res;  // no artifacts for malformed input
    }
  }
  res.failed_checks = v.failed;
  res.passed = res.error.empty() && v.failed.empty();
  res.verdict = Json{{"name", s.name},
                     {"kind", s.kind},
                     {"passed", res.passed},
                     {"error", res.error.empty() ? Json(nullptr) : Json(res.error)},
                     {"failed_checks", res.failed_checks},
                     {"summary", summary},
                     {"checks", v.checks}};
  if (opt.write_artifacts) {
    write_json(dir / "verdict.json", res.verdict);
    write_json(dir / "manifest.json", manifest);
  }
  return res;
}

int default_workers() {
  if (const char* env = std::getenv("HJM_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<ScenarioResult> run_pool(const std::vector<std::function<ScenarioResult()>>& jobs, int workers) {
  std::vector<ScenarioResult> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = jobs[i]();
  };
  const int n = std::max(1, std::min<int>(workers > 0 ? workers : default_workers(), static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::string summary_table(const std::vector<ScenarioResult>& rs) {
  std::ostringstream out;
  out << std::left << std::setw(32) << "scenario" << std::setw(8) << "result" << "details\n";
  for (const auto& r : rs) {
    out << std::setw(32) << r.name << std::setw(8) << (r.passed ? "PASS" : "FAIL");
    if (!r.error.empty()) out << r.error;
    for (std::size_t i = 0; i < r.failed_checks.size(); ++i) out << (i ? ", " : "failed: ") << r.failed_checks[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace

SuiteResult run_suite(const std::filesystem::path& dir, const RunOptions& opt, int workers) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::ConfigError, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  SuiteResult suite;
  suite.empty = files.empty();
  std::vector<std::function<ScenarioResult()>> jobs;
  for (const auto& f : files)
    jobs.push_back([f, &opt]() {
      try {
        return run_scenario(load_scenario(f), opt);
      } catch (const Error& e) {
        ScenarioResult r;
        r.name = f.stem().string();
        r.error = e.what();
        r.verdict = Json{{"name", r.name}, {"passed", false}, {"error", r.error}};
        return r;
      }
    });
  suite.results = run_pool(jobs, workers);
  std::sort(suite.results.begin(), suite.results.end(),
            [](const ScenarioResult& a, const ScenarioResult& b) { return a.name < b.name; });
  Json list = Json::array();
  for (const auto& r : suite.results) {
    suite.passed = suite.passed && r.passed;
    list.push_back({{"name", r.name},
                    {"passed", r.passed},
                    {"failed_checks", r.failed_checks},
                    {"error", r.error.empty() ? Json(nullptr) : Json(r.error)}});
  }
  suite.aggregate = Json{{"version", version_string()},
                         {"suite", dir.filename().string()},
                         {"passed", suite.passed},
                         {"warning", suite.empty ? Json("no scenarios found") : Json(nullptr)},
                         {"scenarios", list}};
  suite.summary = summary_table(suite.results);
  if (opt.write_artifacts) {
    write_json(opt.output_root / "suite_verdict.json", suite.aggregate);
    std::ofstream(opt.output_root / "summary.txt") << suite.summary;
  }
  return suite;
}

std::vector<ScenarioResult> run_sweep(const std::filesystem::path& templ, const std::string& param,
                                      const std::vector<std::string>& values, const RunOptions& opt, int workers) {
  YAML::Node base;
  try {
    base = YAML::LoadFile(templ.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  std::vector<std::string> path;
  std::stringstream ps(param);
  for (std::string part; std::getline(ps, part, '.');) path.push_back(part);
  if (path.empty()) throw Error(ErrorCode::ConfigError, "empty sweep parameter");
  std::vector<Scenario> variants;
  for (const auto& value : values) {
    YAML::Node node = YAML::Clone(base);
    std::vector<YAML::Node> chain{node};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      YAML::Node parent = chain.back();
      bool index = !path[i].empty() && std::all_of(path[i].begin(), path[i].end(), ::isdigit);
      YAML::Node child = index ? parent[std::stoi(path[i])] : parent[path[i]];
      if (!child) throw Error(ErrorCode::ConfigError, "sweep path '" + param + "' not in template");
      chain.push_back(child);
    }
    const std::string& leaf = path.back();
    bool index = std::all_of(leaf.begin(), leaf.end(), ::isdigit);
    if (index)
      chain.back()[std::stoi(leaf)] = YAML::Load(value);
    else
      chain.back()[leaf] = YAML::Load(value);
    node["name"] = node["name"].as<std::string>() + "__" + leaf + "_" + value;
    variants.push_back(parse_node(node, templ));
  }
  std::vector<std::function<ScenarioResult()>> jobs;
  for (const auto& s : variants) jobs.push_back([s, &opt]() { return run_scenario(s, opt); });
  auto results = run_pool(jobs, workers);
  if (opt.write_artifacts) {
    Json list = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i)
      list.push_back({{"value", values[i]}, {"name", results[i].name}, {"passed", results[i].passed},
                      {"summary", results[i].verdict.contains("summary") ? results[i].verdict["summary"] : Json(nullptr)}});
    write_json(opt.output_root / "sweep.json", Json{{"template", templ.filename().string()}, {"param", param}, {"runs", list}});
  }
  return results;
}

}  // namespace hjm
