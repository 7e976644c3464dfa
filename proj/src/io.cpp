#include "hjm/io.hpp"

#include <fstream>
#include <iomanip>

namespace hjm {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// JSON has no infinity; large bounds print as strings
Json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

}  // namespace

Json to_json(const HamiltonianSpec& h) {
  const Asymptotics& a = h.asymptotics();
  return Json{{"name", h.name()},
              {"sup_norm", h.sup_norm()},
              {"lip_norm", h.lip_norm()},
              {"inf", h.min_value()},
              {"sup", h.max_value()},
              {"limsup_plus", a.hstar_plus},
              {"liminf_plus", a.hlow_plus},
              {"limsup_minus", a.hstar_minus},
              {"liminf_minus", a.hlow_minus},
              {"limit_plus", optional_number(h.limits().hplus)},
              {"limit_minus", optional_number(h.limits().hminus)},
              {"probe_range", h.probe_range()}};
}

Json to_json(const TailReport& r) {
  return Json{{"h4", r.h4},
              {"eventually_constant", r.eventually_constant},
              {"h5", r.h5},
              {"c0", r.c0},
              {"h6", r.h6},
              {"h6_sign", r.h6_sign},
              {"k_threshold", r.k_threshold}};
}

Json to_json(const HypothesisReport& r) {
  return Json{{"plus", to_json(r.plus)},
              {"minus", to_json(r.minus)},
              {"regime_positive_atoms", to_string(r.regime_for(1.0))},
              {"regime_negative_atoms", to_string(r.regime_for(-1.0))}};
}

Json to_json(const Bracket& b) {
  return Json{{"extinguished", b.extinguished}, {"t_lo", b.t_lo}, {"t_hi", b.t_hi}, {"horizon", b.horizon},
              {"rate", b.rate}};
}

Json to_json(const RefineSchedule& s) {
  return Json{{"surrogate_factors", s.surrogate_factors},
              {"levels", s.levels},
              {"eps_factor", s.eps_factor},
              {"cfl", s.cfl},
              {"report_dt", s.report_dt},
              {"snapshots", s.snapshots},
              {"bracket_rel_tol", s.bracket_rel_tol},
              {"tol_conv", s.tol_conv},
              {"tol_mass_rel", s.tol_mass_rel},
              {"tol_mass_cells", s.tol_mass_cells},
              {"max_steps", s.max_steps}};
}

Json to_json(const RefinementInfo& r) {
  return Json{{"cells", r.cells},
              {"dx", r.dx},
              {"eps", r.eps},
              {"dt_max", r.dt_max},
              {"steps", r.steps},
              {"surrogate_k", r.surrogate_k},
              {"surrogates_tried", r.surrogates_tried},
              {"surrogate_residuals", r.surrogate_residuals},
              {"coarse_cells", r.coarse_cells},
              {"grid_residual", r.grid_residual},
              {"tol_conv", r.tol_conv},
              {"report_dt", r.report_dt},
              {"converged", r.converged}};
}

Json to_json(const AtomVerdict& v) {
  return Json{{"x", v.x},
              {"c", v.c},
              {"extinguished", v.extinguished},
              {"t_lo", v.t_lo},
              {"t_hi", v.t_hi},
              {"horizon", v.horizon},
              {"lower_bound", number(v.lower)},
              {"upper_bound", optional_number(v.upper)},
              {"regime", to_string(v.regime)},
              {"prediction", v.prediction},
              {"outcome", v.outcome},
              {"lower_ok", v.lower_ok},
              {"upper_ok", v.upper_ok},
              {"lower_slack", v.lower_slack},
              {"upper_slack", v.upper_slack},
              {"consistency_ok", v.consistency_ok}};
}

Json to_json(const WaitingTimeReport& r) {
  Json atoms = Json::array();
  for (const auto& a : r.atoms) atoms.push_back(to_json(a));
  return Json{{"dt", r.dt}, {"ok", r.ok()}, {"atoms", atoms}};
}

Json to_json(const ComparisonReport& r) {
  return Json{{"density_excess", r.density_excess},
              {"density_excess_l1", r.density_excess_l1},
              {"atom_excess", r.atom_excess},
              {"U_excess", r.U_excess},
              {"tol", r.tol},
              {"surrogate_k", r.surrogate_k},
              {"ok", r.ok}};
}

Json to_json(const CorrespondenceReport& r) {
  return Json{{"distributional", r.distributional},
              {"jump_mismatch", r.jump_mismatch},
              {"fd_max", r.fd_max},
              {"fd_mean", r.fd_mean}};
}

Json to_json(const JumpSeries& j) {
  return Json{{"x", j.x}, {"J0", j.J0}, {"t", j.t}, {"J_series", j.J}, {"tau_bracket", to_json(j.tau)}};
}

Json to_json(const BvReport& r) {
  return Json{{"ux_l1_max", r.ux_l1_max},
              {"ut_l1_max", r.ut_l1_max},
              {"ux_sup", r.ux_sup},
              {"eps_ux_sup", r.eps_ux_sup},
              {"min", r.min_value},
              {"max", r.max_value},
              {"lower_bound", r.lower_bound},
              {"upper_bound", r.upper_bound},
              {"max_principle_ok", r.max_principle_ok},
              {"mass_initial", r.mass_initial},
              {"mass_final", r.mass_final},
              {"boundary_inflow", r.boundary_inflow},
              {"mass_balance_error", r.mass_balance_error},
              {"l1_initial", r.l1_initial},
              {"l1_max_growth", r.l1_max_growth},
              {"steps", r.steps}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_field_csv(const std::filesystem::path& path, const GridField& f, int max_levels) {
  auto out = open_out(path);
  out << "t";
  for (Eigen::Index i = 0; i < f.x.size(); ++i) out << ",x=" << f.x(i);
  out << '\n';
  const Eigen::Index n = f.levels();
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n - 1) / std::max(1, max_levels - 1));
  for (Eigen::Index l = 0; l < n; l += stride) {
    out << f.t(l);
    for (Eigen::Index i = 0; i < f.x.size(); ++i) out << ',' << f.values(l, i);
    out << '\n';
    if (l + stride >= n && l != n - 1) l = n - 1 - stride;  // always include the last level
  }
}

void write_atoms_csv(const std::filesystem::path& path, const MeasureSolution& s) {
  auto out = open_out(path);
  out << "atom,x,t,C\n";
  for (std::size_t j = 0; j < s.atoms.size(); ++j)
    for (std::size_t i = 0; i < s.atoms[j].t.size(); ++i)
      out << j << ',' << s.atoms[j].x << ',' << s.atoms[j].t[i] << ',' << s.atoms[j].C[i] << '\n';
}

void write_traces_csv(const std::filesystem::path& path, const MeasureSolution& s) {
  auto out = open_out(path);
  out << "trace,x,side,t,value\n";
  for (std::size_t q = 0; q < s.traces.size(); ++q)
    for (std::size_t i = 0; i < s.traces[q].t.size(); ++i)
      out << q << ',' << s.traces[q].x << ',' << s.traces[q].side << ',' << s.traces[q].t[i] << ','
          << s.traces[q].values[i] << '\n';
}

}  // namespace hjm
