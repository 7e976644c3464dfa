#include "hjm/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjm {

bool WaitingTimeReport::ok() const {
  return std::all_of(atoms.begin(), atoms.end(),
                     [](const AtomVerdict& a) { return a.lower_ok && a.upper_ok && a.consistency_ok; });
}

WaitingTimeReport check_bounds(const MeasureSolution& msol, const HJSolution& hj, const HamiltonianSpec& h,
                               const HypothesisReport& hyp, double dt) {
  WaitingTimeReport rep;
  rep.dt = dt;
  const Asymptotics& as = h.asymptotics();
  for (std::size_t j = 0; j < msol.atoms.size(); ++j) {
    const AtomTrajectory& a = msol.atoms[j];
    const Bracket& b = a.bracket;
    AtomVerdict v;
    v.x = a.x;
    v.c = a.c;
    v.extinguished = b.extinguished;
    v.t_lo = b.t_lo;
    v.t_hi = b.t_hi;
    v.horizon = b.horizon;
    v.regime = hyp.regime_for(a.c);
    const double mag = std::abs(a.c);
    v.lower = h.sup_norm() > 0.0 ? mag / (2.0 * h.sup_norm()) : std::numeric_limits<double>::infinity();
    double gap = a.c > 0.0 ? as.hstar_plus - as.hlow_plus : as.hstar_minus - as.hlow_minus;
    if (gap > 0.0) v.upper = mag / gap;

    if (b.extinguished) {
      v.lower_slack = b.t_hi + dt - v.lower;
      v.lower_ok = v.lower_slack >= 0.0;
    }
    if (v.upper) {
      if (b.extinguished) {
        v.upper_slack = *v.upper - (b.t_lo - dt);
      } else {
        v.upper_slack = b.horizon - *v.upper;  // positive: the bound expired before T
        v.upper_slack = v.upper_slack > dt ? -v.upper_slack : 0.0;
      }
      v.upper_ok = v.upper_slack >= 0.0;
    }

    bool finite_regime = v.regime == Regime::H5 || v.regime == Regime::H6;
    if (v.upper || finite_regime)
      v.prediction = "finite";
    else if (h.max_value() - h.min_value() <= 0.0)
      v.prediction = "infinite";
    else
      v.prediction = "open";
    if (b.extinguished)
      v.outcome = "extinguished";
    else
      v.outcome = v.prediction == "finite" ? "inconclusive" : "not extinguished by T";

    if (j < hj.jumps.size()) {
      const JumpSeries& js = hj.jumps[j];
      const double tol = 1e-9 * std::max(1.0, mag);
      v.consistency_ok = std::abs(js.J0 - a.c) <= tol && js.tau.extinguished == b.extinguished &&
                         (!b.extinguished || (std::abs(js.tau.t_lo - b.t_lo) <= dt && std::abs(js.tau.t_hi - b.t_hi) <= dt));
    } else {
      v.consistency_ok = false;
    }
    rep.atoms.push_back(v);
  }
  return rep;
}

namespace {

void require_ordered(const RadonMeasure1D& u0, const RadonMeasure1D& v0) {
  if (u0.grid.cells != v0.grid.cells || u0.grid.a != v0.grid.a || u0.grid.b != v0.grid.b)
    throw Error(ErrorCode::ConfigError, "comparison needs both data on one grid");
  for (Eigen::Index i = 0; i < u0.density.size(); ++i)
    if (u0.density(i) > v0.density(i) + 1e-12) {
      std::ostringstream msg;
      msg << "u_0r > v_0r in cell " << i;
      throw Error(ErrorCode::HypothesisViolated, msg.str());
    }
  const double half = 0.5 * u0.grid.dx();
  auto mass_at = [half](const RadonMeasure1D& m, double x) {
    double s = 0.0;
    for (const Atom& a : m.atoms)
      if (std::abs(a.x - x) < half) s += a.mass;
    return s;
  };
  for (const RadonMeasure1D* m : {&u0, &v0})
    for (const Atom& a : m->atoms)
      if (mass_at(u0, a.x) > mass_at(v0, a.x) + 1e-12) {
        std::ostringstream msg;
        msg << "atom masses not ordered at x = " << a.x;
        throw Error(ErrorCode::HypothesisViolated, msg.str());
      }
}

double mass_near(const MeasureSolution& s, double x, double t, double half) {
  double m = 0.0;
  for (std::size_t j = 0; j < s.atoms.size(); ++j)
    if (std::abs(s.atoms[j].x - x) < half) m += s.atom_mass(j, t);
  return m;
}

}  // namespace

ComparisonReport check_comparison(const RadonMeasure1D& u0, const RadonMeasure1D& v0, const HamiltonianSpec& h,
                                  double T, const RefineSchedule& refine) {
  u0.validate();
  v0.validate();
  require_ordered(u0, v0);
  ComparisonReport rep;
  const double scale = std::max({1.0, u0.density_sup(), v0.density_sup()});
  rep.surrogate_k = refine.surrogate_factors.back() * scale;
  MeasureSolution su = solve_measure_fixed(h, u0, T, rep.surrogate_k, refine);
  MeasureSolution sv = solve_measure_fixed(h, v0, T, rep.surrogate_k, refine);

  const GridField& fu = su.density;
  const GridField& fv = sv.density;
  const Eigen::Index levels = std::min(fu.levels(), fv.levels());
  const double dx = u0.grid.dx();

  // tolerance 5 dx ||d_x H(u)|| with the derivative estimated from both fields
  double dH = 0.0;
  for (const GridField* f : {&fu, &fv})
    for (Eigen::Index l = 0; l < f->levels(); ++l)
      for (Eigen::Index i = 0; i + 1 < f->points(); ++i)
        dH = std::max(dH, std::abs(h(f->values(l, i + 1)) - h(f->values(l, i))) / dx);
  rep.tol = 5.0 * dx * dH;

  for (Eigen::Index l = 0; l < levels; ++l) {
    if (std::abs(fu.t(l) - fv.t(l)) > 1e-12) throw Error(ErrorCode::ConfigError, "snapshot times differ");
    Eigen::ArrayXd diff = (fu.values.row(l) - fv.values.row(l)).transpose();
    rep.density_excess = std::max(rep.density_excess, diff.maxCoeff());
    rep.density_excess_l1 = std::max(rep.density_excess_l1, diff.max(0.0).sum() * dx);
  }
  const double half = 0.5 * dx;
  for (const MeasureSolution* s : {&su, &sv})
    for (const AtomTrajectory& a : s->atoms)
      for (double t : su.report_t)
        rep.atom_excess = std::max(rep.atom_excess, mass_near(su, a.x, t, half) - mass_near(sv, a.x, t, half));

  PiecewiseFunction U0 = primitive_function(u0, u0.grid.a);
  PiecewiseFunction V0 = primitive_function(v0, v0.grid.a);
  HJSolution hu = reconstruct_hj(su, U0);
  HJSolution hv = reconstruct_hj(sv, V0);
  for (Eigen::Index l = 0; l < levels; ++l)
    rep.U_excess = std::max(rep.U_excess, (hu.U.values.row(l) - hv.U.values.row(l)).maxCoeff());

  const double atom_tol = 2.0 * std::max(1e-12, [&] {
    double t = 0.0;
    for (const MeasureSolution* s : {&su, &sv})
      for (const AtomTrajectory& a : s->atoms) t = std::max(t, a.tol_mass);
    return t;
  }());
  rep.ok = rep.density_excess <= rep.tol && rep.atom_excess <= atom_tol && rep.U_excess <= rep.tol;
  return rep;
}

FinitenessHorizon check_finiteness_h5(const HamiltonianSpec& h, const HypothesisReport& hyp, double c,
                                      const RadonMeasure1D& u0, const std::vector<double>& k_grid) {
  FinitenessHorizon out;
  out.regime = hyp.regime_for(c);
  if (out.regime != Regime::H5) {
    std::ostringstream msg;
    msg << "horizon needs regime H5, flux " << h.name() << " is in regime " << to_string(out.regime);
    throw Error(ErrorCode::RegimeMismatch, msg.str());
  }
  const double s = c > 0.0 ? 1.0 : -1.0;
  const auto& lim = c > 0.0 ? h.limits().hplus : h.limits().hminus;
  if (!lim) throw Error(ErrorCode::RegimeMismatch, "tail limit missing");
  const double dx = u0.grid.dx();
  for (double k : k_grid) {
    if (!(k > 0.0)) continue;
    double hk = h(s * k);
    if (!(hk > *lim)) continue;
    double excess = 0.0;
    for (Eigen::Index i = 0; i < u0.density.size(); ++i) excess += std::max(0.0, s * u0.density(i) - k) * dx;
    double T = (std::abs(c) + excess) / (hk - *lim);
    if (!out.horizon || T < *out.horizon) {
      out.horizon = T;
      out.k = k;
    }
  }
  return out;
}

}  // namespace hjm
