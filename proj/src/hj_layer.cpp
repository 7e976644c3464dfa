#include "hjm/hj_layer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hjm {

HJSolution reconstruct_hj(const MeasureSolution& msol, const PiecewiseFunction& U0) {
  U0.validate();
  const double dx = msol.grid.dx();
  if (U0.breakpoints.size() != msol.atoms.size()) {
    std::ostringstream msg;
    msg << U0.breakpoints.size() << " breakpoints against " << msol.atoms.size() << " atoms";
    throw Error(ErrorCode::BreakpointMismatch, msg.str());
  }
  for (std::size_t j = 0; j < msol.atoms.size(); ++j) {
    const AtomTrajectory& a = msol.atoms[j];
    double jump = U0.jump(j);
    if (std::abs(U0.breakpoints[j] - a.x) > 0.5 * dx + 1e-12 ||
        std::abs(jump - a.c) > 1e-9 * std::max(1.0, std::abs(a.c))) {
      std::ostringstream msg;
      msg << "breakpoint " << U0.breakpoints[j] << " (jump " << jump << ") does not match atom at " << a.x
          << " (mass " << a.c << ")";
      throw Error(ErrorCode::BreakpointMismatch, msg.str());
    }
  }

  HJSolution hj;
  const GridField& d = msol.density;
  hj.U.x = msol.grid.nodes();
  hj.U.t = d.t;
  hj.U.meta = d.meta;
  hj.U.meta.scheme_id = d.meta.scheme_id + "/hj-faces";
  // faces; at a breakpoint the right value, matching f^+ in the flux integral
  Eigen::ArrayXd base(hj.U.x.size());
  for (Eigen::Index f = 0; f < base.size(); ++f) {
    double x = hj.U.x(f);
    base(f) = U0(x);
    for (double bp : U0.breakpoints)
      if (std::abs(bp - x) <= 0.5 * dx) base(f) = U0.right_limit(bp);
  }
  hj.U.values = (-msol.flux_integral).rowwise() + base.transpose();

  for (std::size_t j = 0; j < msol.atoms.size(); ++j) {
    const AtomTrajectory& a = msol.atoms[j];
    JumpSeries js;
    js.x = a.x;
    js.tol_mass = a.tol_mass;
    const double um = U0.left_limit(U0.breakpoints[j]);
    const double up = U0.right_limit(U0.breakpoints[j]);
    js.J0 = up - um;
    for (std::size_t r = 0; r < msol.report_t.size(); ++r) {
      const Eigen::ArrayXd& ff = msol.face_flux_integral[r];
      double Um = um - ff(2 * static_cast<Eigen::Index>(j));
      double Up = up - ff(2 * static_cast<Eigen::Index>(j) + 1);
      js.t.push_back(msol.report_t[r]);
      js.U_minus.push_back(Um);
      js.U_plus.push_back(Up);
      js.J.push_back(Up - Um);
    }
    AtomTrajectory as_traj;
    as_traj.c = js.J0;
    as_traj.t = js.t;
    as_traj.C = js.J;
    js.tau = waiting_time(as_traj, a.tol_mass);
    hj.jumps.push_back(std::move(js));
  }
  return hj;
}

CorrespondenceReport check_correspondence(const MeasureSolution& msol, const HJSolution& hj) {
  CorrespondenceReport rep;
  const GridField& d = msol.density;
  const double dx = msol.grid.dx();
  const Eigen::Index nt = d.t.size(), nx = d.x.size();
  const double T = d.t(nt - 1);
  const double width = msol.grid.b - msol.grid.a;

  Eigen::ArrayXd wt = Eigen::ArrayXd::Zero(nt);
  for (Eigen::Index l = 0; l + 1 < nt; ++l) {
    double h = d.t(l + 1) - d.t(l);
    wt(l) += 0.5 * h;
    wt(l + 1) += 0.5 * h;
  }
  auto bump = [](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double c = std::cos(0.5 * std::numbers::pi * s);
    return c * c;
  };
  auto dbump = [](double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return -0.5 * std::numbers::pi * std::sin(std::numbers::pi * s);
  };
  auto htime = [T](double t) {
    double s = std::sin(std::numbers::pi * t / T);
    return s * s;
  };
  for (double frac : {0.05, 0.15}) {
    double r = frac * width;
    for (double xc = msol.grid.a + r; xc <= msol.grid.b - r + 1e-12; xc += 0.5 * r) {
      double res = 0.0;
      for (Eigen::Index l = 0; l < nt; ++l) {
        double ht = htime(d.t(l));
        if (ht == 0.0) continue;
        double s = 0.0;
        for (Eigen::Index i = 0; i < nx; ++i) {
          double sx = (d.x(i) - xc) / r;
          if (std::abs(sx) < 1.0) s += d.values(l, i) * bump(sx);
        }
        for (Eigen::Index f = 0; f < hj.U.x.size(); ++f) {
          double sx = (hj.U.x(f) - xc) / r;
          if (std::abs(sx) < 1.0) s += hj.U.values(l, f) * dbump(sx) / r;
        }
        s *= dx;
        for (std::size_t j = 0; j < msol.atoms.size(); ++j)
          s += msol.atom_mass(j, d.t(l)) * bump((msol.atoms[j].x - xc) / r);
        res += wt(l) * ht * s;
      }
      rep.distributional = std::max(rep.distributional, std::abs(res) / (r * T));
    }
  }

  for (std::size_t j = 0; j < hj.jumps.size(); ++j) {
    const JumpSeries& js = hj.jumps[j];
    const AtomTrajectory& a = msol.atoms[j];
    for (std::size_t r = 0; r < js.t.size(); ++r) {
      // the atom series carries extra extinction points; compare on report times
      double C = msol.atom_mass(j, js.t[r]);
      if (a.landing && js.t[r] >= *a.landing) C = 0.0;
      rep.jump_mismatch = std::max(rep.jump_mismatch, std::abs(js.J[r] - C));
    }
  }

  double sum = 0.0;
  long count = 0;
  for (Eigen::Index l = 0; l < nt; ++l) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      double right_face = hj.U.x(i + 1);
      bool at_atom = false;
      for (const auto& a : msol.atoms) at_atom = at_atom || std::abs(right_face - a.x) < 0.5 * dx;
      if (at_atom) continue;  // the stored face value there is U(x_j^+)
      double err = std::abs((hj.U.values(l, i + 1) - hj.U.values(l, i)) / dx - d.values(l, i));
      rep.fd_max = std::max(rep.fd_max, err);
      sum += err;
      ++count;
    }
  }
  rep.fd_mean = count ? sum / count : 0.0;
  return rep;
}

std::vector<JumpDecayReport> jump_decay_check(const HJSolution& hj, const HamiltonianSpec& h, double rate_tol) {
  std::vector<JumpDecayReport> out;
  const Asymptotics& as = h.asymptotics();
  for (const JumpSeries& js : hj.jumps) {
    JumpDecayReport r;
    r.x = js.x;
    r.gap = js.J0 > 0.0 ? as.hstar_plus - as.hlow_plus : as.hstar_minus - as.hlow_minus;
    r.vacuous = r.gap <= 0.0;
    const double tau = js.tau.extinguished ? js.tau.t_lo : js.t.back();
    r.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < js.t.size() && js.t[i + 1] <= tau; ++i) {
      double dt = js.t[i + 1] - js.t[i];
      double slack = std::abs(js.J[i]) - r.gap * dt - std::abs(js.J[i + 1]);
      r.min_slack = std::min(r.min_slack, slack + rate_tol * dt);
    }
    if (!std::isfinite(r.min_slack)) r.min_slack = 0.0;
    r.ok = r.min_slack >= -1e-12 * std::max(1.0, std::abs(js.J0));
    out.push_back(r);
  }
  return out;
}

std::vector<BarrierReport> supersolution_check(const HJSolution& hj, const HamiltonianSpec& h,
                                               const PiecewiseFunction& U0, const std::vector<double>& k_grid,
                                               double tol) {
  std::vector<BarrierReport> out;
  const auto& plus = h.limits().hplus;
  for (std::size_t j = 0; j < hj.jumps.size(); ++j) {
    const JumpSeries& js = hj.jumps[j];
    BarrierReport rep;
    rep.x = js.x;
    if (!(js.J0 > 0.0) || !plus) {
      out.push_back(rep);
      continue;
    }
    const double x_end = j + 1 < hj.jumps.size() ? hj.jumps[j + 1].x : U0.hi();
    // slope bound B of U_0 right of the jump
    const Piece& pc = U0.pieces[j + 1];
    double B = 0.0;
    for (Eigen::Index i = 1; i < pc.x.size(); ++i)
      B = std::max(B, std::abs(pc.values(i) - pc.values(i - 1)) / (pc.x(i) - pc.x(i - 1)));
    const double tau = js.tau.extinguished ? js.tau.t_lo : js.t.back();
    rep.best_horizon = std::numeric_limits<double>::infinity();
    for (double k : k_grid) {
      double hk = h(k);
      if (!(k > B) || !(hk > *plus)) continue;
      rep.applicable = true;
      double Ck = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < pc.x.size(); ++i) Ck = std::max(Ck, pc.values(i) - k * (pc.x(i) - js.x));
      rep.best_horizon = std::min(rep.best_horizon, (Ck - js.U_minus.front()) / (hk - *plus));
      for (Eigen::Index l = 0; l < hj.U.t.size(); ++l) {
        double t = hj.U.t(l);
        if (t > tau) break;
        for (Eigen::Index i = 0; i < hj.U.x.size(); ++i) {
          double x = hj.U.x(i);
          if (x < js.x - 1e-9 * (1.0 + std::abs(js.x)) || x >= x_end) continue;
          double v = Ck + k * (x - js.x) - hk * t;
          rep.worst_excess = std::max(rep.worst_excess, hj.U.values(l, i) - v);
        }
      }
    }
    rep.ok = rep.worst_excess <= tol;
    out.push_back(rep);
  }
  return out;
}

std::vector<GrowthReport> one_sided_growth_check(const HJSolution& hj, const HamiltonianSpec& h, double tol) {
  std::vector<GrowthReport> out;
  for (const JumpSeries& js : hj.jumps) {
    GrowthReport rep;
    rep.x = js.x;
    const auto& lim = js.J0 > 0.0 ? h.limits().hplus : h.limits().hminus;
    if (lim) {
      rep.applicable = true;
      const auto& side = js.J0 > 0.0 ? js.U_minus : js.U_plus;
      const double tau = js.tau.extinguished ? js.tau.t_lo : js.t.back();
      for (std::size_t r = 0; r < js.t.size() && js.t[r] <= tau; ++r) {
        double floor_value = side.front() - *lim * js.t[r];
        rep.worst_excess = std::max(rep.worst_excess, floor_value - side[r]);
      }
      rep.ok = rep.worst_excess <= tol;
    }
    out.push_back(rep);
  }
  return out;
}

double time_lipschitz_excess(const HJSolution& hj, const HamiltonianSpec& h) {
  double worst = 0.0;
  const GridField& U = hj.U;
  for (Eigen::Index l = 0; l + 1 < U.t.size(); ++l) {
    double dt = U.t(l + 1) - U.t(l);
    if (dt <= 0.0) continue;
    for (Eigen::Index i = 0; i < U.x.size(); ++i) {
      double q = (U.values(l + 1, i) - U.values(l, i)) / dt;
      worst = std::max({worst, q - (-h.min_value()), (-h.max_value()) - q});
    }
  }
  return worst;
}

}  // namespace hjm
