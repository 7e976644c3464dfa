#include "hjm/viscous.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjm/error.hpp"

namespace hjm {

GridField GridField::slice(Eigen::Index first, Eigen::Index last) const {
  GridField g;
  g.x = x.segment(first, last - first);
  g.t = t;
  g.values = values.middleCols(first, last - first);
  g.meta = meta;
  return g;
}

double stable_step(double dx, double lip, double eps, double cfl) {
  double cap = std::numeric_limits<double>::infinity();
  if (lip > 0.0) cap = std::min(cap, dx / lip);
  if (eps > 0.0) cap = std::min(cap, dx * dx / (2.0 * eps));
  if (!std::isfinite(cap)) cap = dx;
  return cfl * cap;
}

void interior_fluxes(const FluxTable& table, const double* u, int n, double eps_over_dx, double* flux) {
  if (n < 2) return;
  double p_prev = table.positive_part(u[0]);
  for (int i = 0; i + 1 < n; ++i) {
    double n_next = table.negative_part(u[i + 1]);
    flux[i] = p_prev + n_next - eps_over_dx * (u[i + 1] - u[i]);
    p_prev = table.positive_part(u[i + 1]);
  }
}

FluxTable make_flux_table(const ScalarMap& H, double lo, double hi, int nodes) {
  double span = hi - lo;
  double pad = std::max(0.02 * span, 1e-2 * std::max({1.0, std::abs(lo), std::abs(hi)}));
  lo -= pad;
  hi += pad;
  if (nodes <= 0) nodes = static_cast<int>(std::clamp((hi - lo) / 1e-3, 2049.0, 262145.0));
  return FluxTable(H, lo, hi, nodes);
}

namespace {

ViscousHJResult run_viscous(const HamiltonianSpec& h, const SmoothedData& data, double eps, double T, int N,
                            const ViscousOptions& opt, bool with_hj) {
  if (!(eps > 0.0)) throw Error(ErrorCode::ConfigError, "viscosity must be positive");
  if (N < 2) throw Error(ErrorCode::CFLViolation, "need at least two cells");
  if (!(T > 0.0)) throw Error(ErrorCode::ConfigError, "final time must be positive");
  if (opt.snapshots < 2) throw Error(ErrorCode::ConfigError, "need at least two snapshots");

  const Grid1D grid{data.grid.a, data.grid.b, N};
  const double dx = grid.dx();
  Eigen::ArrayXd x = grid.nodes();
  Eigen::ArrayXd u(N + 1);
  Piece src{data.x, data.u0};
  for (int i = 0; i <= N; ++i) u(i) = src(x(i));
  u(0) = data.m1;
  u(N) = data.m2;
  Eigen::ArrayXd U0(N + 1);
  U0(0) = data.U0(0);
  for (int i = 0; i < N; ++i) U0(i + 1) = U0(i) + 0.5 * dx * (u(i) + u(i + 1));

  const double lower = std::min({u.minCoeff(), data.m1, data.m2});
  const double upper = std::max({u.maxCoeff(), data.m1, data.m2});
  FluxTable table = make_flux_table(h.map(), lower, upper, opt.table_nodes);
  const double lip = std::max(table.lipschitz(), h.lip_norm());
  const double dt_cap = stable_step(dx, lip, eps, opt.cfl);
  if (T / dt_cap > static_cast<double>(opt.max_steps)) {
    std::ostringstream msg;
    msg << "N=" << N << ", eps=" << eps << ", T=" << T << " needs " << T / dt_cap << " steps (cap "
        << opt.max_steps << ")";
    throw Error(ErrorCode::CFLViolation, msg.str());
  }

  const int S = opt.snapshots;
  ViscousHJResult out;
  FieldMeta meta{eps, data.m1, data.m2, dx, 0.0, "eo-central-explicit"};
  out.u.x = x;
  out.u.t.resize(S);
  out.u.values.resize(S, N + 1);
  if (with_hj) {
    out.U.x = x;
    out.U.t.resize(S);
    out.U.values.resize(S, N + 1);
  }
  BvReport& bv = out.bv;
  bv.lower_bound = lower;
  bv.upper_bound = upper;
  bv.min_value = u.minCoeff();
  bv.max_value = u.maxCoeff();
  auto interior_mass = [&](const Eigen::ArrayXd& v) { return v.segment(1, N - 1).sum() * dx; };
  auto l1_norm = [&](const Eigen::ArrayXd& v) {
    return dx * (v.abs().sum() - 0.5 * (std::abs(v(0)) + std::abs(v(N))));
  };
  bv.mass_initial = interior_mass(u);
  bv.l1_initial = l1_norm(u);
  bv.l1_max_growth = -std::numeric_limits<double>::infinity();

  Eigen::ArrayXd F(N), unew(N + 1), cumI = Eigen::ArrayXd::Zero(N + 1);
  const double eod = eps / dx;
  double t = 0.0;
  int snap = 0;
  auto record = [&](double time) {
    if (!u.allFinite()) throw Error(ErrorCode::BlowUp, "non-finite state at t=" + std::to_string(time));
    out.u.t(snap) = time;
    out.u.values.row(snap) = u.transpose();
    if (with_hj) {
      out.U.t(snap) = time;
      out.U.values.row(snap) = (U0 - cumI).transpose();
    }
    double tv = (u.tail(N) - u.head(N)).abs().sum();
    bv.ux_l1_max = std::max(bv.ux_l1_max, tv);
    bv.ux_sup = std::max(bv.ux_sup, (u.tail(N) - u.head(N)).abs().maxCoeff() / dx);
    bv.min_value = std::min(bv.min_value, u.minCoeff());
    bv.max_value = std::max(bv.max_value, u.maxCoeff());
    bv.l1_max_growth = std::max(bv.l1_max_growth, l1_norm(u) - bv.l1_initial - 2.0 * h.sup_norm() * time);
    ++snap;
  };
  record(0.0);
  for (int k = 1; k < S; ++k) {
    const double t_target = T * k / (S - 1);
    while (t < t_target) {
      double dt = std::min(dt_cap, t_target - t);
      if (t_target - (t + dt) < 1e-12 * T) dt = t_target - t;
      interior_fluxes(table, u.data(), N + 1, eod, F.data());
      unew(0) = u(0);
      unew(N) = u(N);
      unew.segment(1, N - 1) = u.segment(1, N - 1) - (dt / dx) * (F.segment(1, N - 1) - F.segment(0, N - 1));
      bv.ut_l1_max = std::max(bv.ut_l1_max, (unew - u).abs().sum() * dx / dt);
      bv.boundary_inflow += (F(0) - F(N - 1)) * dt;
      if (with_hj) {
        cumI(0) += F(0) * dt;
        cumI(N) += F(N - 1) * dt;
        Eigen::ArrayXd I = 0.5 * (F.segment(0, N - 1) + F.segment(1, N - 1));
        cumI.segment(1, N - 1) += I * dt;
        double isup = std::max({I.abs().maxCoeff(), std::abs(F(0)), std::abs(F(N - 1))});
        out.Ut_sup = std::max(out.Ut_sup, isup);
      }
      u.swap(unew);
      t = (dt == t_target - t) ? t_target : t + dt;
      meta.dt = std::max(meta.dt, dt);
      ++bv.steps;
    }
    record(t_target);
  }
  bv.eps_ux_sup = eps * bv.ux_sup;
  bv.mass_final = interior_mass(u);
  bv.mass_balance_error = std::abs(bv.mass_final - bv.mass_initial - bv.boundary_inflow);
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lower), std::abs(upper)));
  bv.max_principle_ok = bv.min_value >= lower - slack && bv.max_value <= upper + slack;
  out.u.meta = meta;
  if (with_hj) {
    out.U.meta = meta;
    out.U.meta.scheme_id = "eo-central-explicit/hj-quadrature";
    out.hj_sup_bound = h.sup_norm() + eps * bv.ux_sup;
  }
  return out;
}

}  // namespace

ViscousResult solve_viscous_cl(const HamiltonianSpec& h_eps, const SmoothedData& data, double eps, double T, int N,
                               const ViscousOptions& opt) {
  ViscousHJResult r = run_viscous(h_eps, data, eps, T, N, opt, false);
  return {std::move(r.u), r.bv};
}

ViscousHJResult solve_viscous_hj(const HamiltonianSpec& h_eps, const SmoothedData& data, double eps, double T,
                                 int N, const ViscousOptions& opt) {
  return run_viscous(h_eps, data, eps, T, N, opt, true);
}

}  // namespace hjm
