#include "hjm/entropy_limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjm {

namespace {

struct EdgeBC {
  int ghost = 0;       // +1 / -1 for a singular edge, 0 for far data
  double far = 0.0;    // data value outside when ghost == 0
};

struct EngineSetup {
  Grid1D grid;
  Eigen::ArrayXd u0;
  std::vector<Atom> atoms;
  EdgeBC left, right;
  double k = 0.0;
  double T = 0.0;
  RefineSchedule sched;
  double u0r_sup = 0.0;
};

struct ActiveAtom {
  int face;
  int sign;
  bool active;
};

MeasureSolution run_engine(const HamiltonianSpec& h, const EngineSetup& s) {
  const Grid1D& g = s.grid;
  const int N = g.cells;
  const double dx = g.dx();
  const RefineSchedule& sc = s.sched;
  if (!(s.T > 0.0)) throw Error(ErrorCode::ConfigError, "final time must be positive");
  if (!(sc.report_dt > 0.0)) throw Error(ErrorCode::ConfigError, "report_dt must be positive");

  MeasureSolution sol;
  sol.grid = g;
  sol.far_left = s.left.far;
  sol.far_right = s.right.far;

  // atoms snapped to faces
  std::vector<ActiveAtom> at;
  for (const Atom& a : s.atoms) {
    int f = static_cast<int>(std::lround((a.x - g.a) / dx));
    if (f < 1 || f > N - 1) throw Error(ErrorCode::ConfigError, "atom too close to the window edge");
    if (!at.empty() && f <= at.back().face) throw Error(ErrorCode::ConfigError, "atoms closer than one cell");
    at.push_back({f, a.mass > 0.0 ? 1 : -1, true});
    AtomTrajectory tr;
    tr.x = g.a + f * dx;
    tr.x_requested = a.x;
    tr.c = a.mass;
    tr.tol_mass = default_tol_mass(a.mass, dx, s.u0r_sup, sc);
    sol.atoms.push_back(tr);
  }
  const std::size_t J = at.size();
  std::vector<double> C(J);
  for (std::size_t j = 0; j < J; ++j) C[j] = s.atoms[j].mass;

  double K = std::max({s.k, s.u0r_sup, std::abs(s.left.far), std::abs(s.right.far), 1.0});
  FluxTable table = make_flux_table(h.map(), -K, K);
  const double lip = std::max(table.lipschitz(), 1e-300);
  const double eps = sc.eps_factor * lip * dx;
  const double dt_cap = stable_step(dx, lip, eps, sc.cfl);
  if (s.T / dt_cap > static_cast<double>(sc.max_steps)) {
    std::ostringstream msg;
    msg << N << " cells to T=" << s.T << " needs " << s.T / dt_cap << " steps (cap " << sc.max_steps << ")";
    throw Error(ErrorCode::CFLViolation, msg.str());
  }
  const double eod = eps / dx;

  // report and snapshot schedule
  const long n_reports = std::max<long>(1, std::lround(std::ceil(s.T / sc.report_dt - 1e-9)));
  auto report_time = [&](long r) { return r >= n_reports ? s.T : sc.report_dt * static_cast<double>(r); };
  const long stride = std::max<long>(1, (n_reports + sc.snapshots - 2) / std::max(1, sc.snapshots - 1));
  std::vector<long> snap_reports;
  for (long r = 0; r < n_reports; r += stride) snap_reports.push_back(r);
  snap_reports.push_back(n_reports);
  const Eigen::Index S = static_cast<Eigen::Index>(snap_reports.size());

  sol.density.x = g.centers();
  sol.density.t.resize(S);
  sol.density.values.resize(S, N);
  sol.flux_integral.resize(S, N + 1);

  Eigen::ArrayXd u = s.u0;
  Eigen::ArrayXd P(N), Nn(N), Hc(N), cumF = Eigen::ArrayXd::Zero(N + 1);
  Eigen::ArrayXd Fm(N + 1), Fp(N + 1);
  std::vector<double> int_fm(J, 0.0), int_fp(J, 0.0), last_fm(J, 0.0), last_fp(J, 0.0);
  double int_edge_l = 0.0, int_edge_r = 0.0, last_el = 0.0, last_er = 0.0;
  double inflow = 0.0;

  sol.traces.resize(2 * J + 2);
  for (std::size_t j = 0; j < J; ++j) {
    sol.traces[2 * j] = TraceSeries{sol.atoms[j].x, -1, {}, {}, {}, 0.0, "face-flux"};
    sol.traces[2 * j + 1] = TraceSeries{sol.atoms[j].x, +1, {}, {}, {}, 0.0, "face-flux"};
  }
  sol.traces[2 * J] = TraceSeries{g.a, +1, {}, {}, {}, 0.0, "face-flux"};
  sol.traces[2 * J + 1] = TraceSeries{g.b, -1, {}, {}, {}, 0.0, "face-flux"};

  auto open_epoch = [&](double t0) {
    int first = 0;
    int bl = s.left.ghost;
    for (std::size_t j = 0; j <= J; ++j) {
      if (j < J && !at[j].active) continue;
      int end = j < J ? at[j].face : N;
      int br = j < J ? at[j].sign : s.right.ghost;
      sol.subrectangles.push_back({g.a + first * dx, g.a + end * dx, t0, s.T, first, end, bl, br});
      first = end;
      bl = br;
    }
  };
  auto close_epoch = [&](double t1) {
    for (auto& r : sol.subrectangles)
      if (r.t_end == s.T) r.t_end = t1;
  };
  open_epoch(0.0);

  double t = 0.0;
  long next_report = 1;
  std::size_t next_snap = 0;
  double last_report_t = 0.0;
  auto record_report = [&](double time, bool snapshot) {
    sol.report_t.push_back(time);
    double total = u.sum() * dx;
    for (std::size_t j = 0; j < J; ++j) {
      total += C[j];
      sol.atoms[j].t.push_back(time);
      sol.atoms[j].C.push_back(C[j]);
    }
    sol.total_mass.push_back(total);
    sol.edge_inflow.push_back(inflow);
    Eigen::ArrayXd ff(2 * J);
    for (std::size_t j = 0; j < J; ++j) {
      ff(2 * j) = int_fm[j];
      ff(2 * j + 1) = int_fp[j];
    }
    sol.face_flux_integral.push_back(ff);
    if (time > last_report_t) {
      double span = time - last_report_t, mid = 0.5 * (time + last_report_t);
      for (std::size_t j = 0; j < J; ++j) {
        sol.traces[2 * j].t.push_back(mid);
        sol.traces[2 * j].values.push_back((int_fm[j] - last_fm[j]) / span);
        sol.traces[2 * j].error.push_back(0.0);
        sol.traces[2 * j + 1].t.push_back(mid);
        sol.traces[2 * j + 1].values.push_back((int_fp[j] - last_fp[j]) / span);
        sol.traces[2 * j + 1].error.push_back(0.0);
        last_fm[j] = int_fm[j];
        last_fp[j] = int_fp[j];
      }
      sol.traces[2 * J].t.push_back(mid);
      sol.traces[2 * J].values.push_back((int_edge_l - last_el) / span);
      sol.traces[2 * J].error.push_back(0.0);
      sol.traces[2 * J + 1].t.push_back(mid);
      sol.traces[2 * J + 1].values.push_back((int_edge_r - last_er) / span);
      sol.traces[2 * J + 1].error.push_back(0.0);
      last_el = int_edge_l;
      last_er = int_edge_r;
    }
    last_report_t = time;
    if (snapshot) {
      if (!u.allFinite()) throw Error(ErrorCode::BlowUp, "non-finite density at t=" + std::to_string(time));
      sol.density.t(next_snap) = time;
      sol.density.values.row(next_snap) = u.transpose();
      sol.flux_integral.row(next_snap) = cumF.transpose();
      ++next_snap;
    }
  };
  record_report(0.0, true);

  double dt_max = 0.0;
  long steps = 0;
  while (next_report <= n_reports) {
    const double t_event = report_time(next_report);
    while (t < t_event) {
      for (int i = 0; i < N; ++i) table.parts(u(i), P(i), Nn(i), Hc(i));
      for (int f = 1; f < N; ++f) Fm(f) = Fp(f) = P(f - 1) + Nn(f) - eod * (u(f) - u(f - 1));
      bool near_zero = false;
      for (std::size_t j = 0; j < J; ++j) {
        if (!at[j].active) continue;
        int f = at[j].face;
        double gh = at[j].sign * s.k;
        Fm(f) = table.godunov(u(f - 1), gh);
        Fp(f) = table.godunov(gh, u(f));
        if (std::abs(C[j]) < 5.0 * sol.atoms[j].tol_mass) near_zero = true;
      }
      Fp(0) = s.left.ghost != 0 ? table.godunov(s.left.ghost * s.k, u(0)) : table.godunov(s.left.far, u(0));
      Fm(N) = s.right.ghost != 0 ? table.godunov(u(N - 1), s.right.ghost * s.k) : table.godunov(u(N - 1), s.right.far);

      double dt = std::min(near_zero ? 0.5 * dt_cap : dt_cap, t_event - t);
      bool to_event = dt >= t_event - t - 1e-14 * s.T;
      int landing = -1;
      for (std::size_t j = 0; j < J; ++j) {
        if (!at[j].active) continue;
        double r = Fp(at[j].face) - Fm(at[j].face);
        if (r != 0.0 && C[j] * (C[j] - dt * r) <= 0.0) {
          double dt_land = C[j] / r;
          if (dt_land <= dt) {
            dt = dt_land;
            landing = static_cast<int>(j);
            to_event = dt >= t_event - t - 1e-14 * s.T;
          }
        }
      }

      u -= (dt / dx) * (Fm.tail(N) - Fp.head(N));
      cumF.segment(0, N) += dt * Fp.head(N);
      cumF(N) += dt * Fm(N);
      for (std::size_t j = 0; j < J; ++j) {
        int f = at[j].face;
        int_fm[j] += dt * Fm(f);
        int_fp[j] += dt * Fp(f);
        if (at[j].active) C[j] -= dt * (Fp(f) - Fm(f));
      }
      int_edge_l += dt * Fp(0);
      int_edge_r += dt * Fm(N);
      inflow += dt * (Fp(0) - Fm(N));
      t = to_event ? t_event : t + dt;
      dt_max = std::max(dt_max, dt);
      ++steps;

      bool epoch_change = false;
      for (std::size_t j = 0; j < J; ++j) {
        if (!at[j].active) continue;
        bool flipped = C[j] * at[j].sign <= 0.0;
        if (static_cast<int>(j) == landing || flipped) {
          if (static_cast<int>(j) != landing && std::abs(C[j]) > sol.atoms[j].tol_mass) {
            std::ostringstream msg;
            msg << "atom at " << sol.atoms[j].x << " crossed zero by " << std::abs(C[j]) << " at t=" << t;
            throw Error(ErrorCode::NegativeMassOvershoot, msg.str());
          }
          C[j] = 0.0;
          at[j].active = false;
          sol.atoms[j].landing = t;
          if (t < t_event) {
            sol.atoms[j].t.push_back(t);
            sol.atoms[j].C.push_back(0.0);
          }
          epoch_change = true;
        }
      }
      if (epoch_change) {
        close_epoch(t);
        open_epoch(t);
      }
    }
    bool snap = next_snap < snap_reports.size() && snap_reports[next_snap] == next_report;
    record_report(t, snap);
    ++next_report;
  }
  // remove degenerate rectangles from restarts at the same instant
  std::erase_if(sol.subrectangles, [](const SubRectangle& r) { return r.t_end <= r.t_begin; });

  RefinementInfo& info = sol.refinement;
  info.cells = N;
  info.dx = dx;
  info.eps = eps;
  info.dt_max = dt_max;
  info.steps = steps;
  info.surrogate_k = s.k;
  info.report_dt = sc.report_dt;
  sol.density.meta = FieldMeta{eps, 0.0, 0.0, dx, dt_max, "eo-viscous/bln-singular"};
  for (auto& tr : sol.atoms) tr.bracket = waiting_time(tr, tr.tol_mass);
  return sol;
}

Eigen::ArrayXd coarsen(const Eigen::ArrayXd& v) {
  Eigen::ArrayXd c(v.size() / 2);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = 0.5 * (v(2 * i) + v(2 * i + 1));
  return c;
}

EngineSetup cauchy_setup(const RadonMeasure1D& u0, double T, double k, const RefineSchedule& refine) {
  EngineSetup s;
  s.grid = u0.grid;
  s.u0 = u0.density;
  s.atoms = u0.atoms;
  s.left = {0, u0.density(0)};
  s.right = {0, u0.density(u0.density.size() - 1)};
  s.k = k;
  s.T = T;
  s.sched = refine;
  s.u0r_sup = u0.density_sup();
  return s;
}

double bracket_move(const MeasureSolution& a, const MeasureSolution& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.atoms.size(); ++j) {
    const Bracket& x = a.atoms[j].bracket;
    const Bracket& y = b.atoms[j].bracket;
    if (x.extinguished != y.extinguished) return std::numeric_limits<double>::infinity();
    if (x.extinguished) worst = std::max(worst, std::abs(x.t_lo - y.t_lo) / std::max(y.t_lo, 1e-12));
  }
  return worst;
}

double field_gap(const Eigen::ArrayXd& fine, const Eigen::ArrayXd& coarse, double dx_coarse) {
  Eigen::ArrayXd f = coarsen(fine);
  return (f - coarse).abs().sum() * dx_coarse;
}

}  // namespace

double default_tol_mass(double c, double dx, double u0r_sup, const RefineSchedule& s) {
  return std::max(s.tol_mass_rel * std::abs(c), s.tol_mass_cells * dx * u0r_sup);
}

GridField MeasureSolution::subrectangle_field(std::size_t i) const {
  const SubRectangle& r = subrectangles.at(i);
  GridField f = density.slice(r.first_cell, r.end_cell);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index l = 0; l < density.t.size(); ++l)
    if (density.t(l) >= r.t_begin - 1e-12 && density.t(l) <= r.t_end + 1e-12) rows.push_back(l);
  GridField out;
  out.x = f.x;
  out.meta = f.meta;
  out.t.resize(static_cast<Eigen::Index>(rows.size()));
  out.values.resize(static_cast<Eigen::Index>(rows.size()), f.x.size());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    out.t(static_cast<Eigen::Index>(q)) = f.t(rows[q]);
    out.values.row(static_cast<Eigen::Index>(q)) = f.values.row(rows[q]);
  }
  return out;
}

double MeasureSolution::atom_mass(std::size_t j, double t) const {
  const AtomTrajectory& a = atoms.at(j);
  if (t <= a.t.front()) return a.C.front();
  if (t >= a.t.back()) return a.C.back();
  auto it = std::upper_bound(a.t.begin(), a.t.end(), t);
  std::size_t i = static_cast<std::size_t>(it - a.t.begin());
  double w = (t - a.t[i - 1]) / (a.t[i] - a.t[i - 1]);
  return (1.0 - w) * a.C[i - 1] + w * a.C[i];
}

MeasureSolution solve_measure_fixed(const HamiltonianSpec& h, const RadonMeasure1D& u0, double T, double k,
                                    const RefineSchedule& refine) {
  u0.validate();
  return run_engine(h, cauchy_setup(u0, T, k, refine));
}

MeasureSolution solve_measure_cauchy(const HamiltonianSpec& h, const RadonMeasure1D& u0, double T,
                                     const RefineSchedule& refine) {
  u0.validate();
  if (refine.surrogate_factors.empty()) throw Error(ErrorCode::ConfigError, "empty surrogate schedule");
  const double scale = std::max(1.0, u0.density_sup());
  std::vector<double> tried, residuals;
  std::optional<MeasureSolution> prev;
  std::optional<MeasureSolution> accepted;
  for (double factor : refine.surrogate_factors) {
    double k = factor * scale;
    MeasureSolution cur = run_engine(h, cauchy_setup(u0, T, k, refine));
    tried.push_back(k);
    if (u0.atoms.empty()) {
      accepted = std::move(cur);
      break;
    }
    if (prev) {
      double move = bracket_move(cur, *prev);
      residuals.push_back(move);
      if (move < refine.bracket_rel_tol) {
        accepted = std::move(cur);
        break;
      }
    }
    prev = std::move(cur);
  }
  auto finish_info = [&](MeasureSolution& s) {
    s.refinement.surrogates_tried = tried;
    s.refinement.surrogate_residuals = residuals;
    s.refinement.tol_conv = refine.tol_conv;
  };
  if (!accepted) {
    finish_info(*prev);
    prev->refinement.converged = false;
    std::ostringstream msg;
    msg << "surrogate schedule exhausted; bracket moves:";
    for (double r : residuals) msg << ' ' << r;
    throw NotConvergedError(msg.str(), std::make_shared<MeasureSolution>(std::move(*prev)));
  }
  MeasureSolution& sol = *accepted;
  finish_info(sol);

  if (refine.levels >= 2 && u0.grid.cells % 2 == 0) {
    RadonMeasure1D coarse = u0;
    coarse.grid.cells = u0.grid.cells / 2;
    coarse.density = coarsen(u0.density);
    RefineSchedule cs = refine;
    MeasureSolution cw = run_engine(h, cauchy_setup(coarse, T, sol.refinement.surrogate_k, cs));
    const Eigen::Index last = sol.density.values.rows() - 1;
    Eigen::ArrayXd fine_final = sol.density.values.row(last).transpose();
    Eigen::ArrayXd coarse_final = cw.density.values.row(cw.density.values.rows() - 1).transpose();
    double gap = field_gap(fine_final, coarse_final, coarse.grid.dx());
    double scale_l1 = fine_final.abs().sum() * u0.grid.dx();
    for (const Atom& a : u0.atoms) scale_l1 += std::abs(a.mass);
    double rel = gap / std::max(scale_l1, 1e-12);
    double bmove = bracket_move(sol, cw);
    sol.refinement.coarse_cells = coarse.grid.cells;
    sol.refinement.grid_residual = std::max(rel, bmove);
    if (!(sol.refinement.grid_residual <= refine.tol_conv)) {
      sol.refinement.converged = false;
      std::ostringstream msg;
      msg << "grid levels " << coarse.grid.cells << " and " << u0.grid.cells << " differ by " << rel
          << " (relative L1) and " << bmove << " (bracket), tolerance " << refine.tol_conv;
      throw NotConvergedError(msg.str(), std::make_shared<MeasureSolution>(std::move(sol)));
    }
  }
  return std::move(sol);
}

DirichletSolution solve_singular_dirichlet(const HamiltonianSpec& h, const RadonMeasure1D& piece, SingularBC bc_left,
                                           SingularBC bc_right, double T, const RefineSchedule& refine) {
  piece.validate();
  if (!piece.atoms.empty()) throw Error(ErrorCode::ConfigError, "a Dirichlet piece carries no atoms");
  if (refine.surrogate_factors.empty()) throw Error(ErrorCode::ConfigError, "empty surrogate schedule");
  auto ghost_of = [](const SingularBC& b) {
    return b.value == SingularBC::Value::PlusInfinity ? 1 : (b.value == SingularBC::Value::MinusInfinity ? -1 : 0);
  };
  const double scale = std::max(1.0, piece.density_sup());
  const int N = piece.grid.cells;
  const int layer = std::max(1, N / 20);
  auto interior = [&](const MeasureSolution& s) {
    Eigen::ArrayXd v = s.density.values.row(s.density.values.rows() - 1).transpose();
    int lo = ghost_of(bc_left) != 0 ? layer : 0;
    int hi = ghost_of(bc_right) != 0 ? N - layer : N;
    return Eigen::ArrayXd(v.segment(lo, hi - lo));
  };
  DirichletSolution out;
  std::optional<MeasureSolution> prev;
  bool done = false;
  for (double factor : refine.surrogate_factors) {
    EngineSetup s;
    s.grid = piece.grid;
    s.u0 = piece.density;
    s.left = {ghost_of(bc_left), piece.density(0)};
    s.right = {ghost_of(bc_right), piece.density(N - 1)};
    s.k = factor * scale;
    s.T = T;
    s.sched = refine;
    s.u0r_sup = piece.density_sup();
    MeasureSolution cur = run_engine(h, s);
    bc_left.realized_sequence.push_back(s.k);
    bc_right.realized_sequence.push_back(s.k);
    if (ghost_of(bc_left) == 0 && ghost_of(bc_right) == 0) {
      prev = std::move(cur);
      done = true;
      break;
    }
    if (prev) {
      Eigen::ArrayXd a = interior(cur), b = interior(*prev);
      double gap = (a - b).abs().sum() * piece.grid.dx();
      double ref = std::max(1.0, a.abs().sum() * piece.grid.dx());
      out.residuals.push_back(gap / ref);
      if (gap / ref < refine.tol_conv) {
        prev = std::move(cur);
        done = true;
        break;
      }
    }
    prev = std::move(cur);
  }
  MeasureSolution& sol = *prev;
  out.field = sol.density;
  out.flux_integral = sol.flux_integral;
  out.left = sol.traces[0];
  out.right = sol.traces[1];
  out.bc_left = bc_left;
  out.bc_right = bc_right;
  out.surrogate_k = sol.refinement.surrogate_k;
  if (!done) {
    std::ostringstream msg;
    msg << "surrogate schedule exhausted; interior L1 moves:";
    for (double r : out.residuals) msg << ' ' << r;
    throw NotConvergedError(msg.str(), std::make_shared<MeasureSolution>(std::move(sol)));
  }
  return out;
}

Bracket waiting_time(const AtomTrajectory& traj, double tol_mass) {
  const auto& t = traj.t;
  const auto& C = traj.C;
  if (t.empty() || t.size() != C.size()) throw Error(ErrorCode::ConfigError, "empty atom trajectory");
  const double sign = traj.c > 0.0 ? 1.0 : -1.0;
  const double slack = 1e-12 * std::abs(traj.c);
  for (std::size_t i = 1; i < C.size(); ++i) {
    if (std::abs(C[i]) > std::abs(C[i - 1]) + slack) {
      std::ostringstream msg;
      msg << "|C| grows from " << std::abs(C[i - 1]) << " to " << std::abs(C[i]) << " at t=" << t[i];
      throw Error(ErrorCode::MonotonicityViolation, msg.str());
    }
    if (sign * C[i] < -slack) throw Error(ErrorCode::MonotonicityViolation, "atom mass changed sign");
  }
  Bracket b;
  b.horizon = t.back();
  for (std::size_t i = 0; i < C.size(); ++i) {
    if (std::abs(C[i]) > tol_mass) continue;
    b.extinguished = true;
    if (i == 0) {
      b.t_lo = b.t_hi = t[0];
      return b;
    }
    double c0 = std::abs(C[i - 1]), c1 = std::abs(C[i]);
    double w = (c0 - tol_mass) / (c0 - c1);
    b.t_lo = t[i - 1] + w * (t[i] - t[i - 1]);
    b.rate = (c0 - c1) / (t[i] - t[i - 1]);
    b.t_hi = b.t_lo + 2.0 * tol_mass / b.rate;
    return b;
  }
  b.t_lo = b.t_hi = t.back();
  return b;
}

}  // namespace hjm
