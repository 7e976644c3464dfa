#include <algorithm>
#include <cmath>
#include <numbers>

#include "hjm/entropy_limit.hpp"

namespace hjm {

namespace {

// cos^2 bump on (-1,1) with unit integral, and its derivative
double cos_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c;
}

double cos_bump_d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return -0.5 * std::numbers::pi * std::sin(std::numbers::pi * s);
}

// trapezoid weights on the levels t(0..n-1)
Eigen::ArrayXd trapezoid_weights(const Eigen::ArrayXd& t) {
  Eigen::Index n = t.size();
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index l = 0; l + 1 < n; ++l) {
    double h = t(l + 1) - t(l);
    w(l) += 0.5 * h;
    w(l + 1) += 0.5 * h;
  }
  return w;
}

std::vector<Eigen::Index> strip(const GridField& f, double location, int side, double width) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < f.x.size(); ++i) {
    double d = side > 0 ? f.x(i) - location : location - f.x(i);
    if (d > 0.0 && d <= width) cols.push_back(i);
  }
  return cols;
}

}  // namespace

TraceSeries extract_trace(const HamiltonianSpec& h, const GridField& field, double location, int side,
                          const std::vector<double>& windows_in) {
  if (windows_in.empty()) throw Error(ErrorCode::ConfigError, "no extraction windows given");
  std::vector<double> windows = windows_in;
  std::sort(windows.begin(), windows.end());
  std::vector<std::vector<Eigen::Index>> cols;
  for (double w : windows) cols.push_back(strip(field, location, side, w));
  if (cols.front().size() < 4)
    throw Error(ErrorCode::WindowTooNarrow,
                "smallest window holds " + std::to_string(cols.front().size()) + " cells (need 4)");

  TraceSeries tr;
  tr.x = location;
  tr.side = side;
  tr.window_width = windows.front();
  tr.source = "window-average";
  const std::size_t m = windows.size();
  double wbar = 0.0;
  for (double w : windows) wbar += w / m;
  double sww = 0.0;
  for (double w : windows) sww += (w - wbar) * (w - wbar);
  for (Eigen::Index l = 0; l < field.t.size(); ++l) {
    std::vector<double> avg(m);
    for (std::size_t q = 0; q < m; ++q) {
      double s = 0.0;
      for (Eigen::Index i : cols[q]) s += h(field.values(l, i));
      avg[q] = s / static_cast<double>(cols[q].size());
    }
    double value = avg[0], err = 0.0;
    if (m >= 2 && sww > 0.0) {
      // least-squares line in the window width, read at width 0
      double abar = 0.0;
      for (double a : avg) abar += a / m;
      double slope = 0.0;
      for (std::size_t q = 0; q < m; ++q) slope += (windows[q] - wbar) * (avg[q] - abar);
      slope /= sww;
      value = abar - slope * wbar;
      err = std::abs(value - avg[0]);
    }
    value = std::clamp(value, h.min_value(), h.max_value());
    tr.t.push_back(field.t(l));
    tr.values.push_back(value);
    tr.error.push_back(err);
  }
  return tr;
}

CompatibilityReport compatibility_diagnostic(const HamiltonianSpec& h, const GridField& field, double location,
                                             double mass_sign, const std::vector<double>& k_grid, double window,
                                             double t_end, double t_begin) {
  CompatibilityReport rep;
  std::vector<Eigen::Index> levels;
  for (Eigen::Index l = 0; l < field.t.size(); ++l)
    if (field.t(l) <= t_end + 1e-12) levels.push_back(l);
  if (levels.size() < 2) return rep;
  Eigen::ArrayXd tl(static_cast<Eigen::Index>(levels.size()));
  for (std::size_t q = 0; q < levels.size(); ++q) tl(static_cast<Eigen::Index>(q)) = field.t(levels[q]);
  Eigen::ArrayXd wt = trapezoid_weights(tl);
  const double t_top = tl(tl.size() - 1);

  // time bumps on [t_begin, t_top]: whole interval, halves, quarters
  std::vector<std::pair<double, double>> bumps;
  const double span = t_top - t_begin;
  if (!(span > 0.0)) return rep;
  for (int parts : {1, 2, 4})
    for (int p = 0; p < parts; ++p) bumps.emplace_back(t_begin + span * p / parts, t_begin + span * (p + 1) / parts);

  for (int side : {-1, 1}) {
    auto cols = strip(field, location, side, window);
    if (cols.empty()) continue;
    for (double k : k_grid) {
      const double hk = h(k);
      // strip average of sgn_(+/-)(u - k)[H(u) - H(k)] per level
      Eigen::ArrayXd q(tl.size());
      for (Eigen::Index r = 0; r < tl.size(); ++r) {
        double s = 0.0;
        for (Eigen::Index i : cols) {
          double u = field.values(levels[static_cast<std::size_t>(r)], i);
          double sg = mass_sign > 0.0 ? (u < k ? -1.0 : 0.0) : (u > k ? 1.0 : 0.0);
          s += sg * (h(u) - hk);
        }
        q(r) = s / static_cast<double>(cols.size());
      }
      for (auto [t0, t1] : bumps) {
        double num = 0.0, den = 0.0;
        for (Eigen::Index r = 0; r < tl.size(); ++r) {
          double tt = tl(r);
          if (tt <= t0 || tt >= t1) continue;
          double b = std::sin(std::numbers::pi * (tt - t0) / (t1 - t0));
          b *= b;
          num += wt(r) * b * q(r);
          den += wt(r) * b;
        }
        if (den <= 0.0) continue;
        double val = num / den;
        // right side must be <= 0, left side >= 0
        double viol = side > 0 ? std::max(0.0, val) : std::max(0.0, -val);
        if (viol > rep.max_violation) {
          rep.max_violation = viol;
          rep.worst_k = k;
          rep.worst_side = side;
          rep.worst_t0 = t0;
          rep.worst_t1 = t1;
        }
      }
    }
  }
  return rep;
}

EntropyReport entropy_residual(const HamiltonianSpec& h, const GridField& field, const std::vector<double>& k_grid,
                               double x0, double x1, double t0, double t1, double rx, double rt) {
  EntropyReport rep;
  const Eigen::Index nx = field.x.size(), nt = field.t.size();
  if (nx < 2 || nt < 2) return rep;
  const double dx = field.x(1) - field.x(0);
  Eigen::ArrayXd wt = trapezoid_weights(field.t);
  Eigen::ArrayXXd Hu(nt, nx);
  for (Eigen::Index l = 0; l < nt; ++l)
    for (Eigen::Index i = 0; i < nx; ++i) Hu(l, i) = h(field.values(l, i));

  std::vector<double> xcs, tcs;
  for (double xc = x0 + rx; xc <= x1 - rx + 1e-12; xc += 0.5 * rx) xcs.push_back(xc);
  for (double tc = t0 + rt; tc <= t1 - rt + 1e-12; tc += 0.5 * rt) tcs.push_back(tc);
  for (double k : k_grid) {
    const double hk = h(k);
    for (double xc : xcs) {
      for (double tc : tcs) {
        double e = 0.0;
        for (Eigen::Index l = 0; l < nt; ++l) {
          double st = (field.t(l) - tc) / rt;
          if (std::abs(st) >= 1.0) continue;
          double bt = cos_bump(st), dbt = cos_bump_d(st) / rt;
          double row = 0.0;
          for (Eigen::Index i = 0; i < nx; ++i) {
            double sx = (field.x(i) - xc) / rx;
            if (std::abs(sx) >= 1.0) continue;
            double u = field.values(l, i);
            double sg = u > k ? 1.0 : (u < k ? -1.0 : 0.0);
            row += std::abs(u - k) * cos_bump(sx) * dbt + sg * (Hu(l, i) - hk) * cos_bump_d(sx) / rx * bt;
          }
          e += wt(l) * row * dx;
        }
        double normalized = e / rt;  // int int phi = rx rt; scaled by rx
        ++rep.tests;
        if (normalized < rep.min_residual) {
          rep.min_residual = normalized;
          rep.worst_k = k;
          rep.worst_x = xc;
          rep.worst_t = tc;
        }
      }
    }
  }
  return rep;
}

double weak_residual(const HamiltonianSpec& h, const MeasureSolution& sol, const RadonMeasure1D& u0) {
  (void)h;
  const GridField& d = sol.density;
  const double T = d.t(d.t.size() - 1);
  const double dx = sol.grid.dx();
  const double width = sol.grid.b - sol.grid.a;
  auto dtheta = [T](double t) { return -0.5 * std::numbers::pi / T * std::sin(std::numbers::pi * t / T); };
  Eigen::ArrayXd wt = trapezoid_weights(d.t);
  double worst = 0.0;
  for (double frac : {0.05, 0.15}) {
    double r = frac * width;
    for (double xc = sol.grid.a + r; xc <= sol.grid.b - r + 1e-12; xc += 0.5 * r) {
      auto rho = [&](double x) { return cos_bump((x - xc) / r); };
      auto drho = [&](double x) { return cos_bump_d((x - xc) / r) / r; };
      double res = 0.0;
      for (Eigen::Index l = 0; l < d.t.size(); ++l) {
        double a = 0.0, b = 0.0;
        for (Eigen::Index i = 0; i < d.x.size(); ++i) {
          double rv = rho(d.x(i));
          if (rv != 0.0) a += d.values(l, i) * rv;
        }
        for (Eigen::Index f = 0; f < sol.flux_integral.cols(); ++f) {
          double dr = drho(sol.grid.node(static_cast<int>(f)));
          if (dr != 0.0) b += sol.flux_integral(l, f) * dr;
        }
        // u theta' rho, and H theta rho' integrated by parts in t against int_0^t H
        res += wt(l) * dtheta(d.t(l)) * (a - b) * dx;
      }
      for (std::size_t j = 0; j < sol.atoms.size(); ++j) {
        const AtomTrajectory& at = sol.atoms[j];
        double rj = rho(at.x);
        if (rj == 0.0) continue;
        double s = 0.0;
        for (std::size_t q = 0; q + 1 < at.t.size(); ++q) {
          double ta = at.t[q], tb = at.t[q + 1];
          s += 0.5 * (tb - ta) * (at.C[q] * dtheta(ta) + at.C[q + 1] * dtheta(tb));
        }
        res += s * rj;
      }
      for (Eigen::Index i = 0; i < u0.density.size(); ++i) res += u0.density(i) * rho(u0.grid.center(i)) * u0.grid.dx();
      for (const Atom& a : u0.atoms) res += a.mass * rho(sol.grid.a + std::lround((a.x - sol.grid.a) / dx) * dx);
      worst = std::max(worst, std::abs(res) / r);
    }
  }
  return worst;
}

EnvelopeReport trace_envelope(const HamiltonianSpec& h, const TraceSeries& tr, double mass_sign, double k,
                              double tol) {
  const Asymptotics& as = h.asymptotics();
  auto range_ext = [&](double a, double b, bool want_max) {
    double best = want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
      double v = h(a + (b - a) * i / 2000.0);
      best = want_max ? std::max(best, v) : std::min(best, v);
    }
    return best;
  };
  double lo = h.min_value(), hi = h.max_value();
  if (mass_sign > 0.0 && tr.side > 0) {
    lo = as.hstar_plus - std::max(0.0, as.hstar_plus - range_ext(0.5 * k, k, true));
  } else if (mass_sign > 0.0 && tr.side < 0) {
    hi = as.hlow_plus + std::max(0.0, range_ext(0.5 * k, k, false) - as.hlow_plus);
  } else if (mass_sign < 0.0 && tr.side > 0) {
    hi = as.hlow_minus + std::max(0.0, range_ext(-k, -0.5 * k, false) - as.hlow_minus);
  } else {
    lo = as.hstar_minus - std::max(0.0, as.hstar_minus - range_ext(-k, -0.5 * k, true));
  }
  EnvelopeReport rep;
  for (std::size_t i = 0; i < tr.values.size(); ++i) {
    double v = tr.values[i];
    double ex = std::max(lo - v, v - hi) - tr.error[i];
    rep.worst_excess = std::max(rep.worst_excess, ex);
  }
  rep.ok = rep.worst_excess <= tol;
  return rep;
}

}  // namespace hjm
