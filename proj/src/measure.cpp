#include "hjm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "hjm/error.hpp"
#include "hjm/hamiltonian.hpp"

namespace hjm {

Eigen::ArrayXd Grid1D::nodes() const {
  Eigen::ArrayXd x(cells + 1);
  for (int i = 0; i <= cells; ++i) x(i) = node(i);
  return x;
}

Eigen::ArrayXd Grid1D::centers() const {
  Eigen::ArrayXd x(cells);
  for (int i = 0; i < cells; ++i) x(i) = center(i);
  return x;
}

int Grid1D::cell_of(double x) const {
  int i = static_cast<int>(std::floor((x - a) / dx()));
  return std::clamp(i, 0, cells - 1);
}

void RadonMeasure1D::validate() const {
  if (!(grid.b > grid.a) || grid.cells < 1) throw Error(ErrorCode::ConfigError, "measure grid is empty");
  if (density.size() != grid.cells) throw Error(ErrorCode::ConfigError, "density size does not match grid");
  if (!density.allFinite()) throw Error(ErrorCode::ConfigError, "density has non-finite entries");
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const Atom& at = atoms[j];
    if (at.mass == 0.0 || !std::isfinite(at.mass)) throw Error(ErrorCode::ConfigError, "atom masses must be nonzero");
    if (!(at.x > grid.a && at.x < grid.b)) throw Error(ErrorCode::ConfigError, "atom outside the domain interior");
    if (j > 0 && !(at.x > atoms[j - 1].x)) throw Error(ErrorCode::ConfigError, "atom locations must increase");
  }
}

double RadonMeasure1D::singular_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms) s += a.mass;
  return s;
}

double Piece::operator()(double s) const {
  const Eigen::Index n = x.size();
  if (s <= x(0)) return values(0);
  if (s >= x(n - 1)) return values(n - 1);
  const double* begin = x.data();
  const double* it = std::upper_bound(begin, begin + n, s);
  Eigen::Index i = it - begin;
  double w = (s - x(i - 1)) / (x(i) - x(i - 1));
  return (1.0 - w) * values(i - 1) + w * values(i);
}

void PiecewiseFunction::validate() const {
  if (pieces.size() != breakpoints.size() + 1)
    throw Error(ErrorCode::BreakpointMismatch, "need one more piece than breakpoints");
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const Piece& pc = pieces[p];
    if (pc.x.size() < 2 || pc.x.size() != pc.values.size())
      throw Error(ErrorCode::ConfigError, "each piece needs at least two samples");
    for (Eigen::Index i = 1; i < pc.x.size(); ++i)
      if (!(pc.x(i) > pc.x(i - 1))) throw Error(ErrorCode::ConfigError, "piece abscissae must increase");
    if (p > 0 && std::abs(pc.lo() - breakpoints[p - 1]) > 1e-12 * (1.0 + std::abs(pc.lo())))
      throw Error(ErrorCode::BreakpointMismatch, "piece does not start at its breakpoint");
    if (p + 1 < pieces.size() && std::abs(pc.hi() - breakpoints[p]) > 1e-12 * (1.0 + std::abs(pc.hi())))
      throw Error(ErrorCode::BreakpointMismatch, "piece does not end at its breakpoint");
  }
  for (std::size_t j = 0; j < breakpoints.size(); ++j)
    if (jump(j) == 0.0) throw Error(ErrorCode::BreakpointMismatch, "zero jump at a breakpoint");
}

std::size_t PiecewiseFunction::piece_of(double x) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return static_cast<std::size_t>(it - breakpoints.begin());
}

double PiecewiseFunction::operator()(double x) const { return pieces[piece_of(x)](x); }

double PiecewiseFunction::left_limit(double x) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
  return pieces[static_cast<std::size_t>(it - breakpoints.begin())](x);
}

double PiecewiseFunction::right_limit(double x) const { return (*this)(x); }

double PiecewiseFunction::jump(std::size_t j) const {
  return pieces[j + 1].values(0) - pieces[j].values(pieces[j].values.size() - 1);
}

PiecewiseFunction piecewise_from_nodes(const Grid1D& grid, const std::function<double(double)>& f,
                                       const std::vector<double>& breakpoints, const std::vector<double>& left,
                                       const std::vector<double>& right) {
  PiecewiseFunction U;
  U.breakpoints = breakpoints;
  const double tiny = 1e-9 * grid.dx();
  for (std::size_t p = 0; p <= breakpoints.size(); ++p) {
    double lo = p == 0 ? grid.a : breakpoints[p - 1];
    double hi = p == breakpoints.size() ? grid.b : breakpoints[p];
    std::vector<double> xs{lo}, vs{p == 0 ? f(lo) : right[p - 1]};
    for (int i = 0; i <= grid.cells; ++i) {
      double xn = grid.node(i);
      if (xn > lo + tiny && xn < hi - tiny) {
        xs.push_back(xn);
        vs.push_back(f(xn));
      }
    }
    xs.push_back(hi);
    vs.push_back(p == breakpoints.size() ? f(hi) : left[p]);
    Piece pc;
    pc.x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    pc.values = Eigen::Map<Eigen::ArrayXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    U.pieces.push_back(std::move(pc));
  }
  return U;
}

RadonMeasure1D derivative_measure(const PiecewiseFunction& U0, const Grid1D& grid) {
  U0.validate();
  RadonMeasure1D m;
  m.grid = grid;
  m.density.resize(grid.cells);
  for (std::size_t j = 0; j < U0.breakpoints.size(); ++j) m.atoms.push_back({U0.breakpoints[j], U0.jump(j)});
  const double dx = grid.dx();
  for (int i = 0; i < grid.cells; ++i) {
    double xl = grid.node(i), xr = grid.node(i + 1);
    // increment over the cell minus the jumps it contains
    double inc = U0.left_limit(xr) - U0.right_limit(xl);
    for (std::size_t j = 0; j < U0.breakpoints.size(); ++j) {
      double bp = U0.breakpoints[j];
      if (bp > xl && bp < xr) inc -= U0.jump(j);
    }
    m.density(i) = inc / dx;
  }
  return m;
}

RadonMeasure1D derivative_measure(const PiecewiseFunction& U0, int cells) {
  return derivative_measure(U0, Grid1D{U0.lo(), U0.hi(), cells});
}

PiecewiseFunction primitive_function(const RadonMeasure1D& u0, double anchor) {
  u0.validate();
  const Grid1D& g = u0.grid;
  if (!(anchor >= g.a && anchor <= g.b)) throw Error(ErrorCode::ConfigError, "anchor outside the domain");
  for (const Atom& at : u0.atoms)
    if (std::abs(anchor - at.x) <= 1e-9 * (g.b - g.a)) throw Error(ErrorCode::AnchorOnAtom, "anchor sits on an atom");

  const double dx = g.dx();
  Eigen::ArrayXd cum(g.cells + 1);
  cum(0) = 0.0;
  for (int i = 0; i < g.cells; ++i) cum(i + 1) = cum(i) + u0.density(i) * dx;
  auto regular = [&](double x) {
    double pos = std::clamp((x - g.a) / dx, 0.0, static_cast<double>(g.cells));
    int i = std::min(g.cells - 1, static_cast<int>(pos));
    double w = pos - i;
    return cum(i) + w * (cum(i + 1) - cum(i));
  };
  // right-continuous primitive measured from a
  auto F = [&](double x) {
    double v = regular(x);
    for (const Atom& at : u0.atoms)
      if (at.x <= x) v += at.mass;
    return v;
  };
  double base = F(anchor);
  std::vector<double> bps, left, right;
  for (const Atom& at : u0.atoms) {
    bps.push_back(at.x);
    double r = F(at.x) - base;
    right.push_back(r);
    left.push_back(r - at.mass);
  }
  return piecewise_from_nodes(g, [&](double x) { return F(x) - base; }, bps, left, right);
}

Partition partition_of_unity(double a, double b, double eps, double x) {
  double s = std::sqrt(eps);
  Partition p;
  p.f1 = 1.0 - smooth_step((x - a - 2.0 * s) / s);
  p.f3 = smooth_step((x - (b - 3.0 * s)) / s);
  p.f2 = 1.0 - p.f1 - p.f3;
  return p;
}

SmoothedData smooth_initial(const PiecewiseFunction& U0, std::size_t piece, double m1, double m2, double eps,
                            int cells) {
  if (piece >= U0.pieces.size()) throw Error(ErrorCode::ConfigError, "piece index out of range");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::ConfigError, "eps must lie in (0,1)");
  const Piece& pc = U0.pieces[piece];
  const double a = pc.lo(), b = pc.hi();
  if (6.0 * std::sqrt(eps) >= b - a) {
    std::ostringstream msg;
    msg << "6 sqrt(eps) = " << 6.0 * std::sqrt(eps) << " does not fit in [" << a << ", " << b << "]";
    throw Error(ErrorCode::DomainTooNarrow, msg.str());
  }
  if (cells < 2) throw Error(ErrorCode::ConfigError, "need at least two cells");

  SmoothedData d;
  d.eps = eps;
  d.m1 = m1;
  d.m2 = m2;
  d.grid = Grid1D{a, b, cells};
  d.x = d.grid.nodes();
  const double dx = d.grid.dx();

  // derivative of the piece: slopes of its own samples, read at the nodes
  auto slope = [&](double x) {
    const Eigen::Index n = pc.x.size();
    const double* begin = pc.x.data();
    Eigen::Index i = std::upper_bound(begin, begin + n, x) - begin;
    i = std::clamp<Eigen::Index>(i, 1, n - 1);
    return (pc.values(i) - pc.values(i - 1)) / (pc.x(i) - pc.x(i - 1));
  };
  double du_sup = 0.0;
  for (Eigen::Index i = 1; i < pc.x.size(); ++i)
    du_sup = std::max(du_sup, std::abs((pc.values(i) - pc.values(i - 1)) / (pc.x(i) - pc.x(i - 1))));
  d.bound = std::max({std::abs(m1), std::abs(m2), du_sup});

  d.u0.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    Partition p = partition_of_unity(a, b, eps, d.x(i));
    double v = m1 * p.f1 + m2 * p.f3;
    if (p.f2 != 0.0) v += p.f2 * slope(d.x(i));
    d.u0(i) = v;
  }
  d.U0.resize(cells + 1);
  d.U0(0) = pc.values(0);
  for (int i = 0; i < cells; ++i) d.U0(i + 1) = d.U0(i) + 0.5 * dx * (d.u0(i) + d.u0(i + 1));

  double l1 = 0.0, l2 = 0.0;
  for (int i = 0; i < cells; ++i) l1 += std::abs(d.u0(i + 1) - d.u0(i));
  for (int i = 1; i < cells; ++i) l2 += std::abs(d.u0(i + 1) - 2.0 * d.u0(i) + d.u0(i - 1)) / dx;
  d.l1_du = l1;
  d.l1_sqrt_eps_d2u = std::sqrt(eps) * l2;
  return d;
}

}  // namespace hjm
