#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace hjm {

// Uniform grid of `cells` cells on [a, b].
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  int cells = 1;

  double dx() const { return (b - a) / cells; }
  double node(int i) const { return i == cells ? b : a + dx() * i; }
  double center(int i) const { return a + dx() * (i + 0.5); }
  Eigen::ArrayXd nodes() const;
  Eigen::ArrayXd centers() const;
  // index of the cell containing x (clamped)
  int cell_of(double x) const;
};

struct Atom {
  double x = 0.0;
  double mass = 0.0;
};

// Regular part as cell averages on `grid`, plus finitely many atoms.
// `infinite_left/right` mark windows standing in for an unbounded domain.
struct RadonMeasure1D {
  Grid1D grid;
  Eigen::ArrayXd density;
  std::vector<Atom> atoms;
  bool infinite_left = false;
  bool infinite_right = false;

  void validate() const;
  double regular_mass() const { return density.sum() * grid.dx(); }
  double singular_mass() const;
  double density_sup() const { return density.size() ? density.abs().maxCoeff() : 0.0; }
};

// One continuous piece, sampled at increasing abscissae that include both ends.
struct Piece {
  Eigen::ArrayXd x;
  Eigen::ArrayXd values;

  double lo() const { return x(0); }
  double hi() const { return x(x.size() - 1); }
  double operator()(double s) const;
};

struct PiecewiseFunction {
  std::vector<double> breakpoints;
  std::vector<Piece> pieces;  // pieces.size() == breakpoints.size() + 1

  void validate() const;
  double lo() const { return pieces.front().lo(); }
  double hi() const { return pieces.back().hi(); }
  // value from the piece containing x; at a breakpoint the right piece wins
  double operator()(double x) const;
  double left_limit(double x) const;
  double right_limit(double x) const;
  double jump(std::size_t j) const;
  std::size_t piece_of(double x) const;
};

// Piecewise function on `grid` from node samples, with jumps at `breakpoints`.
// `left`/`right` give the one-sided values at each breakpoint.
PiecewiseFunction piecewise_from_nodes(const Grid1D& grid, const std::function<double(double)>& f,
                                       const std::vector<double>& breakpoints,
                                       const std::vector<double>& left, const std::vector<double>& right);

RadonMeasure1D derivative_measure(const PiecewiseFunction& U0, const Grid1D& grid);
RadonMeasure1D derivative_measure(const PiecewiseFunction& U0, int cells);
PiecewiseFunction primitive_function(const RadonMeasure1D& u0, double anchor);

struct SmoothedData {
  double eps = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  Grid1D grid;
  Eigen::ArrayXd x;    // nodes
  Eigen::ArrayXd u0;   // u_{0,eps}
  Eigen::ArrayXd U0;   // U_{0,eps}
  double l1_du = 0.0;       // ||u_{0,eps}'||_1
  double l1_sqrt_eps_d2u = 0.0;  // sqrt(eps) ||u_{0,eps}''||_1
  double bound = 0.0;       // max{|m1|, |m2|, ||U_0'||_inf}
};

// Partition of unity on [a, b]: f1 + f2 + f3 = 1, f1 = 1 near a, f3 = 1 near b.
struct Partition {
  double f1, f2, f3;
};
Partition partition_of_unity(double a, double b, double eps, double x);

SmoothedData smooth_initial(const PiecewiseFunction& U0, std::size_t piece, double m1, double m2, double eps,
                            int cells);

}  // namespace hjm
