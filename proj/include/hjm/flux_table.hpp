#pragma once

#include <vector>

#include "hjm/hamiltonian.hpp"

namespace hjm {

// Piecewise-linear interpolant of H on a uniform grid over [lo, hi], with the
// cumulative positive and negative variations that make up the
// Engquist-Osher splitting, and range extrema for the Godunov flux.
class FluxTable {
 public:
  FluxTable() = default;
  FluxTable(const ScalarMap& H, double lo, double hi, int nodes);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  double lipschitz() const { return lip_; }
  bool contains(double u) const { return u >= lo_ && u <= hi_; }

  double value(double u) const;
  // H(lo) + int_lo^u max(H',0)  and  int_lo^u min(H',0)
  double positive_part(double u) const;
  double negative_part(double u) const;
  // positive part, negative part and H at u with one lookup
  void parts(double u, double& pos, double& neg, double& val) const {
    Loc l = locate(u);
    pos = lerp(p_, l);
    neg = lerp(n_, l);
    val = lerp(h_, l);
  }
  double engquist_osher(double a, double b) const { return positive_part(a) + negative_part(b); }
  // min over [a,b] if a <= b, max over [b,a] otherwise
  double godunov(double a, double b) const;
  double range_min(double a, double b) const;
  double range_max(double a, double b) const;

 private:
  struct Loc {
    int i;
    double w;
  };
  Loc locate(double u) const;
  double lerp(const std::vector<double>& v, Loc l) const { return (1.0 - l.w) * v[l.i] + l.w * v[l.i + 1]; }
  template <class Cmp>
  double range_extreme(double a, double b, Cmp better) const;

  double lo_ = 0.0, hi_ = 0.0, step_ = 1.0, lip_ = 0.0;
  std::vector<double> h_, p_, n_;
  std::vector<double> block_min_, block_max_;
  static constexpr int block = 512;
};

}  // namespace hjm
