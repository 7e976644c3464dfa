#pragma once

#include <vector>

#include "hjm/entropy_limit.hpp"
#include "hjm/measure.hpp"

namespace hjm {

struct JumpSeries {
  double x = 0.0;
  double J0 = 0.0;
  double tol_mass = 0.0;
  std::vector<double> t;
  std::vector<double> J;
  std::vector<double> U_minus;  // U(x^-, t)
  std::vector<double> U_plus;   // U(x^+, t)
  Bracket tau;
};

struct HJSolution {
  GridField U;  // faces of the solver grid on the snapshot levels, right values at breakpoints
  std::vector<JumpSeries> jumps;
  double U0_minus_at(std::size_t j) const { return jumps[j].U_minus.front(); }
};

// U(x,t) = U_0(x) - int_0^t F ds at faces, one-sided values at breakpoints from the trace integrals.
// Between faces (U_{f+1} - U_f) / dx equals the cell value of u_r.
HJSolution reconstruct_hj(const MeasureSolution& msol, const PiecewiseFunction& U0);

struct CorrespondenceReport {
  double distributional = 0.0;  // max over rho x h of |int U rho' h + int h <u, rho>|, normalized
  double jump_mismatch = 0.0;   // max_t |J_t - C_j(t)|
  double fd_max = 0.0;          // max |(U_{f+1} - U_f)/dx - u_i| away from breakpoints
  double fd_mean = 0.0;         // mean of the same
};
CorrespondenceReport check_correspondence(const MeasureSolution& msol, const HJSolution& hj);

struct JumpDecayReport {
  double x = 0.0;
  double gap = 0.0;        // (H^*) - (H_*) on the relevant side
  double min_slack = 0.0;  // min over consecutive samples of |J_t0| - gap (t1 - t0) - |J_t1|
  bool vacuous = false;
  bool ok = true;
};
std::vector<JumpDecayReport> jump_decay_check(const HJSolution& hj, const HamiltonianSpec& h,
                                              double rate_tol = 1e-5);

struct BarrierReport {
  double x = 0.0;
  bool applicable = false;
  double worst_excess = 0.0;   // max of U - v over tested planes and points
  double best_horizon = 0.0;   // min_k (C_k - U_0(x^-)) / (H(k) - H^+)
  bool ok = true;
};
// Plane supersolutions v = C_k + k (x - x_j) - H(k) t on (x_j, next breakpoint) for positive jumps.
std::vector<BarrierReport> supersolution_check(const HJSolution& hj, const HamiltonianSpec& h,
                                               const PiecewiseFunction& U0, const std::vector<double>& k_grid,
                                               double tol);

struct GrowthReport {
  double x = 0.0;
  bool applicable = false;
  double worst_excess = 0.0;
  bool ok = true;
};
// U(x^-,t) >= U_0(x^-) - H^+ t (positive jumps), U(x^+,t) >= U_0(x^+) - H^- t (negative jumps).
std::vector<GrowthReport> one_sided_growth_check(const HJSolution& hj, const HamiltonianSpec& h, double tol);

// Largest violation of (U(t2)-U(t1))/(t2-t1) in [-sup H, -inf H] over consecutive levels.
double time_lipschitz_excess(const HJSolution& hj, const HamiltonianSpec& h);

}  // namespace hjm
