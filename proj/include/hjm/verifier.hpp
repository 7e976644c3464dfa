#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjm/entropy_limit.hpp"
#include "hjm/hamiltonian.hpp"
#include "hjm/hj_layer.hpp"

namespace hjm {

struct AtomVerdict {
  double x = 0.0;
  double c = 0.0;
  bool extinguished = false;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double horizon = 0.0;  // end of the computed trajectory
  double lower = 0.0;    // |c| / (2 ||H||)
  std::optional<double> upper;  // |c| / gap when the gap is positive
  Regime regime = Regime::NoLimit;
  std::string prediction;  // "finite", "infinite", "open"
  std::string outcome;     // "extinguished", "not extinguished by T", "inconclusive"
  bool lower_ok = true;
  bool upper_ok = true;
  double lower_slack = 0.0;
  double upper_slack = 0.0;
  bool consistency_ok = true;  // J_0 = c and the jump bracket equals the atom bracket
};

struct WaitingTimeReport {
  std::vector<AtomVerdict> atoms;
  double dt = 0.0;
  bool ok() const;
};

// dt: sampling step of the reported trajectories.
WaitingTimeReport check_bounds(const MeasureSolution& msol, const HJSolution& hj, const HamiltonianSpec& h,
                               const HypothesisReport& hyp, double dt);

struct ComparisonReport {
  double density_excess = 0.0;  // max (u_r - v_r) over common cells and levels
  double density_excess_l1 = 0.0;  // max over levels of int (u_r - v_r)_+
  double atom_excess = 0.0;     // max (C^u - C^v) at shared locations
  double U_excess = 0.0;        // max (U - V)
  double tol = 0.0;
  double surrogate_k = 0.0;
  bool ok = true;
};

// Both problems run on the same grid with one common surrogate.
ComparisonReport check_comparison(const RadonMeasure1D& u0, const RadonMeasure1D& v0, const HamiltonianSpec& h,
                                  double T, const RefineSchedule& refine);

struct FinitenessHorizon {
  std::optional<double> horizon;
  double k = 0.0;
  Regime regime = Regime::H5;
};

// min over k with H(k) > H^+ of (c + int [u_0r - k]_+) / (H(k) - H^+); mirrored for c < 0.
FinitenessHorizon check_finiteness_h5(const HamiltonianSpec& h, const HypothesisReport& hyp, double c,
                                      const RadonMeasure1D& u0, const std::vector<double>& k_grid);

}  // namespace hjm
