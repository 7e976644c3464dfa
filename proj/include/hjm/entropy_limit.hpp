#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hjm/error.hpp"
#include "hjm/hamiltonian.hpp"
#include "hjm/measure.hpp"
#include "hjm/viscous.hpp"

namespace hjm {

struct SingularBC {
  enum class Value { PlusInfinity, MinusInfinity, None };
  int side = -1;  // -1 left, +1 right
  Value value = Value::None;
  std::vector<double> realized_sequence;  // surrogates actually run
};

struct RefineSchedule {
  std::vector<double> surrogate_factors{20.0, 40.0, 80.0, 160.0};
  int levels = 2;              // grid levels N / 2^(levels-1), ..., N
  double eps_factor = 2.0;     // eps = eps_factor * L_H * dx
  double cfl = 0.4;
  double report_dt = 1e-3;
  int snapshots = 201;
  double bracket_rel_tol = 0.01;
  double tol_conv = 0.05;      // relative L1 gap allowed between grid levels
  double tol_mass_rel = 1e-3;  // tol_mass = max(rel |c|, cells dx ||u_0r||)
  double tol_mass_cells = 10.0;
  long max_steps = 50000000;
};

struct TraceSeries {
  double x = 0.0;
  int side = 1;  // +1: x^+, -1: x^-
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> error;
  double window_width = 0.0;  // 0 for solver face fluxes
  std::string source;
};

struct Bracket {
  bool extinguished = false;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double horizon = 0.0;  // final time of the trajectory
  double rate = 0.0;     // |dC/dt| at the crossing
};

struct AtomTrajectory {
  double x = 0.0;            // location used by the solver
  double x_requested = 0.0;  // location in the data
  double c = 0.0;
  double tol_mass = 0.0;
  std::vector<double> t;
  std::vector<double> C;
  std::optional<double> landing;  // solver time at which C reached 0
  Bracket bracket;
};

struct SubRectangle {
  double x_lo = 0.0, x_hi = 0.0;
  double t_begin = 0.0, t_end = 0.0;
  int first_cell = 0, end_cell = 0;
  int bc_left = 0, bc_right = 0;  // +1: +inf, -1: -inf, 0: data
};

struct RefinementInfo {
  int cells = 0;
  double dx = 0.0;
  double eps = 0.0;
  double dt_max = 0.0;
  long steps = 0;
  double surrogate_k = 0.0;
  std::vector<double> surrogates_tried;
  std::vector<double> surrogate_residuals;  // bracket (or field) moves between consecutive k
  int coarse_cells = 0;
  double grid_residual = 0.0;
  double tol_conv = 0.0;
  double report_dt = 0.0;
  bool converged = true;
};

struct MeasureSolution {
  Grid1D grid;
  GridField density;          // u_r at cell centers on the snapshot levels
  // int_0^t F ds at the cells+1 faces on the snapshot levels; f^+ at atom faces
  Eigen::ArrayXXd flux_integral;
  std::vector<AtomTrajectory> atoms;
  std::vector<TraceSeries> traces;  // atom j: [2j] = x_j^-, [2j+1] = x_j^+; then window edges a^+, b^-
  std::vector<SubRectangle> subrectangles;
  std::vector<double> report_t;
  std::vector<double> total_mass;      // int u_r + sum C_j at report times
  std::vector<double> edge_inflow;     // int_0^t [F(a) - F(b)] at report times
  std::vector<Eigen::ArrayXd> face_flux_integral;  // per atom: {int f^-, int f^+} at report times
  double far_left = 0.0, far_right = 0.0;
  RefinementInfo refinement;

  const TraceSeries& trace(std::size_t atom, int side) const { return traces[2 * atom + (side > 0 ? 1 : 0)]; }
  GridField subrectangle_field(std::size_t i) const;
  // C_j at time t by linear interpolation of the reported series
  double atom_mass(std::size_t j, double t) const;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, std::shared_ptr<MeasureSolution> partial)
      : Error(ErrorCode::NotConverged, what), partial_(std::move(partial)) {}
  const std::shared_ptr<MeasureSolution>& partial() const { return partial_; }

 private:
  std::shared_ptr<MeasureSolution> partial_;
};

struct DirichletSolution {
  GridField field;
  Eigen::ArrayXXd flux_integral;
  TraceSeries left;
  TraceSeries right;
  SingularBC bc_left, bc_right;
  std::vector<double> residuals;
  double surrogate_k = 0.0;
};

double default_tol_mass(double c, double dx, double u0r_sup, const RefineSchedule& s);

DirichletSolution solve_singular_dirichlet(const HamiltonianSpec& h, const RadonMeasure1D& piece, SingularBC bc_left,
                                           SingularBC bc_right, double T, const RefineSchedule& refine);

MeasureSolution solve_measure_cauchy(const HamiltonianSpec& h, const RadonMeasure1D& u0, double T,
                                     const RefineSchedule& refine);

// Single run at a fixed surrogate k on the measure's own grid (no refinement loop).
MeasureSolution solve_measure_fixed(const HamiltonianSpec& h, const RadonMeasure1D& u0, double T, double k,
                                    const RefineSchedule& refine);

Bracket waiting_time(const AtomTrajectory& traj, double tol_mass);

TraceSeries extract_trace(const HamiltonianSpec& h, const GridField& field, double location, int side,
                          const std::vector<double>& windows);

struct CompatibilityReport {
  double max_violation = 0.0;  // normalized by int beta
  double worst_k = 0.0;
  int worst_side = 0;
  double worst_t0 = 0.0, worst_t1 = 0.0;
};

CompatibilityReport compatibility_diagnostic(const HamiltonianSpec& h, const GridField& field, double location,
                                             double mass_sign, const std::vector<double>& k_grid, double window,
                                             double t_end, double t_begin = 0.0);

struct EntropyReport {
  double min_residual = 0.0;  // most negative normalized Kruzhkov functional
  double worst_k = 0.0;
  double worst_x = 0.0, worst_t = 0.0;
  int tests = 0;
};

// Kruzhkov inequalities against tensor bumps supported in [x0,x1] x [t0,t1].
EntropyReport entropy_residual(const HamiltonianSpec& h, const GridField& field, const std::vector<double>& k_grid,
                               double x0, double x1, double t0, double t1, double rx, double rt);

// max over test functions rho(x) theta(t) of the weak-formulation defect, normalized by
// ||rho||_1 (u in the measure sense, theta(T) = 0)
double weak_residual(const HamiltonianSpec& h, const MeasureSolution& sol, const RadonMeasure1D& u0);

struct EnvelopeReport {
  double worst_excess = 0.0;
  bool ok = true;
};
// Envelope of the one-sided traces at an atom of sign `mass_sign`, with slack for the finite surrogate k.
EnvelopeReport trace_envelope(const HamiltonianSpec& h, const TraceSeries& tr, double mass_sign, double k,
                              double tol);

}  // namespace hjm
