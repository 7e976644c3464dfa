#pragma once

#include <Eigen/Dense>
#include <string>

#include "hjm/flux_table.hpp"
#include "hjm/hamiltonian.hpp"
#include "hjm/measure.hpp"

namespace hjm {

struct FieldMeta {
  double eps = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double dx = 0.0;
  double dt = 0.0;  // largest step taken
  std::string scheme_id;
};

// Space-time samples: values(level, point) at times t(level) and positions x(point).
struct GridField {
  Eigen::ArrayXd x;
  Eigen::ArrayXd t;
  Eigen::ArrayXXd values;
  FieldMeta meta;

  Eigen::Index levels() const { return t.size(); }
  Eigen::Index points() const { return x.size(); }
  // columns [first, last) over all levels
  GridField slice(Eigen::Index first, Eigen::Index last) const;
};

// Discrete counterparts of the a priori bounds of the viscous problem.
struct BvReport {
  double ux_l1_max = 0.0;   // max_t sum |u_{i+1} - u_i|
  double ut_l1_max = 0.0;   // max_n sum |u^{n+1} - u^n| dx / dt
  double ux_sup = 0.0;      // max |u_x|
  double eps_ux_sup = 0.0;  // eps max |u_x|
  double min_value = 0.0;
  double max_value = 0.0;
  double lower_bound = 0.0;  // min(inf u0, m1, m2)
  double upper_bound = 0.0;  // max(sup u0, m1, m2)
  bool max_principle_ok = true;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double boundary_inflow = 0.0;  // int_0^T [F(a) - F(b)] dt
  double mass_balance_error = 0.0;
  double l1_initial = 0.0;
  double l1_max_growth = 0.0;  // max_t (||u(t)||_1 - ||u0||_1 - 2||H|| t)
  long steps = 0;
};

struct ViscousOptions {
  double cfl = 0.4;
  int snapshots = 101;
  long max_steps = 20000000;
  int table_nodes = 0;  // 0: chosen from the state range
};

struct ViscousResult {
  GridField u;
  BvReport bv;
};

struct ViscousHJResult {
  GridField u;
  GridField U;
  BvReport bv;
  double Ut_sup = 0.0;       // max |U_t| over steps
  double hj_sup_bound = 0.0; // ||H_eps|| + eps ||u_x||
};

// Monotone step cap of the explicit scheme.
double stable_step(double dx, double lip, double eps, double cfl);

// Engquist-Osher plus central viscous fluxes at the n-1 faces between
// consecutive values of u: flux[i] sits between u[i] and u[i+1].
void interior_fluxes(const FluxTable& table, const double* u, int n, double eps_over_dx, double* flux);

// FluxTable over [lo, hi] padded by 2%, with node count from the range.
FluxTable make_flux_table(const ScalarMap& H, double lo, double hi, int nodes = 0);

ViscousResult solve_viscous_cl(const HamiltonianSpec& h_eps, const SmoothedData& data, double eps, double T, int N,
                               const ViscousOptions& opt = {});
ViscousHJResult solve_viscous_hj(const HamiltonianSpec& h_eps, const SmoothedData& data, double eps, double T,
                                 int N, const ViscousOptions& opt = {});

}  // namespace hjm
