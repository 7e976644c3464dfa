#include <gtest/gtest.h>

#include <cmath>

#include "hjm/error.hpp"
#include "hjm/viscous.hpp"

using namespace hjm;

namespace {

SmoothedData bump_data(double eps, double m1, double m2, int cells) {
  Grid1D g{-2.0, 2.0, cells};
  PiecewiseFunction U = piecewise_from_nodes(
      g, [](double x) { return std::abs(x) < 1 ? 0.5 * (x + std::sin(M_PI * x) / M_PI) + 0.5 : (x > 0 ? 1.0 : 0.0); },
      {}, {}, {});
  return smooth_initial(U, 0, m1, m2, eps, cells);
}

}  // namespace

TEST(Viscous, StableStepShrinksWithViscosity) {
  EXPECT_GT(stable_step(0.01, 1.0, 0.001, 0.4), stable_step(0.01, 1.0, 0.1, 0.4));
  EXPECT_LE(stable_step(0.01, 1.0, 0.0, 0.4), 0.4 * 0.01 + 1e-15);
}

TEST(Viscous, InteriorFluxConstantState) {
  FluxTable t = make_flux_table([](double x) { return std::sin(x); }, -2.0, 2.0);
  std::vector<double> u(6, 0.7), f(5);
  interior_fluxes(t, u.data(), 6, 3.0, f.data());
  for (double v : f) EXPECT_NEAR(v, std::sin(0.7), 1e-6);
}

TEST(Viscous, MaxPrincipleAndMassBalance) {
  const double eps = 0.05;
  HamiltonianSpec h = mollify(make_hamiltonian("sin"), eps);
  SmoothedData d = bump_data(eps, 0.0, 0.0, 400);
  ViscousResult r = solve_viscous_cl(h, d, eps, 0.5, 400);
  EXPECT_TRUE(r.bv.max_principle_ok);
  EXPECT_GE(r.bv.min_value, r.bv.lower_bound - 1e-12);
  EXPECT_LE(r.bv.max_value, r.bv.upper_bound + 1e-12);
  EXPECT_LT(r.bv.mass_balance_error, 1e-9);
  EXPECT_LE(r.bv.l1_max_growth, 1e-9);
  EXPECT_GT(r.bv.steps, 0);
}

TEST(Viscous, HJDerivativeMatchesCL) {
  const double eps = 0.05;
  HamiltonianSpec h = mollify(make_hamiltonian("sin"), eps);
  SmoothedData d = bump_data(eps, 0.0, 0.0, 800);
  ViscousHJResult r = solve_viscous_hj(h, d, eps, 0.5, 800);
  const double dx = r.u.x(1) - r.u.x(0);
  double fd = 0.0;
  for (Eigen::Index l = 0; l < r.u.levels(); ++l)
    for (Eigen::Index i = 1; i + 1 < r.u.points(); ++i)
      fd = std::max(fd, std::abs((r.U.values(l, i + 1) - r.U.values(l, i - 1)) / (2 * dx) - r.u.values(l, i)));
  EXPECT_LE(fd, 5.0 * dx * r.bv.ux_sup);
  EXPECT_LE(r.Ut_sup, r.hj_sup_bound + 1e-6);
}

TEST(Viscous, StepCapIsCFLViolation) {
  const double eps = 0.05;
  HamiltonianSpec h = mollify(make_hamiltonian("sin"), eps);
  SmoothedData d = bump_data(eps, 0.0, 0.0, 400);
  ViscousOptions opt;
  opt.max_steps = 10;
  try {
    solve_viscous_cl(h, d, eps, 1.0, 400, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CFLViolation);
  }
}
