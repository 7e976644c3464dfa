#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hjm/verifier.hpp"

using namespace hjm;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no hjm::Error thrown";
  return ErrorCode::ConfigError;
}

RadonMeasure1D bump_plus_atom(double mass) {
  RadonMeasure1D m = fixtures::pinch(800, mass, 2.0);
  Eigen::ArrayXd x = m.grid.centers();
  m.density = (x.abs() < 1.0).select(0.5 * (M_PI * x / 2).cos().square(), 0.0);
  return m;
}

}  // namespace

TEST(Bounds, SinPinch) {
  HamiltonianSpec h = make_hamiltonian("sin");
  RadonMeasure1D u0 = fixtures::pinch(1000);
  RefineSchedule s = fixtures::quick_schedule();
  MeasureSolution msol = solve_measure_fixed(h, u0, 1.0, 40.0, s);
  HJSolution hj = reconstruct_hj(msol, primitive_function(u0, u0.grid.a));
  WaitingTimeReport w = check_bounds(msol, hj, h, classify_hypotheses(h, default_k_grid()), s.report_dt);
  ASSERT_EQ(w.atoms.size(), 1u);
  const AtomVerdict& v = w.atoms[0];
  EXPECT_NEAR(v.lower, 0.5, 1e-6);
  ASSERT_TRUE(v.upper.has_value());
  EXPECT_NEAR(*v.upper, 0.5, 1e-6);
  EXPECT_EQ(v.outcome, "extinguished");
  EXPECT_EQ(v.prediction, "finite");
  EXPECT_TRUE(v.consistency_ok);
  EXPECT_TRUE(w.ok());
}

TEST(Comparison, EqualData) {
  HamiltonianSpec h = make_hamiltonian("sin");
  RadonMeasure1D u0 = bump_plus_atom(1.0);
  ComparisonReport r = check_comparison(u0, u0, h, 0.6, fixtures::quick_schedule());
  EXPECT_NEAR(r.density_excess, 0.0, 1e-12);
  EXPECT_NEAR(r.atom_excess, 0.0, 1e-12);
  EXPECT_NEAR(r.U_excess, 0.0, 1e-12);
  EXPECT_TRUE(r.ok);
}

TEST(Comparison, OrderedAtoms) {
  HamiltonianSpec h = make_hamiltonian("sin");
  ComparisonReport r = check_comparison(bump_plus_atom(0.5), bump_plus_atom(1.0), h, 0.6, fixtures::quick_schedule());
  EXPECT_TRUE(r.ok);
  EXPECT_LE(r.atom_excess, 1e-9);
  // U ordering holds up to the grid error
  EXPECT_LE(r.U_excess, 0.25 * 4.0 / 800);
}

TEST(Comparison, UnorderedDataRejected) {
  HamiltonianSpec h = make_hamiltonian("sin");
  EXPECT_EQ(code_of([&] { check_comparison(bump_plus_atom(1.0), bump_plus_atom(0.5), h, 0.5, {}); }),
            ErrorCode::HypothesisViolated);
}

TEST(Finiteness, RegimeMismatch) {
  auto grid = default_k_grid();
  RadonMeasure1D u0 = fixtures::pinch(400);
  for (const char* name : {"sin", "arctan"}) {
    HamiltonianSpec h = make_hamiltonian(name);
    HypothesisReport hyp = classify_hypotheses(h, grid);
    EXPECT_EQ(code_of([&] { check_finiteness_h5(h, hyp, 1.0, u0, grid); }), ErrorCode::RegimeMismatch) << name;
  }
}

TEST(Finiteness, ExpSinHorizon) {
  auto grid = default_k_grid();
  HamiltonianSpec h = make_hamiltonian("exp_sin");
  HypothesisReport hyp = classify_hypotheses(h, grid);
  RadonMeasure1D u0 = fixtures::pinch(400, 1.0, 13.5);
  FinitenessHorizon f1 = check_finiteness_h5(h, hyp, 1.0, u0, grid);
  ASSERT_TRUE(f1.horizon.has_value());
  EXPECT_NEAR(*f1.horizon, 3.1, 0.05);
  // no regular part: the horizon is linear in the mass
  FinitenessHorizon f2 = check_finiteness_h5(h, hyp, 0.01, u0, grid);
  ASSERT_TRUE(f2.horizon.has_value());
  EXPECT_NEAR(*f2.horizon, 0.01 * *f1.horizon, 1e-9);
}
