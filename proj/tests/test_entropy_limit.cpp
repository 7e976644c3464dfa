#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hjm/entropy_limit.hpp"

using namespace hjm;

TEST(WaitingTime, LinearDecay) {
  AtomTrajectory tr;
  tr.c = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    double t = 1e-3 * i;
    tr.t.push_back(t);
    tr.C.push_back(std::max(0.0, 1.0 - 2.0 * t));
  }
  Bracket b = waiting_time(tr, 1e-3);
  EXPECT_TRUE(b.extinguished);
  EXPECT_NEAR(b.t_lo, 0.4995, 1e-9);
  EXPECT_NEAR(b.t_hi, 0.5005, 1e-9);
  EXPECT_NEAR(b.rate, 2.0, 1e-9);
}

TEST(WaitingTime, NotReached) {
  AtomTrajectory tr;
  tr.c = -1.0;
  tr.t = {0.0, 0.5, 1.0};
  tr.C = {-1.0, -0.8, -0.6};
  Bracket b = waiting_time(tr, 1e-3);
  EXPECT_FALSE(b.extinguished);
  EXPECT_DOUBLE_EQ(b.horizon, 1.0);
}

TEST(WaitingTime, GrowthIsMonotonicityViolation) {
  AtomTrajectory tr;
  tr.c = 1.0;
  tr.t = {0.0, 0.1, 0.2};
  tr.C = {1.0, 0.9, 1.1};
  try {
    waiting_time(tr, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MonotonicityViolation);
  }
}

TEST(WaitingTime, SignChange) {
  AtomTrajectory tr;
  tr.c = 1.0;
  tr.t = {0.0, 0.1, 0.2};
  tr.C = {1.0, 0.2, -0.5};
  EXPECT_THROW(waiting_time(tr, 1e-3), Error);
}

TEST(MeasureSolver, SinPinchCoarse) {
  HamiltonianSpec h = make_hamiltonian("sin");
  MeasureSolution s = solve_measure_cauchy(h, fixtures::pinch(1000), 1.0, fixtures::quick_schedule());
  ASSERT_EQ(s.atoms.size(), 1u);
  const Bracket& b = s.atoms[0].bracket;
  ASSERT_TRUE(b.extinguished);
  EXPECT_LE(b.t_lo, 0.5);
  EXPECT_GE(b.t_hi, 0.5);
  EXPECT_LE(b.t_hi - b.t_lo, 0.02);
  // |C| nonincreasing and of fixed sign
  const auto& C = s.atoms[0].C;
  for (std::size_t i = 1; i < C.size(); ++i) {
    EXPECT_LE(C[i], C[i - 1] + 1e-12);
    EXPECT_GE(C[i], 0.0);
  }
  // atom masses are exactly balanced by the edge fluxes
  for (std::size_t r = 0; r < s.total_mass.size(); ++r)
    EXPECT_NEAR(s.total_mass[r] - s.total_mass[0], s.edge_inflow[r], 1e-10);
  EXPECT_TRUE(s.refinement.converged);
}

TEST(MeasureSolver, ConstantFluxKeepsAtom) {
  HamiltonianSpec h = make_hamiltonian("constant(0.7)");
  MeasureSolution s = solve_measure_fixed(h, fixtures::pinch(400), 1.0, 20.0, fixtures::quick_schedule());
  EXPECT_FALSE(s.atoms[0].bracket.extinguished);
  EXPECT_NEAR(s.atoms[0].C.back(), 1.0, 1e-12);
}

TEST(MeasureSolver, NegativeAtomSymmetric) {
  HamiltonianSpec h = make_hamiltonian("sin");
  MeasureSolution s = solve_measure_fixed(h, fixtures::pinch(1000, -1.0), 1.0, 40.0, fixtures::quick_schedule());
  const Bracket& b = s.atoms[0].bracket;
  ASSERT_TRUE(b.extinguished);
  EXPECT_LE(b.t_lo, 0.5 + 1e-9);
  EXPECT_GE(b.t_hi, 0.5 - 1e-9);
}

TEST(MeasureSolver, StepCap) {
  HamiltonianSpec h = make_hamiltonian("sin");
  RefineSchedule s = fixtures::quick_schedule();
  s.max_steps = 5;
  try {
    solve_measure_fixed(h, fixtures::pinch(400), 1.0, 20.0, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CFLViolation);
  }
}

TEST(Traces, WindowTooNarrow) {
  HamiltonianSpec h = make_hamiltonian("sin");
  MeasureSolution s = solve_measure_fixed(h, fixtures::pinch(400), 0.5, 20.0, fixtures::quick_schedule());
  try {
    extract_trace(h, s.density, 0.0, 1, {s.grid.dx() * 1.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowTooNarrow);
  }
}

TEST(Traces, FaceFluxTraceOfSinPinch) {
  // while a positive atom lives the flux traces sit at sup H on the right and inf H on the left
  HamiltonianSpec h = make_hamiltonian("sin");
  MeasureSolution s = solve_measure_fixed(h, fixtures::pinch(1000), 0.4, 40.0, fixtures::quick_schedule());
  const TraceSeries& right = s.trace(0, +1);
  const TraceSeries& left = s.trace(0, -1);
  ASSERT_FALSE(right.values.empty());
  EXPECT_NEAR(right.values.back(), 1.0, 1e-6);
  EXPECT_NEAR(left.values.back(), -1.0, 1e-6);
}

TEST(Diagnostics, EntropyResidualOfSolverField) {
  HamiltonianSpec h = make_hamiltonian("sin");
  MeasureSolution s = solve_measure_fixed(h, fixtures::pinch(1000), 1.0, 40.0, fixtures::quick_schedule());
  ASSERT_FALSE(s.subrectangles.empty());
  const SubRectangle& r = s.subrectangles.back();
  GridField f = s.subrectangle_field(s.subrectangles.size() - 1);
  EntropyReport e = entropy_residual(h, f, {-1.0, 0.0, 1.0, 2.0, 4.0}, r.x_lo, r.x_hi, r.t_begin, r.t_end,
                                     std::max(0.05, (r.x_hi - r.x_lo) / 10), (r.t_end - r.t_begin) / 4);
  EXPECT_GT(e.tests, 0);
  EXPECT_GE(e.min_residual, -100.0 * s.grid.dx());
}
