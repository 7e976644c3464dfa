#include <gtest/gtest.h>

#include <cmath>

#include "hjm/error.hpp"
#include "hjm/measure.hpp"

using namespace hjm;

namespace {

RadonMeasure1D sample_measure() {
  RadonMeasure1D m;
  m.grid = {-1.0, 1.0, 200};
  m.density = (m.grid.centers() * 3.0).sin() + 0.5;
  m.atoms = {{-0.3, 0.8}, {0.4, -0.25}};
  return m;
}

}  // namespace

TEST(Grid, Geometry) {
  Grid1D g{-1.0, 1.0, 4};
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_DOUBLE_EQ(g.node(4), 1.0);
  EXPECT_DOUBLE_EQ(g.center(0), -0.75);
  EXPECT_EQ(g.cell_of(-0.1), 1);
  EXPECT_EQ(g.cell_of(5.0), 3);
}

TEST(Measure, Validate) {
  RadonMeasure1D m = sample_measure();
  EXPECT_NO_THROW(m.validate());
  EXPECT_NEAR(m.singular_mass(), 0.55, 1e-15);
  m.atoms.push_back({0.1, 1.0});  // out of order
  EXPECT_THROW(m.validate(), Error);
}

TEST(Measure, PrimitiveHasAtomJumps) {
  RadonMeasure1D m = sample_measure();
  PiecewiseFunction U = primitive_function(m, m.grid.a);
  ASSERT_EQ(U.breakpoints.size(), 2u);
  EXPECT_NEAR(U.jump(0), 0.8, 1e-12);
  EXPECT_NEAR(U.jump(1), -0.25, 1e-12);
  EXPECT_NEAR(U(m.grid.a), 0.0, 1e-12);
  double total = m.regular_mass() + m.singular_mass();
  EXPECT_NEAR(U(m.grid.b), total, 1e-10);
}

TEST(Measure, PrimitiveDerivativeRoundTrip) {
  RadonMeasure1D m = sample_measure();
  PiecewiseFunction U = primitive_function(m, 0.0);
  RadonMeasure1D back = derivative_measure(U, m.grid);
  ASSERT_EQ(back.atoms.size(), m.atoms.size());
  for (std::size_t j = 0; j < m.atoms.size(); ++j) {
    EXPECT_NEAR(back.atoms[j].x, m.atoms[j].x, 1e-12);
    EXPECT_NEAR(back.atoms[j].mass, m.atoms[j].mass, 1e-12);
  }
  EXPECT_LT((back.density - m.density).abs().maxCoeff(), 1e-9);
}

TEST(Measure, AnchorOnAtom) {
  RadonMeasure1D m = sample_measure();
  try {
    primitive_function(m, -0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AnchorOnAtom);
  }
}

TEST(Measure, PiecewiseLimits) {
  Grid1D g{0.0, 2.0, 20};
  PiecewiseFunction U = piecewise_from_nodes(g, [](double x) { return x; }, {1.0}, {1.0}, {3.0});
  EXPECT_NEAR(U.left_limit(1.0), 1.0, 1e-12);
  EXPECT_NEAR(U.right_limit(1.0), 3.0, 1e-12);
  EXPECT_NEAR(U(1.0), 3.0, 1e-12);
  EXPECT_NEAR(U.jump(0), 2.0, 1e-12);
  EXPECT_EQ(U.piece_of(0.5), 0u);
  EXPECT_EQ(U.piece_of(1.5), 1u);
}

TEST(Measure, BreakpointMismatch) {
  PiecewiseFunction U;
  U.breakpoints = {0.5};
  Piece p{Eigen::ArrayXd::LinSpaced(3, 0.0, 1.0), Eigen::ArrayXd::Zero(3)};
  U.pieces = {p};
  try {
    U.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BreakpointMismatch);
  }
}

TEST(Partition, SumsToOne) {
  const double a = -1.0, b = 1.0, eps = 0.01;
  for (double x = a; x <= b; x += 0.01) {
    Partition p = partition_of_unity(a, b, eps, x);
    EXPECT_NEAR(p.f1 + p.f2 + p.f3, 1.0, 1e-14);
    EXPECT_GE(p.f1, -1e-15);
    EXPECT_GE(p.f2, -1e-15);
    EXPECT_GE(p.f3, -1e-15);
  }
  EXPECT_NEAR(partition_of_unity(a, b, eps, a).f1, 1.0, 1e-14);
  EXPECT_NEAR(partition_of_unity(a, b, eps, b).f3, 1.0, 1e-14);
  EXPECT_NEAR(partition_of_unity(a, b, eps, 0.0).f2, 1.0, 1e-14);
}

TEST(Smoothing, BoundaryValuesAndBounds) {
  Grid1D g{-1.0, 1.0, 400};
  PiecewiseFunction U = piecewise_from_nodes(g, [](double x) { return 0.5 * x * x; }, {}, {}, {});
  SmoothedData d = smooth_initial(U, 0, -2.0, 3.0, 0.01, 400);
  EXPECT_NEAR(d.u0(0), -2.0, 1e-9);
  EXPECT_NEAR(d.u0(d.u0.size() - 1), 3.0, 1e-9);
  EXPECT_NEAR(d.bound, 3.0, 1e-9);
  EXPECT_LE(d.u0.abs().maxCoeff(), d.bound + 1e-6);
  // interior agrees with U_0'
  int mid = static_cast<int>(d.x.size() / 2);
  EXPECT_NEAR(d.u0(mid), d.x(mid), 0.05);
}

TEST(Smoothing, DomainTooNarrow) {
  Grid1D g{0.0, 0.3, 30};
  PiecewiseFunction U = piecewise_from_nodes(g, [](double x) { return x; }, {}, {}, {});
  try {
    smooth_initial(U, 0, 0.0, 0.0, 0.01, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainTooNarrow);
  }
}
