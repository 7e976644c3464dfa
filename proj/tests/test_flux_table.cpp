#include <gtest/gtest.h>

#include <cmath>

#include "hjm/error.hpp"
#include "hjm/flux_table.hpp"

using namespace hjm;

namespace {
const ScalarMap sin_map = [](double x) { return std::sin(x); };
}

TEST(FluxTable, InterpolatesNodes) {
  FluxTable t(sin_map, -4.0, 4.0, 8001);
  for (double u : {-3.9, -1.0, 0.0, 0.3, 2.5}) EXPECT_NEAR(t.value(u), std::sin(u), 1e-6);
  EXPECT_NEAR(t.lipschitz(), 1.0, 1e-3);
}

TEST(FluxTable, SplittingSumsToH) {
  FluxTable t(sin_map, -4.0, 4.0, 8001);
  for (double u : {-3.0, -0.5, 1.0, 3.5}) EXPECT_NEAR(t.positive_part(u) + t.negative_part(u), t.value(u), 1e-12);
}

TEST(FluxTable, EngquistOsherConsistentAndMonotone) {
  FluxTable t(sin_map, -4.0, 4.0, 8001);
  for (double u : {-2.0, 0.0, 1.7}) EXPECT_NEAR(t.engquist_osher(u, u), t.value(u), 1e-12);
  // nondecreasing in the first argument, nonincreasing in the second
  for (double a = -3.5; a < 3.5; a += 0.1) {
    EXPECT_LE(t.engquist_osher(a, 0.3), t.engquist_osher(a + 0.1, 0.3) + 1e-12);
    EXPECT_GE(t.engquist_osher(0.3, a), t.engquist_osher(0.3, a + 0.1) - 1e-12);
  }
}

TEST(FluxTable, Godunov) {
  FluxTable t(sin_map, -5.0, 5.0, 10001);
  // a <= b: minimum over [a,b]
  EXPECT_NEAR(t.godunov(0.0, 3.0 * M_PI / 2), -1.0, 1e-6);
  // a > b: maximum over [b,a]
  EXPECT_NEAR(t.godunov(3.0, -1.0), 1.0, 1e-6);
  EXPECT_NEAR(t.godunov(0.5, 0.5), std::sin(0.5), 1e-6);
  EXPECT_NEAR(t.range_max(-3.9, 3.9), 1.0, 1e-6);
  EXPECT_NEAR(t.range_min(-3.9, 3.9), -1.0, 1e-6);
}

TEST(FluxTable, BlocksAgreeWithScan) {
  FluxTable t(sin_map, -40.0, 40.0, 20001);
  for (double a : {-39.0, -11.3, 0.1}) {
    double b = a + 17.7;
    double lo = 1e9, hi = -1e9;
    for (double u = a; u <= b; u += 1e-3) {
      lo = std::min(lo, t.value(u));
      hi = std::max(hi, t.value(u));
    }
    EXPECT_NEAR(t.range_min(a, b), lo, 1e-5);
    EXPECT_NEAR(t.range_max(a, b), hi, 1e-5);
  }
}

TEST(FluxTable, OutOfRangeIsBlowUp) {
  FluxTable t(sin_map, -1.0, 1.0, 101);
  try {
    t.value(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BlowUp);
  }
}

TEST(FluxTable, BadRange) {
  EXPECT_THROW(FluxTable t(sin_map, 1.0, 1.0, 10), Error);
}
