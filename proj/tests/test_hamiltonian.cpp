#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hjm/error.hpp"
#include "hjm/hamiltonian.hpp"

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

}  // namespace

TEST(Hamiltonian, SinNorms) {
  HamiltonianSpec h = make_hamiltonian("sin");
  EXPECT_NEAR(h.sup_norm(), 1.0, 1e-6);
  EXPECT_NEAR(h.lip_norm(), 1.0, 1e-3);
  EXPECT_NEAR(h.min_value(), -1.0, 1e-6);
  EXPECT_NEAR(h.max_value(), 1.0, 1e-6);
  const Asymptotics& a = h.asymptotics();
  EXPECT_NEAR(a.hstar_plus, 1.0, 1e-6);
  EXPECT_NEAR(a.hlow_plus, -1.0, 1e-6);
  EXPECT_FALSE(h.limits().hplus.has_value());
}

TEST(Hamiltonian, ArctanLimits) {
  HamiltonianSpec h = make_hamiltonian("arctan");
  ASSERT_TRUE(h.limits().hplus.has_value());
  ASSERT_TRUE(h.limits().hminus.has_value());
  EXPECT_NEAR(*h.limits().hplus, M_PI / 2, 1e-4);
  EXPECT_NEAR(*h.limits().hminus, -M_PI / 2, 1e-4);
}

TEST(Hamiltonian, RejectsNonLipschitz) {
  EXPECT_EQ(code_of([] { make_hamiltonian([](double x) { return std::sqrt(std::abs(x)); }, "sqrt_abs"); }),
            ErrorCode::NonLipschitz);
}

TEST(Hamiltonian, RejectsUnbounded) {
  EXPECT_EQ(code_of([] { make_hamiltonian([](double x) { return x; }, "identity"); }), ErrorCode::Unbounded);
}

TEST(Hamiltonian, UnknownFormula) {
  EXPECT_EQ(code_of([] { make_hamiltonian("cosh"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { make_hamiltonian("clipped_linear(2,1)"); }), ErrorCode::ConfigError);
}

TEST(Hamiltonian, ClippedLinear) {
  HamiltonianSpec h = make_hamiltonian("clipped_linear(-2,2)");
  EXPECT_DOUBLE_EQ(h(0.5), 0.5);
  EXPECT_DOUBLE_EQ(h(7.0), 2.0);
  EXPECT_DOUBLE_EQ(h(-7.0), -2.0);
}

TEST(Hamiltonian, TableFromCsv) {
  auto path = std::filesystem::temp_directory_path() / "hjm_test_table.csv";
  {
    std::ofstream out(path);
    out << "xi,H\n-1,0\n0,1\n1,0\n";
  }
  HamiltonianSpec h = make_hamiltonian(path.string());
  EXPECT_NEAR(h(0.5), 0.5, 1e-12);
  EXPECT_NEAR(h(-0.25), 0.75, 1e-12);
  EXPECT_NEAR(h(10.0), 0.0, 1e-12);
  std::filesystem::remove(path);
}

TEST(Hamiltonian, BumpAndStep) {
  EXPECT_DOUBLE_EQ(bump(1.0), 0.0);
  EXPECT_NEAR(bump(0.0), std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(smooth_step(-0.1), 0.0);
  EXPECT_DOUBLE_EQ(smooth_step(1.1), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-9);
  EXPECT_GT(smooth_step_d1(0.5), 0.0);
}

TEST(Hamiltonian, MollifiedSin) {
  HamiltonianSpec h = make_hamiltonian("sin");
  // [eta_eps * sin](u) = sin(u) * int eta_eps(s) cos(s) ds, and the factor is close to 1
  const double eps = 0.05;
  double ratio = mollified_value(h, eps, M_PI / 2);
  EXPECT_LT(ratio, 1.0);
  EXPECT_GT(ratio, 1.0 - eps * eps);
  EXPECT_NEAR(mollified_value(h, eps, 0.0), 0.0, 1e-12);
  HamiltonianSpec m = mollify(h, eps);
  EXPECT_LE(m.sup_norm(), h.sup_norm() + 1e-9);
  EXPECT_NEAR(m(1.0), ratio * std::sin(1.0), 1e-9);
  // cut off far out
  EXPECT_DOUBLE_EQ(m(3.0 / eps), 0.0);
}

TEST(Hamiltonian, Cutoff) {
  EXPECT_DOUBLE_EQ(cutoff(0.1, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(cutoff(0.1, 25.0), 0.0);
  double a = cutoff(0.1, 15.0);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
}

TEST(Classify, Regimes) {
  auto grid = default_k_grid();
  HypothesisReport sin_r = classify_hypotheses(make_hamiltonian("sin"), grid);
  EXPECT_EQ(sin_r.regime_for(1.0), Regime::NoLimit);
  EXPECT_EQ(sin_r.regime_for(-1.0), Regime::NoLimit);

  HypothesisReport at = classify_hypotheses(make_hamiltonian("arctan"), grid);
  EXPECT_TRUE(at.plus.h4);
  EXPECT_TRUE(at.plus.h6);
  EXPECT_EQ(at.regime_for(1.0), Regime::H6);

  HypothesisReport ex = classify_hypotheses(make_hamiltonian("exp_sin"), grid);
  EXPECT_TRUE(ex.plus.h5);
  EXPECT_EQ(ex.regime_for(1.0), Regime::H5);

  HypothesisReport c = classify_hypotheses(make_hamiltonian("constant(0.7)"), grid);
  EXPECT_TRUE(c.plus.eventually_constant);
  EXPECT_EQ(c.regime_for(1.0), Regime::EventuallyConstant);
}

TEST(Classify, ShiftInvariant) {
  auto grid = default_k_grid();
  HamiltonianSpec a = make_hamiltonian("arctan");
  HamiltonianSpec b = make_hamiltonian([](double x) { return std::atan(x) + 3.0; }, "arctan_plus_3");
  HypothesisReport ra = classify_hypotheses(a, grid), rb = classify_hypotheses(b, grid);
  EXPECT_EQ(ra.plus.h4, rb.plus.h4);
  EXPECT_EQ(ra.plus.h5, rb.plus.h5);
  EXPECT_EQ(ra.plus.h6, rb.plus.h6);
  EXPECT_EQ(ra.plus.h6_sign, rb.plus.h6_sign);
  EXPECT_EQ(ra.minus.h6, rb.minus.h6);
  ASSERT_EQ(ra.plus.modulus.size(), rb.plus.modulus.size());
  for (std::size_t i = 0; i < ra.plus.modulus.size(); ++i)
    EXPECT_NEAR(ra.plus.modulus[i], rb.plus.modulus[i], 1e-6);
}

TEST(Classify, ShortGrid) {
  HamiltonianSpec h = make_hamiltonian("sin");
  EXPECT_EQ(code_of([&] { classify_hypotheses(h, {1.0, 2.0}); }), ErrorCode::InconclusiveTail);
}
