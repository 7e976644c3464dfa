#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hjm/error.hpp"
#include "hjm/scenario.hpp"

using namespace hjm;
namespace fs = std::filesystem;

namespace {

const char* kConstant = R"(
name: inline_constant
flux: constant(0.7)
domain: {a: -2.0, b: 2.0, cells: 200}
T_max: 1.0
initial:
  atoms:
    - {x: 0.0, mass: 1.0}
expect: {extinction: false}
checks: [bounds, conservation, correspondence, finiteness]
)";

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("hjm_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode parse_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorCode::BlowUp;
}

}  // namespace

TEST(Config, ParsesInline) {
  Scenario s = parse_scenario(kConstant);
  EXPECT_EQ(s.name, "inline_constant");
  EXPECT_EQ(s.grid.cells, 200);
  ASSERT_TRUE(s.T_max.has_value());
  EXPECT_DOUBLE_EQ(*s.T_max, 1.0);
  ASSERT_EQ(s.initial.atoms.size(), 1u);
  EXPECT_TRUE(s.wants("bounds"));
  EXPECT_FALSE(s.wants("entropy"));
}

TEST(Config, Malformed) {
  EXPECT_EQ(parse_code("name: [unclosed"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_code("flux: sin\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_code(std::string(kConstant) + "bogus_key: 1\n"), ErrorCode::ConfigError);
  std::string bad_check = kConstant;
  bad_check.replace(bad_check.find("finiteness"), 10, "astrology");
  EXPECT_EQ(parse_code(bad_check), ErrorCode::ConfigError);
}

TEST(Config, UnknownFluxLeavesNoArtifacts) {
  std::string text = kConstant;
  text.replace(text.find("constant(0.7)"), 13, "no_such_flux");
  fs::path out = fresh_dir("noartifacts");
  RunOptions opt;
  opt.output_root = out;
  ScenarioResult r = run_scenario(parse_scenario(text), opt);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.error.empty());
  EXPECT_TRUE(fs::is_empty(out));
}

TEST(Run, ConstantFluxPasses) {
  fs::path out = fresh_dir("constant");
  RunOptions opt;
  opt.output_root = out;
  ScenarioResult r = run_scenario(parse_scenario(kConstant), opt);
  EXPECT_TRUE(r.passed) << r.error;
  const Json& atom = r.verdict["checks"]["bounds"]["atoms"][0];
  EXPECT_EQ(atom["outcome"], "not extinguished by T");
  for (const char* f : {"verdict.json", "manifest.json", "atoms.csv", "traces.csv", "density.csv", "U.csv"})
    EXPECT_TRUE(fs::exists(out / "inline_constant" / f)) << f;
  Json manifest = Json::parse(slurp(out / "inline_constant" / "manifest.json"));
  EXPECT_TRUE(manifest.contains("refine"));
  EXPECT_TRUE(manifest["scenario"].contains("tolerances"));
}

TEST(Run, Deterministic) {
  RunOptions a, b;
  a.output_root = fresh_dir("det_a");
  b.output_root = fresh_dir("det_b");
  run_scenario(parse_scenario(kConstant), a);
  run_scenario(parse_scenario(kConstant), b);
  for (const char* f : {"verdict.json", "manifest.json", "atoms.csv"})
    EXPECT_EQ(slurp(a.output_root / "inline_constant" / f), slurp(b.output_root / "inline_constant" / f)) << f;
}

TEST(Suite, EmptyDirectoryPassesWithWarning) {
  fs::path dir = fresh_dir("empty_suite");
  RunOptions opt;
  opt.output_root = fresh_dir("empty_suite_out");
  SuiteResult s = run_suite(dir, opt, 1);
  EXPECT_TRUE(s.passed);
  EXPECT_TRUE(s.empty);
  EXPECT_FALSE(s.aggregate["warning"].is_null());
}

TEST(Suite, NegativeControlFails) {
  RunOptions opt;
  opt.output_root = fresh_dir("negative_out");
  SuiteResult s = run_suite(fs::path(HJM_SOURCE_DIR) / "scenarios" / "negative", opt, 2);
  EXPECT_FALSE(s.passed);
  ASSERT_FALSE(s.results.empty());
  EXPECT_TRUE(fs::exists(opt.output_root / "suite_verdict.json"));
  EXPECT_TRUE(fs::exists(opt.output_root / "summary.txt"));
}

TEST(Sweep, SubstitutesDottedPath) {
  fs::path dir = fresh_dir("sweep_in");
  fs::path templ = dir / "templ.yaml";
  std::ofstream(templ) << kConstant;
  RunOptions opt;
  opt.output_root = fresh_dir("sweep_out");
  auto results = run_sweep(templ, "initial.atoms.0.mass", {"0.5", "2.0"}, opt, 2);
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.error;
  EXPECT_DOUBLE_EQ(results[0].verdict["summary"]["atoms"][0]["c"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(results[1].verdict["summary"]["atoms"][0]["c"].get<double>(), 2.0);
  EXPECT_TRUE(fs::exists(opt.output_root / "sweep.json"));
  EXPECT_THROW(run_sweep(templ, "initial.nothing.0", {"1"}, opt, 1), Error);
}

TEST(Suite, VersionString) { EXPECT_FALSE(version_string().empty()); }
