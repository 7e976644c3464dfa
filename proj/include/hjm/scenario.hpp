#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjm/entropy_limit.hpp"
#include "hjm/io.hpp"

namespace hjm {

// One additive term of the regular part u_0r.
struct DensityTerm {
  std::string type;  // constant, box, bump, ramp
  double value = 0.0;
  double from = 0.0, to = 0.0;
  double center = 0.0, width = 1.0;
  double slope = 0.0;
  double operator()(double x) const;
};

struct InitialData {
  std::vector<DensityTerm> density;
  std::vector<Atom> atoms;
  double density_at(double x) const;
  RadonMeasure1D discretize(const Grid1D& grid, bool infinite_left, bool infinite_right, double shift = 0.0) const;
};

struct Tolerances {
  double conservation = 1e-3;
  double entropy_per_dx = 100.0;  // Kruzhkov residual floor is -entropy_per_dx * dx
  double compatibility = 0.25;    // fraction of sup H - inf H
  int compatibility_cells = 2;
  double compatibility_skip = 0.125;  // bumps start at this fraction of the atom lifetime
  double entropy_time_levels = 10.0;  // least snapshot spacings per time radius
  double envelope = 1e-6;
  double supersolution = 1e-6;
  double growth = 1e-6;
  double decay_rate = 1e-5;
  double time_lipschitz = 1e-9;
  double viscous = 1e-6;
};

struct Scenario {
  std::string name;
  std::string kind = "cauchy";  // cauchy, comparison, viscous, adversarial
  std::string flux;
  Grid1D grid;
  bool infinite_left = true, infinite_right = true;
  std::optional<double> T_max;  // absent: automatic horizon
  InitialData initial;
  InitialData compare_to;  // kind comparison
  RefineSchedule refine;
  std::vector<std::string> checks;
  Tolerances tol;
  std::optional<bool> expect_extinction;
  double transport_speed = 1.0;
  double transport_constant = 0.0;  // 0: no transport check
  double viscous_eps = 0.05;
  double viscous_m1 = 0.0, viscous_m2 = 0.0;
  int viscous_piece = 0;
  double adversarial_state = 0.0;  // wrong-sided state right of the atom
  double adversarial_speed = 0.0;
  std::filesystem::path source;
  std::filesystem::path output_dir;
  long seed = 0;

  bool wants(const std::string& check) const;
};

Scenario parse_scenario(const std::string& yaml_text, const std::filesystem::path& source = {});
Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioResult {
  std::string name;
  bool passed = false;
  std::string error;  // error code and message when the pipeline threw
  Json verdict;
  std::vector<std::string> failed_checks;
};

struct RunOptions {
  std::filesystem::path output_root = "out";
  bool write_artifacts = true;
  long seed = 0;
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opt = {});

struct SuiteResult {
  std::vector<ScenarioResult> results;  // sorted by name
  bool passed = true;
  bool empty = false;
  Json aggregate;
  std::string summary;  // plain-text table
};

// Workers from HJM_WORKERS (default: hardware concurrency).
int default_workers();
SuiteResult run_suite(const std::filesystem::path& dir, const RunOptions& opt = {}, int workers = 0);

// Dotted path into the YAML config, e.g. "initial.atoms.0.mass".
std::vector<ScenarioResult> run_sweep(const std::filesystem::path& templ, const std::string& param,
                                      const std::vector<std::string>& values, const RunOptions& opt = {},
                                      int workers = 0);

std::string version_string();

}  // namespace hjm
