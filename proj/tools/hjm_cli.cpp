#include <CLI11.hpp>

#include <iostream>

#include "hjm/hamiltonian.hpp"
#include "hjm/io.hpp"
#include "hjm/scenario.hpp"

namespace {

void print_result(const hjm::ScenarioResult& r) {
  std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
  if (!r.error.empty()) std::cout << "  " << r.error;
  for (std::size_t i = 0; i < r.failed_checks.size(); ++i) std::cout << (i ? ", " : "  failed: ") << r.failed_checks[i];
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservation laws with measure data and the paired Hamilton-Jacobi problem"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  long seed = 0;
  app.add_option("--out", out_dir, "artifact root");
  app.add_option("--seed", seed, "recorded in the manifest; the pipeline is deterministic");
  app.set_version_flag("--version", hjm::version_string());

  std::string config;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);

  std::string suite_dir;
  int workers = 0;
  auto* suite = app.add_subcommand("suite", "run every scenario in a directory");
  suite->add_option("dir", suite_dir)->required()->check(CLI::ExistingDirectory);
  suite->add_option("--workers", workers, "overrides HJM_WORKERS");

  std::string flux;
  auto* classify = app.add_subcommand("classify", "probe a flux and print its tail hypotheses");
  classify->add_option("flux", flux, "builtin formula or table CSV")->required();

  std::string templ, param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "grid sweep over one config parameter");
  sweep->add_option("template", templ)->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "dotted path, e.g. initial.atoms.0.mass")->required();
  sweep->add_option("--values", values, "values to substitute")->required();
  sweep->add_option("--workers", workers);

  CLI11_PARSE(app, argc, argv);

  hjm::RunOptions opt;
  opt.output_root = out_dir;
  opt.seed = seed;
  try {
    if (*run) {
      hjm::ScenarioResult r = hjm::run_scenario(hjm::load_scenario(config), opt);
      print_result(r);
      std::cout << r.verdict.dump(2) << '\n';
      return r.passed ? 0 : 1;
    }
    if (*suite) {
      hjm::SuiteResult r = hjm::run_suite(suite_dir, opt, workers);
      if (r.empty) std::cerr << "warning: no scenarios in " << suite_dir << '\n';
      std::cout << r.summary;
      return r.passed ? 0 : 1;
    }
    if (*classify) {
      hjm::HamiltonianSpec h = hjm::make_hamiltonian(flux);
      hjm::Json j{{"flux", hjm::to_json(h)}, {"hypotheses", hjm::to_json(hjm::classify_hypotheses(h, hjm::default_k_grid()))}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*sweep) {
      auto rs = hjm::run_sweep(templ, param, values, opt, workers);
      bool ok = true;
      for (const auto& r : rs) {
        print_result(r);
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const hjm::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
