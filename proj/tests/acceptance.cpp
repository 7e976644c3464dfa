// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "hjm/entropy_limit.hpp"
#include "hjm/hj_layer.hpp"
#include "hjm/scenario.hpp"

using namespace hjm;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

fs::path source_dir() { return fs::path(HJM_SOURCE_DIR); }

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("hjm_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Residuals {
  double distributional = 0.0;
  double jump_mismatch = 0.0;
  double tol_mass = 0.0;
};

Residuals correspondence_at(const Scenario& s, int cells) {
  Grid1D g = s.grid;
  g.cells = cells;
  HamiltonianSpec h = make_hamiltonian(s.flux);
  RadonMeasure1D u0 = s.initial.discretize(g, s.infinite_left, s.infinite_right);
  double k = s.refine.surrogate_factors.back() * std::max(1.0, u0.density_sup());
  MeasureSolution msol = solve_measure_fixed(h, u0, *s.T_max, k, s.refine);
  HJSolution hj = reconstruct_hj(msol, primitive_function(u0, u0.grid.a));
  CorrespondenceReport c = check_correspondence(msol, hj);
  Residuals r{c.distributional, c.jump_mismatch, 0.0};
  for (const auto& a : msol.atoms) r.tol_mass = std::max(r.tol_mass, a.tol_mass);
  return r;
}

const Json* find_check(const std::map<std::string, Json>& verdicts, const std::string& name, const std::string& check) {
  auto it = verdicts.find(name);
  if (it == verdicts.end() || !it->second.contains("checks") || !it->second["checks"].contains(check)) return nullptr;
  return &it->second["checks"][check];
}

}  // namespace

int main() {
  const fs::path standard = source_dir() / "scenarios" / "standard";

  // 1: pinch bracket
  {
    Scenario s = load_scenario(standard / "sin_delta_pinch.yaml");
    HamiltonianSpec h = make_hamiltonian(s.flux);
    RadonMeasure1D u0 = s.initial.discretize(s.grid, true, true);
    auto t0 = std::chrono::steady_clock::now();
    MeasureSolution msol = solve_measure_cauchy(h, u0, *s.T_max, s.refine);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Bracket& b = msol.atoms.at(0).bracket;
    bool ok = b.extinguished && b.t_lo <= 0.5 && b.t_hi >= 0.5 && b.t_hi - b.t_lo <= 0.02 && secs < 120.0 &&
              s.grid.cells == 4000 && s.refine.surrogate_factors.back() <= 160.0;
    report(1, ok,
           "sin pinch N=4000 bracket [" + fmt(b.t_lo) + ", " + fmt(b.t_hi) + "] (k=" +
               fmt(msol.refinement.surrogate_k) + ", " + fmt(secs) + " s)");
  }

  // 2: correspondence under one grid refinement
  {
    bool ok = true;
    std::string detail;
    for (const char* name : {"sin_delta_pinch", "smooth_bump"}) {
      Scenario s = load_scenario(standard / (std::string(name) + ".yaml"));
      Residuals coarse = correspondence_at(s, s.grid.cells / 2);
      Residuals fine = correspondence_at(s, s.grid.cells);
      double slope = std::log(coarse.distributional / fine.distributional) / std::log(2.0);
      bool jump_ok = fine.jump_mismatch <= 2.0 * fine.tol_mass;
      ok = ok && slope >= 0.8 && jump_ok;
      detail += std::string(detail.empty() ? "" : "; ") + name + " slope " + fmt(slope) + " (" +
                fmt(coarse.distributional) + " -> " + fmt(fine.distributional) + "), max|J-C| " +
                fmt(fine.jump_mismatch);
    }
    report(2, ok, detail);
  }

  // the suites feed criteria 3-10
  RunOptions opt;
  opt.output_root = scratch("standard");
  SuiteResult suite = run_suite(standard, opt, default_workers());
  std::map<std::string, Json> verdicts;
  std::string suite_errors;
  for (const auto& r : suite.results) {
    verdicts[r.name] = r.verdict;
    if (!r.error.empty()) suite_errors += " " + r.name + ": " + r.error;
  }

  // 3: monotone atom masses
  {
    bool ok = suite_errors.empty();
    int atoms = 0;
    double worst = 0.0;
    for (const auto& [name, v] : verdicts) {
      const Json* m = find_check(verdicts, name, "monotonicity");
      if (!m) continue;
      worst = std::max(worst, (*m)["max_increase"].get<double>());
      const Json* b = find_check(verdicts, name, "bounds");
      if (b) atoms += static_cast<int>((*b)["atoms"].size());
    }
    ok = ok && worst <= 1e-12;
    report(3, ok, "max increase of |C_j| " + fmt(worst) + " over " + std::to_string(atoms) + " atoms" + suite_errors);
  }

  // 4: lower bound, measured from the bracket's lower end
  {
    bool ok = true;
    double worst = INFINITY;
    int n = 0;
    std::string offenders;
    for (const auto& [name, v] : verdicts) {
      const Json* b = find_check(verdicts, name, "bounds");
      if (!b) continue;
      double dt = (*b)["dt"].get<double>();
      for (const auto& a : (*b)["atoms"]) {
        ++n;
        if (!a["extinguished"].get<bool>()) {
          ok = ok && a["horizon"].get<double>() + dt >= a["lower_bound"].get<double>() && a["lower_ok"].get<bool>();
          continue;
        }
        double slack = a["t_lo"].get<double>() + dt - a["lower_bound"].get<double>();
        worst = std::min(worst, slack);
        if (slack < 0.0 || !a["lower_ok"].get<bool>()) {
          ok = false;
          offenders += " " + name + "(c=" + fmt(a["c"].get<double>()) + ": t_lo " + fmt(a["t_lo"].get<double>()) +
                       ", t_hi " + fmt(a["t_hi"].get<double>()) + ", bound " +
                       fmt(a["lower_bound"].get<double>()) + ")";
        }
      }
    }
    report(4, ok && n > 0,
           std::to_string(n) + " atoms, min slack t_lo + dt - |c|/(2||H||) = " + fmt(worst) +
               (offenders.empty() ? "" : ";" + offenders));
  }

  // 5: conservation
  {
    bool ok = true;
    double worst = 0.0;
    int n = 0;
    for (const auto& [name, v] : verdicts) {
      const Json* c = find_check(verdicts, name, "conservation");
      if (!c) continue;
      double d = (*c)["relative_drift"].get<double>();
      worst = std::max(worst, d);
      ok = ok && d <= 1e-3;
      ++n;
    }
    report(5, ok && n > 0, std::to_string(n) + " scenarios, worst relative drift " + fmt(worst));
  }

  // 6: comparison fixtures
  {
    bool ok = true;
    std::string detail;
    for (const char* name : {"comparison_equal", "comparison_delta_2delta", "comparison_opposite_signs"}) {
      const Json* c = find_check(verdicts, name, "comparison");
      bool item = c && (*c)["ok"].get<bool>();
      ok = ok && item;
      detail += std::string(detail.empty() ? "" : "; ") + name +
                (c ? " excess " + fmt((*c)["density_excess"].get<double>()) + " <= " + fmt((*c)["tol"].get<double>())
                   : " missing");
    }
    report(6, ok, detail);
  }

  // 7: transport oracle at two resolutions
  {
    const Json* t4 = find_check(verdicts, "transport_clipped_linear", "transport");
    Scenario s = load_scenario(standard / "transport_clipped_linear.yaml");
    s.grid.cells *= 2;
    RunOptions quiet;
    quiet.write_artifacts = false;
    ScenarioResult fine = run_scenario(s, quiet);
    const Json& t8 = fine.verdict["checks"]["transport"];
    bool ok = t4 && (*t4)["ok"].get<bool>() && fine.passed && t8["ok"].get<bool>();
    report(7, ok,
           "L1 error / (dx+eps): " + (t4 ? fmt((*t4)["ratio"].get<double>()) : std::string("missing")) + " at " +
               std::to_string(s.grid.cells / 2) + " cells, " + fmt(t8["ratio"].get<double>()) + " at " +
               std::to_string(s.grid.cells) + " cells, C = " + fmt(s.transport_constant));
  }

  // 8: finiteness predictions
  {
    auto atom0 = [&](const std::string& name) -> const Json* {
      const Json* b = find_check(verdicts, name, "bounds");
      return b ? &(*b)["atoms"][0] : nullptr;
    };
    const Json* ex = atom0("exp_sin_finite");
    const Json* exf = find_check(verdicts, "exp_sin_finite", "finiteness");
    const Json* at = atom0("arctan_h6");
    const Json* cf = atom0("constant_flux");
    bool ok = ex && exf && at && cf;
    std::string detail;
    if (ok) {
      double h5 = (*exf)["atoms"][0]["horizon"].get<double>();
      bool e1 = (*ex)["extinguished"].get<bool>() && (*ex)["t_hi"].get<double>() <= h5 &&
                (*ex)["regime"] == "H5";
      bool e2 = (*at)["extinguished"].get<bool>() &&
                (*at)["t_hi"].get<double>() <= (*at)["horizon"].get<double>() && (*at)["regime"] == "H6";
      bool e3 = !(*cf)["extinguished"].get<bool>();
      ok = e1 && e2 && e3;
      detail = "exp_sin t_hi " + fmt((*ex)["t_hi"].get<double>()) + " <= " + fmt(h5) + "; arctan t_hi " +
               fmt((*at)["t_hi"].get<double>()) + " <= " + fmt((*at)["horizon"].get<double>()) +
               "; constant flux " + (*cf)["outcome"].get<std::string>() + " (T=" +
               fmt((*cf)["horizon"].get<double>()) + ")";
    } else {
      detail = "missing verdicts";
    }
    report(8, ok, detail);
  }

  // 9: viscous layer
  {
    const Json* v = find_check(verdicts, "viscous_eps005", "viscous");
    bool ok = v && (*v)["ok"].get<bool>();
    report(9, ok,
           v ? "eps 0.05: |dxU-u| " + fmt((*v)["dx_U_minus_u"].get<double>()) + " <= " +
                   fmt((*v)["dx_U_tol"].get<double>()) + ", |Ut| " + fmt((*v)["Ut_sup"].get<double>()) + " <= " +
                   fmt((*v)["Ut_bound"].get<double>())
             : "missing verdict");
  }

  // 10: negative control
  {
    RunOptions nopt;
    nopt.output_root = scratch("negative");
    SuiteResult neg = run_suite(source_dir() / "scenarios" / "negative", nopt, default_workers());
    bool compat = false, entropy = false;
    for (const auto& r : neg.results)
      for (const auto& f : r.failed_checks) {
        compat = compat || f == "compatibility";
        entropy = entropy || f == "entropy";
      }
    report(10, !neg.passed && compat && entropy,
           std::string("negative suite ") + (neg.passed ? "passed" : "failed") + ", compatibility " +
               (compat ? "triggered" : "silent") + ", entropy " + (entropy ? "failed" : "passed"));
  }

  std::printf("standard suite: %s\n", suite.passed ? "all pass" : "FAILURES");
  return failures == 0 && suite.passed ? 0 : 1;
}
