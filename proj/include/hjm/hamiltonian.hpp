#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hjm {

using ScalarMap = std::function<double(double)>;

// (H^*)_+ = limsup at +inf, (H_*)_+ = liminf at +inf, and likewise at -inf.
struct Asymptotics {
  double hstar_plus = 0.0;
  double hstar_minus = 0.0;
  double hlow_plus = 0.0;
  double hlow_minus = 0.0;
};

struct TailLimits {
  std::optional<double> hplus;
  std::optional<double> hminus;
};

struct ProbeOptions {
  double probe_range = 1e6;
  double value_cap = 1e8;
  double limit_tol = 1e-6;
  double core_half_width = 64.0;
  double core_step = 1e-3;
};

class HamiltonianSpec {
 public:
  HamiltonianSpec();

  double operator()(double xi) const { return (*eval_)(xi); }
  const ScalarMap& map() const { return *eval_; }

  const std::string& name() const { return name_; }
  double sup_norm() const { return sup_norm_; }
  double lip_norm() const { return lip_norm_; }
  // inf H and sup H over the probed samples
  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }
  const Asymptotics& asymptotics() const { return asym_; }
  const TailLimits& limits() const { return limits_; }
  double probe_range() const { return probe_range_; }

 private:
  friend HamiltonianSpec make_hamiltonian(ScalarMap, std::string, const ProbeOptions&);

  std::shared_ptr<const ScalarMap> eval_;
  std::string name_;
  double sup_norm_ = 0.0;
  double lip_norm_ = 0.0;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
  Asymptotics asym_;
  TailLimits limits_;
  double probe_range_ = 0.0;
};

HamiltonianSpec make_hamiltonian(ScalarMap f, std::string name, const ProbeOptions& opt = {});

// Registry: sin, arctan, exp_sin, clipped_linear(lo,hi), clipped_quadratic(lo,hi),
// constant(c), table(path). A path ending in .csv is read as a table too.
HamiltonianSpec make_hamiltonian(const std::string& formula, const ProbeOptions& opt = {});
ScalarMap builtin_flux(const std::string& formula);
ScalarMap table_flux(const std::vector<double>& xi, const std::vector<double>& values);
ScalarMap load_table_flux(const std::string& csv_path);

// exp(-1/(1-x^2)) on (-1,1), unnormalized.
double bump(double x);
double bump_mass();
// Normalized integral of the bump mapped to [0,1]: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);
double smooth_step_d1(double s);
double smooth_step_d2(double s);

// [eta_eps * H](u) with composite Simpson on 129 nodes.
double mollified_value(const HamiltonianSpec& h, double eps, double u);
// Cutoff: 1 on |u| <= 1/eps, 0 on |u| >= 2/eps, |g'| <= 1.
double cutoff(double eps, double u);
HamiltonianSpec mollify(const HamiltonianSpec& h, double eps);

struct TailReport {
  bool h4 = false;
  bool eventually_constant = false;
  bool h5 = false;
  double c0 = 0.0;
  bool h6 = false;
  int h6_sign = 0;           // +1 when H > H^inf on the tail, -1 when H < H^inf
  double k_threshold = 0.0;  // kbar (plus side) or k_ul (minus side)
  std::vector<double> k;     // |k| values, increasing
  std::vector<double> modulus;
};

enum class Regime { H5, H6, H4, Conjecture, EventuallyConstant, NoLimit };
const char* to_string(Regime r);

struct HypothesisReport {
  TailReport plus;
  TailReport minus;
  // Regime relevant to an atom of the given sign: +inf tail for c > 0, -inf for c < 0.
  Regime regime_for(double mass) const;
};

// k_grid holds positive magnitudes; the minus side is probed at -k.
HypothesisReport classify_hypotheses(const HamiltonianSpec& h, const std::vector<double>& k_grid);
std::vector<double> default_k_grid();

}  // namespace hjm
