#include "hjm/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hjm/error.hpp"

namespace hjm {

namespace {

struct Extremum {
  double value;
  double at;
};

// Golden-section polish of a sampled extremum on [lo, hi].
double polish(const ScalarMap& f, double lo, double hi, bool maximize) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double x) { return maximize ? f(x) : -f(x); };
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = score(c), fd = score(d);
  for (int it = 0; it < 60 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = score(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = score(d);
    }
  }
  double best = std::max({score(lo), score(hi), fc, fd});
  return maximize ? best : -best;
}

struct SampleStats {
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  double max_at = 0.0, min_at = 0.0;
  double lip = 0.0;
  double lip_at = 0.0;
  double step = 0.0;

  void merge(const SampleStats& o) {
    if (o.max > max) { max = o.max; max_at = o.max_at; }
    if (o.min < min) { min = o.min; min_at = o.min_at; }
    if (o.lip > lip) { lip = o.lip; lip_at = o.lip_at; }
  }
};

SampleStats sample_uniform(const ScalarMap& f, double lo, double hi, double step) {
  SampleStats s;
  long n = std::max<long>(1, std::lround(std::ceil((hi - lo) / step)));
  double h = (hi - lo) / static_cast<double>(n);
  s.step = h;
  double prev = 0.0;
  for (long i = 0; i <= n; ++i) {
    double x = (i == n) ? hi : lo + h * static_cast<double>(i);
    double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::Unbounded, "non-finite flux value at " + std::to_string(x));
    if (v > s.max) { s.max = v; s.max_at = x; }
    if (v < s.min) { s.min = v; s.min_at = x; }
    if (i > 0) {
      double q = std::abs(v - prev) / h;
      if (q > s.lip) { s.lip = q; s.lip_at = x - 0.5 * h; }
    }
    prev = v;
  }
  return s;
}

void polish_extrema(const ScalarMap& f, SampleStats& s) {
  s.max = std::max(s.max, polish(f, s.max_at - s.step, s.max_at + s.step, true));
  s.min = std::min(s.min, polish(f, s.min_at - s.step, s.min_at + s.step, false));
}

// Limit of a sequence of decade extrema by Aitken's delta-squared when the
// last three terms are monotone and contracting.
double extrapolate(const std::vector<double>& seq) {
  std::size_t n = seq.size();
  if (n == 0) return 0.0;
  if (n < 3) return seq.back();
  double x0 = seq[n - 3], x1 = seq[n - 2], x2 = seq[n - 1];
  double d1 = x1 - x0, d2 = x2 - x1;
  if (std::abs(d2) <= 1e-14 * (1.0 + std::abs(x2))) return x2;
  if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) return x2 - d2 * d2 / (d2 - d1);
  return x2;
}

struct TailProbe {
  std::vector<double> decade_max, decade_min, decade_abs;
  SampleStats all;
};

// Decades [R/10^(i+1), R/10^i] above the dense core, each sampled by
// geometrically placed windows that include both decade endpoints.
TailProbe probe_tail(const ScalarMap& f, double dense_edge, double range, int sign) {
  TailProbe tp;
  std::vector<double> edges;
  for (double e = range; e >= dense_edge * (1.0 - 1e-12); e /= 10.0) edges.push_back(e);
  std::reverse(edges.begin(), edges.end());
  const int windows = 32;
  const double width = 10.0;
  const double step = 1e-2;
  for (std::size_t d = 0; d + 1 < edges.size(); ++d) {
    double lo = edges[d], hi = edges[d + 1];
    SampleStats dec;
    for (int w = 0; w < windows; ++w) {
      double c = lo * std::pow(hi / lo, static_cast<double>(w) / (windows - 1));
      double a = std::max(lo, c - 0.5 * width), b = std::min(hi, a + width);
      a = std::max(lo, b - width);
      ScalarMap g = [&](double x) { return f(sign * x); };
      SampleStats s = sample_uniform(g, a, b, step);
      polish_extrema(g, s);
      dec.merge(s);
    }
    tp.decade_max.push_back(dec.max);
    tp.decade_min.push_back(dec.min);
    tp.decade_abs.push_back(std::max(std::abs(dec.max), std::abs(dec.min)));
    tp.all.merge(dec);
  }
  return tp;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_args(const std::string& args, std::size_t expected, const std::string& formula) {
  std::vector<double> out;
  std::stringstream ss(args);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      std::string t = trim(tok);
      out.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "bad argument in flux '" + formula + "'");
    }
  }
  if (out.size() != expected) throw Error(ErrorCode::ConfigError, "wrong argument count in flux '" + formula + "'");
  return out;
}

}  // namespace

HamiltonianSpec::HamiltonianSpec()
    : eval_(std::make_shared<const ScalarMap>([](double) { return 0.0; })), name_("zero") {}

HamiltonianSpec make_hamiltonian(ScalarMap f, std::string name, const ProbeOptions& opt) {
  if (!(opt.probe_range > 0.0)) throw Error(ErrorCode::ConfigError, "probe_range must be positive");
  HamiltonianSpec h;
  h.eval_ = std::make_shared<const ScalarMap>(std::move(f));
  h.name_ = std::move(name);
  h.probe_range_ = opt.probe_range;
  const ScalarMap& H = *h.eval_;

  const double core = std::min(opt.probe_range, opt.core_half_width);
  double dense_edge = opt.probe_range;
  while (dense_edge / 10.0 >= core) dense_edge /= 10.0;
  if (dense_edge < core) dense_edge = core;
  // above 10^4 the dense band is probed with the coarser tail step
  double dense_step = dense_edge > 1e3 ? 1e-2 : opt.core_step;

  SampleStats body = sample_uniform(H, -dense_edge, dense_edge, dense_step);
  polish_extrema(H, body);

  // Difference quotients must settle under refinement near the steepest spot.
  {
    double c = body.lip_at;
    double w = 64.0 * dense_step;
    SampleStats l1 = sample_uniform(H, c - w, c + w, dense_step);
    SampleStats l2 = sample_uniform(H, c - w, c + w, dense_step / 10.0);
    SampleStats l3 = sample_uniform(H, l2.lip_at - w / 10.0, l2.lip_at + w / 10.0, dense_step / 100.0);
    if (l2.lip > 1.5 * l1.lip + 1e-12 && l3.lip > 1.5 * l2.lip + 1e-12)
      throw Error(ErrorCode::NonLipschitz, "difference quotients of " + h.name_ + " diverge near " +
                                               std::to_string(c));
    body.lip = std::max({body.lip, l2.lip, l3.lip});
  }

  TailProbe plus = probe_tail(H, dense_edge, opt.probe_range, +1);
  TailProbe minus = probe_tail(H, dense_edge, opt.probe_range, -1);

  SampleStats all = body;
  all.merge(plus.all);
  all.merge(minus.all);
  double sup = std::max(std::abs(all.max), std::abs(all.min));
  if (sup > opt.value_cap)
    throw Error(ErrorCode::Unbounded, "|" + h.name_ + "| exceeds cap " + std::to_string(opt.value_cap));
  for (const TailProbe* tp : {&plus, &minus}) {
    const auto& a = tp->decade_abs;
    std::size_t n = a.size();
    double core_sup = std::max(std::abs(body.max), std::abs(body.min));
    if (n >= 3 && a[n - 1] >= 2.0 * a[n - 2] && a[n - 2] >= 2.0 * a[n - 3] && a[n - 1] > 10.0 * core_sup + 1e-300)
      throw Error(ErrorCode::Unbounded, h.name_ + " grows without bound in the probed tail");
  }

  h.sup_norm_ = sup;
  h.lip_norm_ = all.lip;
  h.min_value_ = all.min;
  h.max_value_ = all.max;

  auto tail_pair = [&](const TailProbe& tp, double edge_value, double& hstar, double& hlow) {
    if (tp.decade_max.empty()) {
      hstar = hlow = edge_value;
      return;
    }
    hstar = extrapolate(tp.decade_max);
    hlow = extrapolate(tp.decade_min);
  };
  tail_pair(plus, H(opt.probe_range), h.asym_.hstar_plus, h.asym_.hlow_plus);
  tail_pair(minus, H(-opt.probe_range), h.asym_.hstar_minus, h.asym_.hlow_minus);

  auto settle = [&](double& hstar, double& hlow, std::optional<double>& lim) {
    if (hstar - hlow < opt.limit_tol) {
      double mid = 0.5 * (hstar + hlow);
      hstar = hlow = mid;
      lim = mid;
    }
  };
  settle(h.asym_.hstar_plus, h.asym_.hlow_plus, h.limits_.hplus);
  settle(h.asym_.hstar_minus, h.asym_.hlow_minus, h.limits_.hminus);
  return h;
}

ScalarMap table_flux(const std::vector<double>& xi, const std::vector<double>& values) {
  if (xi.size() < 2 || xi.size() != values.size())
    throw Error(ErrorCode::ConfigError, "flux table needs at least two (xi, H) rows");
  for (std::size_t i = 1; i < xi.size(); ++i)
    if (!(xi[i] > xi[i - 1])) throw Error(ErrorCode::ConfigError, "flux table abscissae must increase");
  auto x = std::make_shared<const std::vector<double>>(xi);
  auto v = std::make_shared<const std::vector<double>>(values);
  return [x, v](double s) {
    const auto& X = *x;
    const auto& V = *v;
    if (s <= X.front()) return V.front();
    if (s >= X.back()) return V.back();
    auto it = std::upper_bound(X.begin(), X.end(), s);
    std::size_t i = static_cast<std::size_t>(it - X.begin());
    double w = (s - X[i - 1]) / (X[i] - X[i - 1]);
    return (1.0 - w) * V[i - 1] + w * V[i];
  };
}

ScalarMap load_table_flux(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open flux table " + csv_path);
  std::vector<double> xi, vals;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ';', ',');
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ConfigError, "flux table row without comma: " + line);
    try {
      double a = std::stod(line.substr(0, comma));
      double b = std::stod(line.substr(comma + 1));
      xi.push_back(a);
      vals.push_back(b);
    } catch (const std::invalid_argument&) {
      if (xi.empty()) continue;  // header
      throw Error(ErrorCode::ConfigError, "bad flux table row: " + line);
    }
  }
  return table_flux(xi, vals);
}

ScalarMap builtin_flux(const std::string& formula_in) {
  std::string formula = trim(formula_in);
  std::string head = formula, args;
  auto p = formula.find('(');
  if (p != std::string::npos) {
    if (formula.back() != ')') throw Error(ErrorCode::ConfigError, "unbalanced flux formula '" + formula + "'");
    head = trim(formula.substr(0, p));
    args = formula.substr(p + 1, formula.size() - p - 2);
  }
  if (head == "sin" && args.empty()) return [](double s) { return std::sin(s); };
  if (head == "arctan" && args.empty()) return [](double s) { return std::atan(s); };
  if (head == "exp_sin" && args.empty()) return [](double s) { return std::exp(-std::abs(s)) * std::sin(s); };
  if (head == "zero" && args.empty()) return [](double) { return 0.0; };
  if (head == "constant") {
    double c = parse_args(args, 1, formula)[0];
    return [c](double) { return c; };
  }
  if (head == "clipped_linear") {
    auto a = parse_args(args, 2, formula);
    if (!(a[0] < a[1])) throw Error(ErrorCode::ConfigError, "clipped_linear needs lo < hi");
    return [lo = a[0], hi = a[1]](double s) { return std::clamp(s, lo, hi); };
  }
  if (head == "clipped_quadratic") {
    auto a = parse_args(args, 2, formula);
    if (!(a[0] < a[1])) throw Error(ErrorCode::ConfigError, "clipped_quadratic needs lo < hi");
    return [lo = a[0], hi = a[1]](double s) {
      double c = std::clamp(s, lo, hi);
      return 0.5 * c * c;
    };
  }
  if (head == "table") return load_table_flux(trim(args));
  if (formula.size() > 4 && formula.substr(formula.size() - 4) == ".csv") return load_table_flux(formula);
  throw Error(ErrorCode::ConfigError, "unknown flux '" + formula + "'");
}

HamiltonianSpec make_hamiltonian(const std::string& formula, const ProbeOptions& opt) {
  return make_hamiltonian(builtin_flux(formula), trim(formula), opt);
}

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

namespace {

struct StepTable {
  static constexpr int n = 8192;
  std::vector<double> value;  // R at s = i/n
  double mass = 0.0;          // integral of the bump over (-1,1)

  StepTable() : value(n + 1, 0.0) {
    // cumulative Simpson on a 4x finer grid
    const int sub = 4;
    const int m = n * sub;
    const double h = 2.0 / m;
    std::vector<double> cum(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
      double a = -1.0 + h * i, b = a + h;
      cum[i + 1] = cum[i] + h / 6.0 * (bump(a) + 4.0 * bump(0.5 * (a + b)) + bump(b));
    }
    mass = cum[m];
    for (int i = 0; i <= n; ++i) value[i] = cum[i * sub] / mass;
  }
};

const StepTable& step_table() {
  static const StepTable t;
  return t;
}

double bump_d1(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double q = 1.0 - x * x;
  return bump(x) * (-2.0 * x / (q * q));
}

}  // namespace

double bump_mass() { return step_table().mass; }

double smooth_step_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 2.0 * bump(2.0 * s - 1.0) / bump_mass();
}

double smooth_step_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 4.0 * bump_d1(2.0 * s - 1.0) / bump_mass();
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const StepTable& t = step_table();
  double pos = s * StepTable::n;
  int i = std::min(StepTable::n - 1, static_cast<int>(pos));
  double w = pos - i;
  double h = 1.0 / StepTable::n;
  double s0 = static_cast<double>(i) * h, s1 = s0 + h;
  // cubic Hermite with exact slopes
  double y0 = t.value[i], y1 = t.value[i + 1];
  double m0 = smooth_step_d1(s0) * h, m1 = smooth_step_d1(s1) * h;
  double w2 = w * w, w3 = w2 * w;
  return (2 * w3 - 3 * w2 + 1) * y0 + (w3 - 2 * w2 + w) * m0 + (-2 * w3 + 3 * w2) * y1 + (w3 - w2) * m1;
}

namespace {

// int eta(s) f(u - r s) ds over (-1,1), normalized, composite Simpson on 129 nodes.
template <class F>
double bump_average(const F& f, double u, double r) {
  const int intervals = 128;
  const double h = 2.0 / intervals;
  double acc = 0.0;
  for (int i = 1; i < intervals; ++i) {
    double s = -1.0 + h * i;
    acc += (i % 2 == 1 ? 4.0 : 2.0) * bump(s) * f(u - r * s);
  }
  return acc * h / 3.0 / bump_mass();
}

}  // namespace

double mollified_value(const HamiltonianSpec& h, double eps, double u) {
  const ScalarMap& H = h.map();
  return bump_average(H, u, eps);
}

double cutoff(double eps, double u) {
  double y = std::abs(u);
  double inner = 1.0 / eps, outer = 2.0 / eps;
  if (y <= inner) return 1.0;
  if (y >= outer) return 0.0;
  double r = 0.25 * (inner - 1.0);
  double a0 = inner + r, a1 = outer - r;
  auto ramp = [a0, a1](double z) { return std::clamp((z - a0) / (a1 - a0), 0.0, 1.0); };
  return std::clamp(1.0 - bump_average(ramp, y, r), 0.0, 1.0);
}

HamiltonianSpec mollify(const HamiltonianSpec& h, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::ConfigError, "mollification width must lie in (0,1)");
  double base = mollified_value(h, eps, 0.0);
  HamiltonianSpec src = h;
  ScalarMap f = [src, eps, base](double u) {
    double g = cutoff(eps, u);
    if (g == 0.0) return 0.0;
    return g * (mollified_value(src, eps, u) - base);
  };
  ProbeOptions opt;
  opt.probe_range = h.probe_range();
  std::ostringstream name;
  name << h.name() << "@eps=" << eps;
  return make_hamiltonian(std::move(f), name.str(), opt);
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::H5: return "H5";
    case Regime::H6: return "H6";
    case Regime::H4: return "H4";
    case Regime::Conjecture: return "conjecture";
    case Regime::EventuallyConstant: return "eventually-constant";
    case Regime::NoLimit: return "no-limit";
  }
  return "unknown";
}

Regime HypothesisReport::regime_for(double mass) const {
  const TailReport& t = mass > 0.0 ? plus : minus;
  if (t.eventually_constant) return Regime::EventuallyConstant;
  if (!t.h4) return Regime::NoLimit;
  if (t.h6) return Regime::H6;
  if (t.h5) return Regime::H5;
  return Regime::Conjecture;
}

std::vector<double> default_k_grid() {
  std::vector<double> k;
  for (double v = 0.5; v <= 40.0 + 1e-12; v += 0.25) k.push_back(v);
  return k;
}

namespace {

TailReport classify_side(const HamiltonianSpec& h, const std::vector<double>& k_grid, int sign,
                         std::optional<double> limit) {
  TailReport rep;
  rep.k = k_grid;
  const ScalarMap& H = h.map();
  const double R = h.probe_range();
  const double k0 = k_grid.front();
  const double kmax = k_grid.back();

  // Sample |H'| on [k0, R]: dense near the grid, windows beyond.
  std::vector<std::pair<double, double>> seg;  // (left end, quotient)
  auto add_run = [&](double a, double b, double step) {
    long n = std::max<long>(1, std::lround(std::ceil((b - a) / step)));
    double hstep = (b - a) / static_cast<double>(n);
    double prev = H(sign * a);
    for (long i = 1; i <= n; ++i) {
      double x = (i == n) ? b : a + hstep * static_cast<double>(i);
      double v = H(sign * x);
      seg.emplace_back(x - hstep, std::abs(v - prev) / hstep);
      prev = v;
    }
  };
  double dense_hi = std::min(R, std::max(2.0 * kmax, kmax + 20.0));
  add_run(k0, dense_hi, 1e-3);
  for (double c = dense_hi * 1.5; c < R; c *= 1.5) add_run(c, std::min(R, c + 10.0), 1e-2);

  std::sort(seg.begin(), seg.end());
  std::vector<double> suffix(seg.size() + 1, 0.0);
  for (std::size_t i = seg.size(); i-- > 0;) suffix[i] = std::max(suffix[i + 1], seg[i].second);
  rep.modulus.resize(k_grid.size());
  for (std::size_t j = 0; j < k_grid.size(); ++j) {
    auto it = std::lower_bound(seg.begin(), seg.end(), std::make_pair(k_grid[j], -1.0));
    rep.modulus[j] = suffix[static_cast<std::size_t>(it - seg.begin())];
    if (j > 0) rep.modulus[j] = std::min(rep.modulus[j], rep.modulus[j - 1]);
  }

  rep.eventually_constant = rep.modulus.back() == 0.0;
  rep.h4 = limit.has_value() && !rep.eventually_constant;
  if (!rep.h4) return rep;
  const double hinf = *limit;

  // (H_5): modulus decays and |H(k) - H^inf| / M_k stays away from zero on the tail.
  const double m_first = rep.modulus.front();
  const double m_last = rep.modulus.back();
  bool decays = m_last <= 1e-3 * m_first || m_last <= 1e-8;
  double c0 = 0.0;
  for (std::size_t j = k_grid.size() / 2; j < k_grid.size(); ++j) {
    double m = rep.modulus[j];
    if (m <= 0.0) continue;
    c0 = std::max(c0, std::abs(H(sign * k_grid[j]) - hinf) / m);
  }
  rep.c0 = c0;
  rep.h5 = decays && c0 > 1e-6;

  // (H_6): strict constant sign of H - H^inf on a trailing run covering half the grid.
  int last_sign = 0;
  std::size_t start = k_grid.size();
  for (std::size_t j = k_grid.size(); j-- > 0;) {
    double d = H(sign * k_grid[j]) - hinf;
    int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0 || (last_sign != 0 && s != last_sign)) break;
    last_sign = s;
    start = j;
  }
  if (last_sign != 0 && start <= k_grid.size() / 2) {
    rep.h6 = true;
    rep.h6_sign = last_sign;
    rep.k_threshold = sign * k_grid[start];
  }
  return rep;
}

}  // namespace

HypothesisReport classify_hypotheses(const HamiltonianSpec& h, const std::vector<double>& k_grid) {
  if (k_grid.size() < 4) throw Error(ErrorCode::InconclusiveTail, "k grid needs at least four points");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1])))
      throw Error(ErrorCode::ConfigError, "k grid must be positive and increasing");
  }
  if (h.probe_range() < 100.0 * k_grid.back())
    throw Error(ErrorCode::InconclusiveTail, "probe range too short for the k grid");
  HypothesisReport rep;
  rep.plus = classify_side(h, k_grid, +1, h.limits().hplus);
  rep.minus = classify_side(h, k_grid, -1, h.limits().hminus);
  return rep;
}

}  // namespace hjm
