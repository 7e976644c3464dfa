#include "hjm/flux_table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjm/error.hpp"

namespace hjm {

FluxTable::FluxTable(const ScalarMap& H, double lo, double hi, int nodes) : lo_(lo), hi_(hi) {
  if (!(hi > lo) || nodes < 2) throw Error(ErrorCode::ConfigError, "flux table needs hi > lo and two nodes");
  step_ = (hi - lo) / (nodes - 1);
  h_.resize(nodes);
  p_.resize(nodes);
  n_.resize(nodes);
  for (int i = 0; i < nodes; ++i) h_[i] = H(i == nodes - 1 ? hi : lo + step_ * i);
  p_[0] = h_[0];
  n_[0] = 0.0;
  for (int i = 1; i < nodes; ++i) {
    double d = h_[i] - h_[i - 1];
    p_[i] = p_[i - 1] + std::max(d, 0.0);
    n_[i] = n_[i - 1] + std::min(d, 0.0);
    lip_ = std::max(lip_, std::abs(d) / step_);
  }
  int nb = (nodes + block - 1) / block;
  block_min_.assign(nb, 0.0);
  block_max_.assign(nb, 0.0);
  for (int b = 0; b < nb; ++b) {
    auto first = h_.begin() + b * block;
    auto last = h_.begin() + std::min(nodes, (b + 1) * block);
    auto mm = std::minmax_element(first, last);
    block_min_[b] = *mm.first;
    block_max_[b] = *mm.second;
  }
}

FluxTable::Loc FluxTable::locate(double u) const {
  if (!(u >= lo_ && u <= hi_)) {
    std::ostringstream msg;
    msg << "state " << u << " left the flux table range [" << lo_ << ", " << hi_ << "]";
    throw Error(ErrorCode::BlowUp, msg.str());
  }
  double pos = (u - lo_) / step_;
  int i = std::min(static_cast<int>(h_.size()) - 2, static_cast<int>(pos));
  return {i, pos - i};
}

double FluxTable::value(double u) const { return lerp(h_, locate(u)); }
double FluxTable::positive_part(double u) const { return lerp(p_, locate(u)); }
double FluxTable::negative_part(double u) const { return lerp(n_, locate(u)); }

template <class Cmp>
double FluxTable::range_extreme(double a, double b, Cmp better) const {
  if (a > b) std::swap(a, b);
  Loc la = locate(a), lb = locate(b);
  double best = lerp(h_, la);
  double vb = lerp(h_, lb);
  if (better(vb, best)) best = vb;
  int first = la.i + 1, last = lb.i;  // interior nodes
  if (first > last) return best;
  const auto& blocks = better(0.0, 1.0) ? block_min_ : block_max_;
  int i = first;
  while (i <= last) {
    if (i % block == 0 && i + block - 1 <= last) {
      double v = blocks[i / block];
      if (better(v, best)) best = v;
      i += block;
    } else {
      if (better(h_[i], best)) best = h_[i];
      ++i;
    }
  }
  return best;
}

double FluxTable::range_min(double a, double b) const {
  return range_extreme(a, b, [](double x, double y) { return x < y; });
}

double FluxTable::range_max(double a, double b) const {
  return range_extreme(a, b, [](double x, double y) { return x > y; });
}

double FluxTable::godunov(double a, double b) const { return a <= b ? range_min(a, b) : range_max(b, a); }

}  // namespace hjm
