#pragma once

#include "hjm/entropy_limit.hpp"
#include "hjm/measure.hpp"

namespace fixtures {

// unit atom at 0 on a coarse window, no regular part
inline hjm::RadonMeasure1D pinch(int cells, double mass = 1.0, double half_width = 2.5) {
  hjm::RadonMeasure1D m;
  m.grid = {-half_width, half_width, cells};
  m.density = Eigen::ArrayXd::Zero(cells);
  m.atoms = {{0.0, mass}};
  m.infinite_left = m.infinite_right = true;
  return m;
}

inline hjm::RefineSchedule quick_schedule() {
  hjm::RefineSchedule s;
  s.snapshots = 101;
  return s;
}

}  // namespace fixtures
