#pragma once

#include <vector>

#include "dwarp/angular.hpp"

namespace dwarp {

/// Samples of a single radial block, stacked [w_plus; w_minus].
struct Trajectory {
  std::vector<Real> times;
  std::vector<VectorXc> states;
};

/// Samples of a coefficient-form field (w-representation).
struct FieldTrajectory {
  std::vector<Real> times;
  std::vector<SpinorField> states;
};

}  // namespace dwarp
