#pragma once

#include "dwarp/types.hpp"

namespace dwarp {

/// Staggered uniform grid on (0, R_max]: r_i = (i + 1/2) dr, R_max = N dr.
/// Integrals use the midpoint rule.
class RadialGrid {
 public:
  RadialGrid(int n, Real dr);

  int size() const { return n_; }
  Real dr() const { return dr_; }
  Real rmax() const { return n_ * dr_; }
  Real node(int i) const { return (i + 0.5) * dr_; }
  const VectorXr& nodes() const { return nodes_; }

  /// Same R_max with twice as many points.
  RadialGrid refined() const { return RadialGrid(2 * n_, dr_ / 2); }

  bool operator==(const RadialGrid& o) const { return n_ == o.n_ && dr_ == o.dr_; }

 private:
  int n_;
  Real dr_;
  VectorXr nodes_;
};

}  // namespace dwarp
