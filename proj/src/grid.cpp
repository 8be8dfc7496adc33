#include "dwarp/grid.hpp"

namespace dwarp {

RadialGrid::RadialGrid(int n, Real dr) : n_(n), dr_(dr), nodes_(n > 0 ? n : 0) {
  if (n <= 0) throw ConfigurationError("radial grid needs N > 0");
  if (!(dr > 0)) throw ConfigurationError("radial grid needs dr > 0");
  for (int i = 0; i < n; ++i) nodes_[i] = node(i);
}

}  // namespace dwarp
