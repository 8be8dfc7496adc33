#pragma once

#include <limits>
#include <string>

#include "dwarp/angular.hpp"
#include "dwarp/grid.hpp"
#include "dwarp/manifold.hpp"
#include "dwarp/trajectory.hpp"

namespace dwarp {

inline constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

enum class Family { Massless, Massive };
enum class Measure { Manifold, Euclidean };

std::string to_string(Family f);

struct Admissibility {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Massless: 2/p + 2/q = 1 with 2 < p <= inf. Massive: 2/p + 3/q = 3/2 with
/// 2 <= p <= inf and 2 <= q <= 6. The scaling line is checked to 1e-12.
Admissibility validate_admissible(Real p, Real q, Family family);

struct MixedNormSpec {
  Real p = 4;
  Real q = 4;
  Real weight_exponent = 0.5;  // power of phi/r
  Family family = Family::Massless;
  Real T = 1;

  /// Weight exponent 1 - 2/q; throws ConfigurationError if inadmissible.
  static MixedNormSpec make(Real p, Real q, Family family, Real T);
};

/// Radial measure weights (times dr) on the grid: phi^2 dr or r^2 dr.
VectorXr radial_measure(Measure m, const WarpFunction& warp, const RadialGrid& grid);

/// (int |f|^q d(measure) dw)^{1/q} for pointwise values f (not w).
Real lq_norm(const PointwiseField& values, Real q, const VectorXr& radial_measure,
             const SphereQuadrature& quad);

/// Field values of a w-representation field: g = w/phi on M, w/r on R^3,
/// optionally multiplied by a radial weight.
PointwiseField field_values(const SpinorField& w, Measure m, const WarpFunction& warp,
                            const RadialGrid& grid, const BasisTable& table,
                            const VectorXr* radial_multiplier = nullptr);

/// L^q norm of a w-representation field through the basis table.
Real lq_norm(const SpinorField& w, Real q, Measure m, const WarpFunction& warp, const RadialGrid& grid,
             const BasisTable& table, const VectorXr* radial_multiplier = nullptr);

/// Angular profiles |e1|^2 and |e2|^2 of a mode; both depend on theta only.
struct ModeProfile {
  std::vector<Real> cos_theta_weights;  // Gauss-Legendre weights times 2 pi
  std::vector<Real> first;
  std::vector<Real> second;
};

ModeProfile mode_profile(const PartialWaveIndex& idx, int n_theta = 48);

/// Fast L^q norm of a single-mode field given its values (g, not w), using
/// |u|^2 = |g+|^2 |e1|^2 + |g-|^2 |e2|^2.
Real lq_norm_single_mode(const ModeProfile& prof, const VectorXc& gplus, const VectorXc& gminus,
                         Real q, const VectorXr& radial_measure);

struct StrichartzOptions {
  int n_theta = 48;     // single-mode theta quadrature
  int extra_degree = 8; // multi-mode sphere quadrature: 2 j_max + extra
};

/// ||(phi/r)^e u||_{L^p_t L^q(M)}: trapezoid in time for p < inf, max for
/// p = inf. States are in the w-representation.
Real strichartz_functional(const FieldTrajectory& traj, const MixedNormSpec& spec,
                           const WarpFunction& warp, const RadialGrid& grid,
                           const StrichartzOptions& opt = {});

/// L^p over the sample times of per-sample values.
Real time_norm(const std::vector<Real>& times, const std::vector<Real>& values, Real p);

/// ||Lambda_r^s f||_{L^2(phi^2 dr)} for f in the w-representation.
Real hs_norm(const VectorXc& w, Real s, const WarpFunction& warp, const RadialGrid& grid);
Real hs_norm(const RadialSpinor& w, Real s, const WarpFunction& warp, const RadialGrid& grid);

/// [sum over modes and both components of <k>^{2b} ||f||^2 + ||f||_{H^a}^2]^{1/2}.
Real hab_norm(const SpinorField& w, Real a, Real b, const WarpFunction& warp, const RadialGrid& grid);

/// Plain L^2 norm (coefficient l^2 with dr).
Real l2_norm(const SpinorField& w, const RadialGrid& grid);
Real l2_norm(const VectorXc& stacked, const RadialGrid& grid);

}  // namespace dwarp
