#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dwarp/grid.hpp"
#include "dwarp/types.hpp"

namespace dwarp {

/// Warp profile phi of the metric dr^2 + phi(r)^2 dw^2, with analytic
/// first and second derivatives.
struct WarpFunction {
  std::string name;
  std::function<Real(Real)> phi;
  std::function<Real(Real)> dphi;
  std::function<Real(Real)> d2phi;
  // False for test-only profiles that violate the standing assumptions.
  bool admissible = true;
};

WarpFunction flat_warp();
WarpFunction hyperbolic_warp();
// phi = r + r^3 / (1 + r^2)
WarpFunction conical_warp();
// Unit 3-sphere profile; used only as a curvature oracle.
WarpFunction sine_warp();

/// phi(r) = sum_i c_i r^(2i+1).
WarpFunction polynomial_warp(std::string name, std::vector<Real> odd_coefficients);

std::vector<WarpFunction> builtin_warps();

/// Lookup by name among builtin_warps(); throws ConfigurationError.
WarpFunction warp_by_name(const std::string& name);

struct AssumptionReport {
  bool passed = true;
  Real phi_at_zero = 0.0;   // extrapolated
  Real dphi_at_zero = 0.0;  // extrapolated
  Real sup_log_derivative = 0.0;
  Real inf_phi_tail = 0.0;
  Real curvature_bound = 0.0;
  Real inf_phi_over_r = 0.0;
  std::vector<std::string> diagnostics;
};

AssumptionReport check_assumptions(const WarpFunction& w, const RadialGrid& grid, Real tol = 1e-3);

/// Below this radius the series limits of the weight and potential are used.
inline constexpr Real kSeriesRadius = 1e-6;

struct SigmaWeight {
  Real sigma;
  Real logderiv;  // sigma'/sigma = 1/r - phi'/phi
};

SigmaWeight sigma_weight(const WarpFunction& w, Real r);

/// k (1/phi(r) - 1/r).
Real potential(const WarpFunction& w, int k, Real r);

struct Curvatures {
  Real sec_tan;
  Real sec_rad;
  Real scalar;  // R_h = 2 (2 sec_rad + sec_tan)
};

Curvatures curvatures(const WarpFunction& w, Real r);

/// phi evaluated on the grid nodes; throws DomainError on non-finite or
/// non-positive values.
VectorXr phi_on(const WarpFunction& w, const RadialGrid& grid);

}  // namespace dwarp
