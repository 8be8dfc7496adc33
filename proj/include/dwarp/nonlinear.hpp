#pragma once

#include <set>
#include <string>

#include "dwarp/angular.hpp"
#include "dwarp/grid.hpp"

namespace dwarp {

enum class DensityKind { Mass, Charge };

std::string to_string(DensityKind k);

/// Multiplier |rho|^{power/2} with rho = <u,u> (mass) or <beta u,u> (charge).
struct Nonlinearity {
  Real power = 2.0;
  DensityKind kind = DensityKind::Charge;
};

/// Floor applied to |rho| before fractional powers.
inline constexpr Real kDensityFloor = 1e-30;

/// (|u+|^2 +- |u-|^2) / (4 pi) for the j = 1/2 coordinates.
Real halfspin_density(Complex uplus, Complex uminus, DensityKind kind);

/// Pointwise density of a C^4 value.
Real pointwise_density(const Vector4c& u, DensityKind kind);

/// |rho|^{power/2} with the floor.
Real multiplier(Real rho, Real power);

/// |density|^{r/2} g for a j = 1/2 mode; g holds field values (not w).
/// Throws IndexError for j != 1/2.
RadialSpinor soler_rhs(const PartialWaveIndex& idx, const RadialSpinor& g, Real power, DensityKind kind);

/// Pointwise multiplier c(r, w) for samples of w-representation data;
/// field values are w / phi.
MatrixXr pointwise_multiplier(const PointwiseField& w_values, const VectorXr& phi, const Nonlinearity& nl);

/// Exact flow of i u_t = c(x) u over dt: u <- exp(-i dt c) u, computed
/// pointwise and projected back onto the table's modes.
SpinorField nonlinear_phase_step(const SpinorField& w, Real dt, const Nonlinearity& nl,
                                 const BasisTable& table, const VectorXr& phi);

/// Same flow for a single j = 1/2 mode, where c depends on r only.
RadialSpinor halfspin_phase_step(const PartialWaveIndex& idx, const RadialSpinor& w, Real dt,
                                 const Nonlinearity& nl, const VectorXr& phi);

/// N(u) = c u in coefficient form (w-representation), through the table.
SpinorField nonlinear_term(const SpinorField& w, const Nonlinearity& nl, const BasisTable& table,
                           const VectorXr& phi);

/// N(u) for a single j = 1/2 mode.
RadialSpinor halfspin_nonlinear_term(const PartialWaveIndex& idx, const RadialSpinor& w,
                                     const Nonlinearity& nl, const VectorXr& phi);

struct LeakageReport {
  Real leakage = 0.0;     // L^2(M) norm outside the kept modes
  Real truncation = 0.0;  // L^2(M) norm beyond the table (content above J_max)
  bool truncated = false;
};

/// Norm of the part of a coefficient field outside `kept`.
Real leakage(const SpinorField& w, const std::set<PartialWaveIndex>& kept, const RadialGrid& grid);

/// Projects pointwise samples (w-representation) over every mode in the
/// table and reports the part outside `kept`, plus what the table cannot
/// represent. `truncation_tol` is relative to the field norm.
LeakageReport leakage(const PointwiseField& w_values, const std::set<PartialWaveIndex>& kept,
                      const BasisTable& table, const RadialGrid& grid, Real truncation_tol = 1e-10);

}  // namespace dwarp
