#pragma once

#include <memory>
#include <string>

#include <Eigen/Sparse>

#include "dwarp/angular.hpp"
#include "dwarp/grid.hpp"
#include "dwarp/manifold.hpp"

namespace dwarp {

using SparseXr = Eigen::SparseMatrix<Real>;

enum class OperatorForm { Curved, SigmaFlat, FlatReference };

std::string to_string(OperatorForm f);

/// Discrete radial Dirac block in the w-representation, acting on the
/// stacked vector [w_plus; w_minus] of length 2N:
///   [[ m, -D + K ], [ D + K, -m ]]
/// with D the skew central difference (zero outside the grid) and K the
/// diagonal potential k/phi (curved and sigma-flat) or k/r (reference).
/// The matrix is real symmetric, hence Hermitian.
struct RadialOperator {
  SparseXr matrix;
  VectorXr coupling;  // diagonal of K
  PartialWaveIndex index;
  Real mass = 0.0;
  std::string warp;
  OperatorForm form = OperatorForm::Curved;
  RadialGrid grid{1, 1.0};

  int dim() const { return static_cast<int>(matrix.rows()); }
  VectorXc apply(const VectorXc& psi) const { return matrix * psi; }
  MatrixXr dense() const { return MatrixXr(matrix); }
};

/// Skew-symmetric central difference with w_{-1} = w_N = 0.
SparseXr central_difference(const RadialGrid& grid);

/// h on L^2(phi^2 dr) through w = phi g.
RadialOperator build_curved(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                            const RadialGrid& grid);
/// h^sigma on L^2(r^2 dr) through w = r g. In the w-representation this is
/// the same matrix as build_curved.
RadialOperator build_sigma_flat(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                                const RadialGrid& grid);
/// Flat Dirac block with potential k/r.
RadialOperator build_flat_reference(const PartialWaveIndex& idx, Real mass, const RadialGrid& grid);

/// Off-diagonal diagonal potential k (1/phi - 1/r) on both off-blocks, i.e.
/// build_sigma_flat - build_flat_reference.
SparseXr potential_matrix(const PartialWaveIndex& idx, const WarpFunction& warp, const RadialGrid& grid);

/// ||sigma^{-1} h_curved(sigma g) - h^sigma g||_{L^2(r^2 dr)}, evaluated with
/// a direct discretization in the g-representation (central differences on
/// g, explicit phi'/phi and 1/r terms). g holds values of both components on
/// the grid nodes and should vanish near both ends.
Real conjugation_residual(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                          const RadialGrid& grid, const RadialSpinor& g);

/// Spectral resolution of Lambda_r^2 = 1 - d_r^2 + phi''/phi in the
/// w-representation (equivalently 1 - phi^{-2} d_r phi^2 d_r on g), with
/// odd reflection at the origin and w = 0 past R_max.
class RadialSobolev {
 public:
  RadialSobolev(const WarpFunction& warp, const RadialGrid& grid);

  const VectorXr& eigenvalues() const { return evals_; }
  const MatrixXr& eigenvectors() const { return evecs_; }
  /// Lambda^s w.
  VectorXc apply(Real s, const VectorXc& w) const;
  /// ||Lambda^s w||_{l^2 dr}.
  Real norm(Real s, const VectorXc& w) const;
  /// The tridiagonal Lambda^2 as a dense matrix (tests).
  MatrixXr squared() const;

 private:
  RadialGrid grid_;
  VectorXr diag_;
  VectorXr sub_;
  VectorXr evals_;
  MatrixXr evecs_;
};

/// Shared, thread-safe cache keyed by (warp name, N, dr).
std::shared_ptr<const RadialSobolev> sobolev_operator(const WarpFunction& warp, const RadialGrid& grid);

/// Lambda_r^s f with f in the w-representation.
VectorXc sobolev_apply(const WarpFunction& warp, const RadialGrid& grid, Real s, const VectorXc& f);

}  // namespace dwarp
