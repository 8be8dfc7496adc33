#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dwarp/types.hpp"

namespace dwarp {

using Vector2c = Eigen::Matrix<Complex, 2, 1>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

/// (j, m_j, k_j) stored with doubled half-integers: j = j2/2, m_j = m2/2.
struct PartialWaveIndex {
  int j2 = 1;
  int m2 = 1;
  int k = 1;

  /// Validating constructor; throws IndexError.
  static PartialWaveIndex make(int j2, int m2, int k);

  Real j() const { return 0.5 * j2; }
  Real mj() const { return 0.5 * m2; }
  Real lambda() const { return 0.5 * (j2 + 1); }
  /// Disjoint band label: (j = n-1/2, k = -n) and (j = n+1/2, k = n+1) share n.
  int band() const { return k > 0 ? k - 1 : -k; }
  std::string label() const;

  auto operator<=>(const PartialWaveIndex&) const = default;
};

/// Throws IndexError if the triple is not a valid partial wave.
void validate(const PartialWaveIndex& idx);

/// All (j, m_j, k_j) with j <= j2max/2, ordered by j, then m_j, then k.
std::vector<PartialWaveIndex> enumerate_modes(int j2max);

/// Modes of P_n: j in {n-1/2, n+1/2}, any m_j and k (blocks overlap).
std::vector<PartialWaveIndex> block_modes(int n);

/// Modes with band() == n.
std::vector<PartialWaveIndex> band_modes(int n);

/// Orthonormal Y_l^m on L^2(S^2) with the Condon-Shortley phase.
Complex spherical_harmonic(int l, int m, Real theta, Real phi);

/// d/dtheta of Y_l^m.
Complex spherical_harmonic_dtheta(int l, int m, Real theta, Real phi);

/// Standard two-component spinor harmonics built from Y_{j-1/2} and Y_{j+1/2}.
Vector2c e_plus_hat(int j2, int m2, Real theta, Real phi);
Vector2c e_minus_hat(int j2, int m2, Real theta, Real phi);

/// R1* Gamma^{+-}_{j,m_j} = (E^+ +- i E^-) / sqrt 2 in the fixed frame.
Vector2c gamma_eigenspinor(int j2, int m2, int branch, Real theta, Real phi);

/// Local frame rotation R1 = exp(i s2 theta/2) exp(i s3 phi/2).
Eigen::Matrix<Complex, 2, 2> frame_rotation(Real theta, Real phi);

enum class Branch { FMinus, FPlus, GPlus, GMinus };

/// One of the two C^4 angular functions spanning H_{j,m_j,k_j}. Values are
/// in the fixed frame (for j = 1/2 they reduce to the closed forms checked
/// in test_angular). The first element of a pair carries beta = +1, the second -1.
struct AngularBasisElement {
  PartialWaveIndex index;
  Branch branch;
  Vector4c operator()(Real theta, Real phi) const;
};

/// (F^-, F^+) for k > 0, (G^+, G^-) for k < 0.
std::pair<AngularBasisElement, AngularBasisElement> four_spinor_basis(const PartialWaveIndex& idx);

/// Gauss-Legendre in cos(theta) times uniform in phi, exact for spherical
/// polynomials of total degree <= degree.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(weights_.size()); }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  Real theta(int a) const { return theta_[a / n_phi_]; }
  Real phi(int a) const { return 2 * kPi * (a % n_phi_) / n_phi_; }
  const VectorXr& weights() const { return weights_; }

 private:
  int degree_;
  int n_theta_;
  int n_phi_;
  std::vector<Real> theta_;
  VectorXr weights_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre(int n);

enum class Representation { CurvedG, FlatG, W };

/// Two radial profiles of one partial wave: plus pairs with the first basis
/// element, minus with the second.
struct RadialSpinor {
  VectorXc plus;
  VectorXc minus;
  Representation rep = Representation::W;

  RadialSpinor() = default;
  RadialSpinor(VectorXc p, VectorXc m, Representation r = Representation::W)
      : plus(std::move(p)), minus(std::move(m)), rep(r) {}
  static RadialSpinor zero(int n, Representation r = Representation::W) {
    return {VectorXc::Zero(n), VectorXc::Zero(n), r};
  }
  int size() const { return static_cast<int>(plus.size()); }
  /// [plus; minus] stacked.
  VectorXc stacked() const;
  static RadialSpinor from_stacked(const VectorXc& v, Representation r = Representation::W);
};

/// Coefficient form of a C^4 field: a finite map from modes to radial data.
using SpinorField = std::map<PartialWaveIndex, RadialSpinor>;

/// Pointwise samples on grid x sphere nodes; row i is radius r_i, column
/// 4a + c is spinor component c at angular node a.
struct PointwiseField {
  MatrixXc values;
};

/// Cached evaluation of the basis elements of a mode set on a quadrature.
class BasisTable {
 public:
  BasisTable(std::vector<PartialWaveIndex> modes, int degree);

  const std::vector<PartialWaveIndex>& modes() const { return modes_; }
  const SphereQuadrature& quadrature() const { return quad_; }
  /// (2M) x (4Q); row 2i + b holds element b of mode i on all nodes.
  const MatrixXc& values() const { return values_; }
  int mode_position(const PartialWaveIndex& idx) const;

  /// Modes absent from the field are treated as zero; modes absent from
  /// the table throw IndexError.
  PointwiseField synthesize(const SpinorField& field, int n_radial) const;
  /// Projection onto every mode of the table.
  SpinorField project(const PointwiseField& f, Representation rep = Representation::W) const;
  /// Projection onto one mode.
  RadialSpinor project(const PointwiseField& f, const PartialWaveIndex& idx,
                       Representation rep = Representation::W) const;
  /// L^2(S^2) inner products of all basis elements, by quadrature.
  MatrixXc gram() const;

 private:
  std::vector<PartialWaveIndex> modes_;
  SphereQuadrature quad_;
  MatrixXc values_;
  MatrixXc weighted_adjoint_;  // (4Q) x (2M)
};

/// ||(-i D_S2 -+ lambda_j) Gamma^{+-}||_{L^2(S^2)} with pseudo-spectral
/// derivatives on a quadrature of the given degree (0 picks 2j + 5).
Real angular_dirac_eigencheck(int j2, int m2, int branch, int degree = 0);

/// Keeps the modes whose band label lies in [2^level, 2^(level+1)); level
/// -1 keeps band 0.
SpinorField band_projector(const SpinorField& field, int level);

/// Dyadic level holding a band label.
int band_level(int band);

}  // namespace dwarp
