#pragma once

#include <array>
#include <string>
#include <vector>

#include "dwarp/types.hpp"

namespace dwarp {

struct WarpFunction;

using SpinMatrix = Eigen::Matrix<Complex, 4, 4>;
using PauliMatrix = Eigen::Matrix<Complex, 2, 2>;

/// The fixed Dirac/Pauli algebra in the standard (Dirac) representation.
/// All entries are 0, +-1 or +-i, so products are exact in floating point.
struct StandardMatrices {
  std::array<PauliMatrix, 4> sigma;  // sigma_0 .. sigma_3
  std::array<SpinMatrix, 4> gamma;   // gamma^0 .. gamma^3
  std::array<SpinMatrix, 3> alpha;   // alpha^1 .. alpha^3 (alpha[0] is alpha^1)
  SpinMatrix beta;                   // == gamma^0
};

const StandardMatrices& standard_matrices();

/// Minkowski metric diag(1,-1,-1,-1).
Real minkowski(int mu, int nu);

template <typename A, typename B>
auto anticommutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a * b + b * a).eval();
}

/// Block-diagonal unitary U = diag(V, V) realising the cyclic relabelling
///   U alpha_1 U* = alpha_3,  U alpha_2 U* = alpha_1,  U alpha_3 U* = alpha_2,
///   U beta U* = beta.
/// Found by exhaustive search over 2x2 matrices with entries in
/// {(+-1 +- i)/2}; all entries are dyadic so conjugation stays exact.
const SpinMatrix& permutation_rotation();

/// Every candidate V enumerated by the search (in enumeration order).
std::vector<PauliMatrix> permutation_rotation_candidates();

/// Coefficient matrices of the first-order operator H_phi at a point,
///   H = C_r d_r + C_theta d_theta + C_phi d_phi + C_0.
struct DiracSymbol {
  SpinMatrix d_r;
  SpinMatrix d_theta;
  SpinMatrix d_phi;
  SpinMatrix zeroth;
};

DiracSymbol dirac_symbol(const WarpFunction& warp, Real mass, Real r, Real theta);

DiracSymbol conjugate(const DiracSymbol& symbol, const SpinMatrix& u);

struct BlockCheck {
  bool passed = true;
  Real max_deviation = 0.0;
  std::vector<std::string> failures;
};

/// After conjugation by permutation_rotation(), checks that H_phi reads
/// [[m, A], [A, -m]] with A = -i s3 (d_r + phi'/phi) + (1/phi)(-i s1 (d_theta
/// + cot/2) - i s2/sin d_phi) at the given sample points.
BlockCheck check_block_structure(const WarpFunction& warp, Real mass,
                                 const std::vector<std::array<Real, 3>>& samples,
                                 Real tol = 1e-14);

}  // namespace dwarp
