#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "dwarp/nonlinear.hpp"
#include "dwarp/norms.hpp"
#include "dwarp/radial_ops.hpp"
#include "dwarp/trajectory.hpp"

namespace dwarp {

enum class Scheme { CrankNicolson, Spectral };

std::string to_string(Scheme s);
/// "crank-nicolson" or "spectral-exponential"; throws ConfigurationError.
Scheme scheme_from_string(const std::string& s);

struct EvolutionConfig {
  Real dt = 0.01;
  Real T = 1.0;
  int stride = 1;
  Scheme scheme = Scheme::CrankNicolson;

  /// Throws ConfigurationError.
  void validate() const;
  /// round(T / dt); T must be a whole number of steps to 1e-9.
  int steps() const;
};

/// Dense eigen-decomposition H = Q diag(E) Q^T of a real symmetric block.
struct SpectralDecomposition {
  VectorXr energies;
  MatrixXr vectors;

  explicit SpectralDecomposition(const RadialOperator& h);
  /// exp(-i t H) psi.
  VectorXc propagate(const VectorXc& psi, Real t) const;
};

/// One-step propagator of i psi_t = H psi. Crank-Nicolson solves
/// (I + i dt/2 H) psi' = (I - i dt/2 H) psi; the spectral scheme applies
/// exp(-i dt H).
class Propagator {
 public:
  Propagator(const RadialOperator& h, Real dt, Scheme scheme);
  Propagator(std::shared_ptr<const SpectralDecomposition> eig, Real dt);

  VectorXc step(const VectorXc& psi) const;
  Real dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }

 private:
  Scheme scheme_;
  Real dt_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>> lu_;
  Eigen::SparseMatrix<Complex> rhs_;
  std::shared_ptr<const SpectralDecomposition> eig_;
  VectorXc phases_;
};

/// One step; builds the propagator on the fly.
VectorXc step(const RadialOperator& h, const VectorXc& psi, Real dt, Scheme scheme = Scheme::CrankNicolson);

Trajectory evolve_linear(const RadialOperator& h, const VectorXc& psi0, const EvolutionConfig& cfg);

/// Evolves every mode of a field with its own block (blocks depend on k
/// only, so propagators are shared across m_j).
FieldTrajectory evolve_linear(const SpinorField& u0, Real mass, const WarpFunction& warp,
                              const RadialGrid& grid, const EvolutionConfig& cfg);

/// Per-sample ||u(t) - e^{-itH0}u0 + i int_0^t e^{-i(t-s)H0} V u(s) ds||_{L^2}
/// with the trapezoid rule on the (uniform) sample times.
std::vector<Real> duhamel_residual(const RadialOperator& h0, const SparseXr& v, const Trajectory& traj);

struct NonlinearOptions {
  int j2max = 0;           // modes kept on the pointwise path (0: max j2 of the data + 4)
  int degree = 0;          // sphere quadrature degree (0: j2max + 6)
  bool allow_fast_path = true;  // single j = 1/2 mode: radial-only multiplier
};

/// Strang splitting: half linear step, exact nonlinear phase, half linear
/// step. Throws BlowUpError on non-finite states.
FieldTrajectory evolve_nonlinear(const SpinorField& u0, Real mass, const WarpFunction& warp,
                                 const RadialGrid& grid, const EvolutionConfig& cfg, const Nonlinearity& nl,
                                 const NonlinearOptions& opt = {});

struct PicardOptions {
  Real dt = 0.01;
  Scheme scheme = Scheme::Spectral;
  Real p = 4;  // Strichartz part of the iteration metric
  Real q = 4;
  Family family = Family::Massless;
  int max_iterations = 60;
  bool throw_on_failure = true;  // false: return with converged = false
  NonlinearOptions nonlinear;
};

struct PicardResult {
  FieldTrajectory solution;       // every time step
  std::vector<Real> distances;    // d_k = |u_k - u_{k-1}|_X
  std::vector<Real> ratios;       // d_k / d_{k-1}
  int iterations = 0;
  bool converged = false;
};

/// Fixed point of u -> S(t)u0 - i int_0^t S(t-s) N(u(s)) ds on a uniform
/// time grid (trapezoid in s). Stops once d_k < tol |u0|; throws
/// NoContractionError after three consecutive ratios >= 1 or when the
/// iteration budget runs out.
PicardResult picard_solve(const SpinorField& u0, Real mass, const WarpFunction& warp, const RadialGrid& grid,
                          const Nonlinearity& nl, Real T, Real tol, const PicardOptions& opt = {});

/// Largest absolute L^2 distance between two field trajectories sampled at
/// the same times.
Real max_distance(const FieldTrajectory& a, const FieldTrajectory& b, const RadialGrid& grid);

}  // namespace dwarp
