#include "dwarp/nonlinear.hpp"

#include <cmath>

namespace dwarp {
namespace {

void require_halfspin(const PartialWaveIndex& idx) {
  validate(idx);
  if (idx.j2 != 1)
    throw IndexError("mode " + idx.label() + " is not j = 1/2; use the pointwise path");
}

VectorXr radial_multiplier(const RadialSpinor& w, const VectorXr& phi, const Nonlinearity& nl) {
  VectorXr c(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const Real inv = 1.0 / phi[i];
    c[i] = multiplier(halfspin_density(w.plus[i] * inv, w.minus[i] * inv, nl.kind), nl.power);
  }
  return c;
}

}  // namespace

std::string to_string(DensityKind k) { return k == DensityKind::Mass ? "mass" : "charge"; }

Real halfspin_density(Complex uplus, Complex uminus, DensityKind kind) {
  const Real a = std::norm(uplus);
  const Real b = std::norm(uminus);
  return (kind == DensityKind::Mass ? a + b : a - b) / (4 * kPi);
}

Real pointwise_density(const Vector4c& u, DensityKind kind) {
  const Real up = std::norm(u[0]) + std::norm(u[1]);
  const Real lo = std::norm(u[2]) + std::norm(u[3]);
  return kind == DensityKind::Mass ? up + lo : up - lo;
}

Real multiplier(Real rho, Real power) {
  const Real a = std::max(std::abs(rho), kDensityFloor);
  if (power == 2.0) return a;
  return std::pow(a, 0.5 * power);
}

RadialSpinor soler_rhs(const PartialWaveIndex& idx, const RadialSpinor& g, Real power, DensityKind kind) {
  require_halfspin(idx);
  RadialSpinor out = g;
  for (int i = 0; i < g.size(); ++i) {
    const Real c = multiplier(halfspin_density(g.plus[i], g.minus[i], kind), power);
    out.plus[i] *= c;
    out.minus[i] *= c;
  }
  return out;
}

MatrixXr pointwise_multiplier(const PointwiseField& w, const VectorXr& phi, const Nonlinearity& nl) {
  const Eigen::Index n = w.values.rows();
  const Eigen::Index q = w.values.cols() / 4;
  MatrixXr c(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real inv2 = 1.0 / (phi[i] * phi[i]);
    for (Eigen::Index a = 0; a < q; ++a) {
      const Vector4c u = w.values.block(i, 4 * a, 1, 4).transpose();
      c(i, a) = multiplier(pointwise_density(u, nl.kind) * inv2, nl.power);
    }
  }
  return c;
}

SpinorField nonlinear_phase_step(const SpinorField& w, Real dt, const Nonlinearity& nl,
                                 const BasisTable& table, const VectorXr& phi) {
  PointwiseField f = table.synthesize(w, static_cast<int>(phi.size()));
  const MatrixXr c = pointwise_multiplier(f, phi, nl);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index a = 0; a < c.cols(); ++a)
      f.values.block(i, 4 * a, 1, 4) *= std::polar(1.0, -dt * c(i, a));
  return table.project(f);
}

RadialSpinor halfspin_phase_step(const PartialWaveIndex& idx, const RadialSpinor& w, Real dt,
                                 const Nonlinearity& nl, const VectorXr& phi) {
  require_halfspin(idx);
  const VectorXr c = radial_multiplier(w, phi, nl);
  RadialSpinor out = w;
  for (int i = 0; i < w.size(); ++i) {
    const Complex rot = std::polar(1.0, -dt * c[i]);
    out.plus[i] *= rot;
    out.minus[i] *= rot;
  }
  return out;
}

SpinorField nonlinear_term(const SpinorField& w, const Nonlinearity& nl, const BasisTable& table,
                           const VectorXr& phi) {
  PointwiseField f = table.synthesize(w, static_cast<int>(phi.size()));
  const MatrixXr c = pointwise_multiplier(f, phi, nl);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index a = 0; a < c.cols(); ++a) f.values.block(i, 4 * a, 1, 4) *= c(i, a);
  return table.project(f);
}

RadialSpinor halfspin_nonlinear_term(const PartialWaveIndex& idx, const RadialSpinor& w,
                                     const Nonlinearity& nl, const VectorXr& phi) {
  require_halfspin(idx);
  const VectorXr c = radial_multiplier(w, phi, nl);
  return {c.cwiseProduct(w.plus), c.cwiseProduct(w.minus), w.rep};
}

Real leakage(const SpinorField& w, const std::set<PartialWaveIndex>& kept, const RadialGrid& grid) {
  Real acc = 0.0;
  for (const auto& [idx, rs] : w)
    if (!kept.count(idx)) acc += rs.plus.squaredNorm() + rs.minus.squaredNorm();
  return std::sqrt(acc * grid.dr());
}

LeakageReport leakage(const PointwiseField& f, const std::set<PartialWaveIndex>& kept, const BasisTable& table,
                      const RadialGrid& grid, Real truncation_tol) {
  const SpinorField proj = table.project(f);
  LeakageReport rep;
  rep.leakage = leakage(proj, kept, grid);
  const auto& quad = table.quadrature();
  Real total = 0.0;
  for (Eigen::Index i = 0; i < f.values.rows(); ++i)
    for (int a = 0; a < quad.size(); ++a) total += quad.weights()[a] * f.values.block(i, 4 * a, 1, 4).squaredNorm();
  total *= grid.dr();
  Real captured = 0.0;
  for (const auto& [idx, rs] : proj) captured += (rs.plus.squaredNorm() + rs.minus.squaredNorm()) * grid.dr();
  rep.truncation = std::sqrt(std::max(0.0, total - captured));
  rep.truncated = rep.truncation > truncation_tol * std::sqrt(total);
  return rep;
}

}  // namespace dwarp
