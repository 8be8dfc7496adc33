#include "doctest.h"

#include <cmath>

#include "dwarp/nonlinear.hpp"
#include "dwarp/manifold.hpp"

using namespace dwarp;

namespace {

const PartialWaveIndex kHalfModes[] = {{1, 1, -1}, {1, 1, 1}, {1, -1, -1}, {1, -1, 1}};

RadialSpinor profile(const RadialGrid& grid, Complex a, Complex b) {
  RadialSpinor w = RadialSpinor::zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const Real r = grid.node(i);
    w.plus[i] = a * r * std::exp(-(r - 1.5) * (r - 1.5));
    w.minus[i] = b * r * r * std::exp(-(r - 1.2) * (r - 1.2) / 0.5);
  }
  return w;
}

std::set<PartialWaveIndex> only(const PartialWaveIndex& idx) { return {idx}; }

}  // namespace

TEST_CASE("half-spin densities") {
  CHECK(halfspin_density(2, 0, DensityKind::Mass) == doctest::Approx(4 / (4 * kPi)));
  CHECK(halfspin_density(2, 0, DensityKind::Charge) == doctest::Approx(4 / (4 * kPi)));
  CHECK(halfspin_density({1, 1}, {1, 1}, DensityKind::Charge) == 0.0);
  CHECK(halfspin_density(2, 1, DensityKind::Charge) == doctest::Approx(3 / (4 * kPi)));
  CHECK(halfspin_density(2, 1, DensityKind::Mass) == doctest::Approx(5 / (4 * kPi)));
}

TEST_CASE("multiplier floor and powers") {
  CHECK(multiplier(0, 1) == doctest::Approx(std::pow(kDensityFloor, 0.5)));
  CHECK(multiplier(-4, 2) == 4);
  CHECK(multiplier(4, 3) == doctest::Approx(8));
}

TEST_CASE("Soler right-hand side") {
  const RadialGrid grid(50, 0.1);
  const RadialSpinor g = profile(grid, {1, 0.3}, {0.2, -0.4});
  const PartialWaveIndex idx{1, 1, 1};
  SUBCASE("equal components, charge: zero") {
    RadialSpinor same = g;
    same.minus = same.plus;
    const auto out = soler_rhs(idx, same, 2, DensityKind::Charge);
    CHECK(out.plus.cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("r = 2 multiplies by the density") {
    const auto out = soler_rhs(idx, g, 2, DensityKind::Charge);
    for (int i = 0; i < grid.size(); ++i) {
      const Real rho = std::abs(halfspin_density(g.plus[i], g.minus[i], DensityKind::Charge));
      CHECK(std::abs(out.plus[i] - rho * g.plus[i]) <= 1e-15);
      CHECK(std::abs(out.minus[i] - rho * g.minus[i]) <= 1e-15);
    }
  }
  SUBCASE("zero in, zero out") {
    const auto out = soler_rhs(idx, RadialSpinor::zero(grid.size()), 1.5, DensityKind::Mass);
    CHECK(out.plus.norm() == 0.0);
  }
  CHECK_THROWS_AS(soler_rhs({3, 1, 2}, g, 2, DensityKind::Mass), IndexError);
}

TEST_CASE("j = 1/2 densities are angle independent") {
  const SphereQuadrature quad(12);
  for (const auto& idx : kHalfModes) {
    const auto [e1, e2] = four_spinor_basis(idx);
    const Complex a(0.7, -0.4), b(-0.2, 1.1);
    const Vector4c u0 = a * e1(0.3, 0.1) + b * e2(0.3, 0.1);
    const Real mass0 = pointwise_density(u0, DensityKind::Mass);
    const Real charge0 = pointwise_density(u0, DensityKind::Charge);
    CHECK(charge0 == doctest::Approx(halfspin_density(a, b, DensityKind::Charge)).epsilon(1e-12));
    for (int q = 0; q < quad.size(); ++q) {
      const Vector4c u = a * e1(quad.theta(q), quad.phi(q)) + b * e2(quad.theta(q), quad.phi(q));
      CHECK(std::abs(pointwise_density(u, DensityKind::Mass) - mass0) <= 1e-12);
      CHECK(std::abs(pointwise_density(u, DensityKind::Charge) - charge0) <= 1e-12);
    }
  }
}

TEST_CASE("pointwise nonlinear term agrees with the half-spin fast path") {
  const RadialGrid grid(80, 0.05);
  const VectorXr phi = phi_on(hyperbolic_warp(), grid);
  const BasisTable table(enumerate_modes(5), 11);
  for (const auto& idx : kHalfModes)
    for (const auto& nl : {Nonlinearity{2, DensityKind::Charge}, Nonlinearity{1.3, DensityKind::Mass}}) {
      const RadialSpinor w = profile(grid, {1, 0.3}, {0.2, -0.4});
      const SpinorField f{{idx, w}};
      const SpinorField full = nonlinear_term(f, nl, table, phi);
      const RadialSpinor fast = halfspin_nonlinear_term(idx, w, nl, phi);
      CHECK((full.at(idx).plus - fast.plus).norm() <= 1e-12 * fast.plus.norm());
      CHECK((full.at(idx).minus - fast.minus).norm() <= 1e-12 * fast.minus.norm());
      CHECK(leakage(full, only(idx), grid) <= 1e-12 * std::sqrt(fast.stacked().squaredNorm() * grid.dr()));
    }
}

TEST_CASE("leakage") {
  const RadialGrid grid(80, 0.05);
  const VectorXr phi = phi_on(conical_warp(), grid);
  const BasisTable table(enumerate_modes(5), 11);
  const Nonlinearity nl{2, DensityKind::Charge};
  SUBCASE("j = 1/2 data stays in its mode") {
    const PartialWaveIndex idx{1, 1, 1};
    const SpinorField f{{idx, profile(grid, {3, 0}, {0, 1})}};
    const SpinorField stepped = nonlinear_phase_step(f, 0.5, nl, table, phi);
    CHECK(leakage(stepped, only(idx), grid) <= 1e-12);
    const auto rep = leakage(table.synthesize(stepped, grid.size()), only(idx), table, grid);
    CHECK(rep.leakage <= 1e-12);
  }
  SUBCASE("j = 3/2 data leaks") {
    const PartialWaveIndex idx{3, 1, 2};
    const SpinorField f{{idx, profile(grid, {3, 0}, {0, 1})}};
    const SpinorField stepped = nonlinear_phase_step(f, 0.5, nl, table, phi);
    CHECK(leakage(stepped, only(idx), grid) >= 1e-4);
  }
  SUBCASE("content beyond the table is flagged") {
    const BasisTable small(enumerate_modes(1), 11);
    const BasisTable big(enumerate_modes(5), 11);
    const PartialWaveIndex idx{5, 1, 3};
    const PointwiseField f = big.synthesize(SpinorField{{idx, profile(grid, 1, 1)}}, grid.size());
    const auto rep = leakage(f, only({1, 1, 1}), small, grid);
    CHECK(rep.truncated);
    CHECK(rep.truncation > 0.1);
  }
}
