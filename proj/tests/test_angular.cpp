#include "doctest.h"

#include <cmath>
#include <random>

#include "dwarp/angular.hpp"

using namespace dwarp;

namespace {

const Real kInvTwoSqrtPi = 1.0 / (2.0 * std::sqrt(kPi));

Eigen::Matrix<Complex, 2, 2> sigma3() {
  Eigen::Matrix<Complex, 2, 2> s;
  s << 1, 0, 0, -1;
  return s;
}

}  // namespace

TEST_CASE("partial wave index validation") {
  CHECK_NOTHROW(PartialWaveIndex::make(1, 1, 1));
  CHECK_NOTHROW(PartialWaveIndex::make(3, -3, -2));
  CHECK_THROWS_AS(PartialWaveIndex::make(2, 1, 1), IndexError);
  CHECK_THROWS_AS(PartialWaveIndex::make(1, 3, 1), IndexError);
  CHECK_THROWS_AS(PartialWaveIndex::make(1, 1, 2), IndexError);
  CHECK_THROWS_AS(PartialWaveIndex::make(1, 1, 0), IndexError);
  CHECK(enumerate_modes(5).size() == 24);
  CHECK(PartialWaveIndex::make(3, 1, -2).label() == "j=3/2,m=1/2,k=-2");
}

TEST_CASE("band labels follow the disjoint pairing") {
  CHECK(PartialWaveIndex{1, 1, 1}.band() == 0);
  CHECK(PartialWaveIndex{1, 1, -1}.band() == 1);
  CHECK(PartialWaveIndex{3, 1, 2}.band() == 1);
  CHECK(PartialWaveIndex{3, 1, -2}.band() == 2);
  for (int n = 0; n < 6; ++n)
    for (const auto& idx : band_modes(n)) CHECK(idx.band() == n);
  CHECK(band_level(0) == -1);
  CHECK(band_level(1) == 0);
  CHECK(band_level(3) == 1);
  CHECK(band_level(4) == 2);
  CHECK(band_level(7) == 2);
}

TEST_CASE("spherical harmonics") {
  CHECK(spherical_harmonic(0, 0, 0.3, 1.0).real() == doctest::Approx(kInvTwoSqrtPi));
  for (Real th : {0.0, 0.4, 2.0})
    CHECK(spherical_harmonic(1, 0, th, 0.7).real() ==
          doctest::Approx(std::sqrt(3.0 / (4 * kPi)) * std::cos(th)));
  // Reference values from an independent implementation.
  const Complex a = spherical_harmonic(3, -2, 0.7, 1.3);
  CHECK(a.real() == doctest::Approx(-0.2779753529533783).epsilon(1e-13));
  CHECK(a.imag() == doctest::Approx(-0.1672290308591826).epsilon(1e-13));
  const Complex b = spherical_harmonic(5, 4, 2.1, 0.4);
  CHECK(b.real() == doctest::Approx(0.01201271118239368).epsilon(1e-12));
  CHECK(b.imag() == doctest::Approx(-0.411225528794087).epsilon(1e-13));
  CHECK(spherical_harmonic(2, 1, 1.0, 0.0).real() == doctest::Approx(-0.3512381379488299).epsilon(1e-13));
  CHECK_THROWS_AS(spherical_harmonic(1, 2, 0.1, 0.1), IndexError);
}

TEST_CASE("quadrature integrates harmonic products") {
  const SphereQuadrature q(12);
  CHECK(q.weights().sum() == doctest::Approx(4 * kPi).epsilon(1e-14));
  for (int l1 = 0; l1 <= 6; ++l1)
    for (int m1 = -l1; m1 <= l1; ++m1)
      for (int l2 = 0; l2 <= 6; ++l2)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          Complex acc = 0;
          for (int a = 0; a < q.size(); ++a)
            acc += q.weights()[a] * std::conj(spherical_harmonic(l1, m1, q.theta(a), q.phi(a))) *
                   spherical_harmonic(l2, m2, q.theta(a), q.phi(a));
          const Real expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
          CHECK(std::abs(acc - expect) < 1e-12);
        }
}

TEST_CASE("theta derivative matches finite differences") {
  const Real h = 1e-5;
  for (int l = 0; l <= 5; ++l)
    for (int m = -l; m <= l; ++m)
      for (Real th : {0.4, 1.3, 2.6}) {
        const Complex fd = (spherical_harmonic(l, m, th + h, 0.9) - spherical_harmonic(l, m, th - h, 0.9)) / (2 * h);
        CHECK(std::abs(fd - spherical_harmonic_dtheta(l, m, th, 0.9)) < 1e-8);
      }
}

TEST_CASE("gamma eigenspinors") {
  const SphereQuadrature q(10);
  auto inner = [&](int j2, int m2, int b1, int b2) {
    Complex acc = 0;
    for (int a = 0; a < q.size(); ++a)
      acc += q.weights()[a] * gamma_eigenspinor(j2, m2, b1, q.theta(a), q.phi(a))
                                  .dot(gamma_eigenspinor(j2, m2, b2, q.theta(a), q.phi(a)));
    return acc;
  };
  CHECK(std::abs(inner(1, 1, 1, -1)) < 1e-13);
  CHECK(std::abs(inner(1, 1, 1, 1) - 1.0) < 1e-13);
  CHECK(std::abs(inner(3, -1, -1, -1) - 1.0) < 1e-13);
  // The upper component of E^+_{1/2,1/2} is exactly Y_00.
  CHECK(e_plus_hat(1, 1, 0.8, 0.1)[0].real() == doctest::Approx(kInvTwoSqrtPi));
  CHECK(e_plus_hat(1, 1, 0.8, 0.1)[1] == Complex(0));
}

TEST_CASE("-i sigma3 exchanges the two branches pointwise") {
  for (int j2 : {1, 3, 5, 7})
    for (int m2 = -j2; m2 <= j2; m2 += 2)
      for (Real th : {0.3, 1.7})
        for (Real ph : {0.0, 2.2}) {
          const auto r1 = frame_rotation(th, ph);
          const Vector2c gp = r1 * gamma_eigenspinor(j2, m2, 1, th, ph);
          const Vector2c gm = r1 * gamma_eigenspinor(j2, m2, -1, th, ph);
          CHECK((-kI * sigma3() * gp - gm).norm() < 1e-12);
          CHECK((-kI * sigma3() * gm + gp).norm() < 1e-12);
        }
}

TEST_CASE("four spinors reproduce the closed j = 1/2 forms") {
  const Real c = kInvTwoSqrtPi;
  for (Real th : {0.0, 0.6, 2.0})
    for (Real ph : {0.0, 1.1}) {
      const Real ct = std::cos(th);
      const Real st = std::sin(th);
      const Complex e = std::polar(1.0, ph);
      {
        const auto [p, m] = four_spinor_basis(PartialWaveIndex::make(1, 1, 1));
        Vector4c ep;
        ep << kI * c * ct, kI * c * e * st, 0, 0;
        Vector4c em;
        em << 0, 0, c, 0;
        CHECK((p(th, ph) - ep).norm() < 1e-14);
        CHECK((m(th, ph) - em).norm() < 1e-14);
      }
      {
        const auto [p, m] = four_spinor_basis(PartialWaveIndex::make(1, 1, -1));
        Vector4c ep;
        ep << kI * c, 0, 0, 0;
        Vector4c em;
        em << 0, 0, c * ct, c * e * st;
        CHECK((p(th, ph) - ep).norm() < 1e-14);
        CHECK((m(th, ph) - em).norm() < 1e-14);
      }
      {
        const auto [p, m] = four_spinor_basis(PartialWaveIndex::make(1, -1, 1));
        Vector4c ep;
        ep << kI * c * std::conj(e) * st, -kI * c * ct, 0, 0;
        Vector4c em;
        em << 0, 0, 0, c;
        CHECK((p(th, ph) - ep).norm() < 1e-14);
        CHECK((m(th, ph) - em).norm() < 1e-14);
      }
      {
        const auto [p, m] = four_spinor_basis(PartialWaveIndex::make(1, -1, -1));
        Vector4c ep;
        ep << 0, kI * c, 0, 0;
        Vector4c em;
        em << 0, 0, c * std::conj(e) * st, -c * ct;
        CHECK((p(th, ph) - ep).norm() < 1e-14);
        CHECK((m(th, ph) - em).norm() < 1e-14);
      }
    }
  const auto [p, m] = four_spinor_basis(PartialWaveIndex::make(1, 1, 1));
  CHECK(p(0.0, 0.0)[0].real() == 0.0);
  CHECK(p(0.0, 0.0)[0].imag() == doctest::Approx(kInvTwoSqrtPi).epsilon(1e-15));
  CHECK(p(0.0, 0.0).tail<3>().norm() == 0.0);
}

TEST_CASE("gram matrix is the identity") {
  for (int j2max : {1, 5, 9}) {
    const BasisTable table(enumerate_modes(j2max), j2max + 2);
    const MatrixXc g = table.gram();
    CHECK((g - MatrixXc::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(BasisTable(enumerate_modes(5), 5), ConfigurationError);
}

TEST_CASE("j = 1/2 densities carry no angular dependence") {
  std::mt19937_64 rng(7);
  std::normal_distribution<Real> nd;
  for (const auto& idx : enumerate_modes(1)) {
    const auto [e1, e2] = four_spinor_basis(idx);
    const Complex up(nd(rng), nd(rng));
    const Complex um(nd(rng), nd(rng));
    const Real mass = (std::norm(up) + std::norm(um)) / (4 * kPi);
    const Real charge = (std::norm(up) - std::norm(um)) / (4 * kPi);
    for (Real th : {0.1, 0.9, 2.4})
      for (Real ph : {0.0, 1.0, 4.0}) {
        const Vector4c u = up * e1(th, ph) + um * e2(th, ph);
        CHECK(std::abs(u.squaredNorm() - mass) < 1e-12);
        const Real beta = std::norm(u[0]) + std::norm(u[1]) - std::norm(u[2]) - std::norm(u[3]);
        CHECK(std::abs(beta - charge) < 1e-12);
      }
  }
}

TEST_CASE("synthesis and projection round trip") {
  const auto modes = enumerate_modes(5);
  const BasisTable table(modes, 8);
  std::mt19937_64 rng(11);
  std::normal_distribution<Real> nd;
  const int n = 7;
  SpinorField field;
  for (const auto& m : modes) {
    RadialSpinor rs = RadialSpinor::zero(n);
    for (int i = 0; i < n; ++i) {
      rs.plus[i] = Complex(nd(rng), nd(rng));
      rs.minus[i] = Complex(nd(rng), nd(rng));
    }
    field.emplace(m, rs);
  }
  const auto back = table.project(table.synthesize(field, n));
  Real err = 0;
  for (const auto& [idx, rs] : field) {
    err = std::max(err, (back.at(idx).plus - rs.plus).cwiseAbs().maxCoeff());
    err = std::max(err, (back.at(idx).minus - rs.minus).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-12);

  SUBCASE("single mode projects onto itself only") {
    SpinorField single;
    const auto idx = PartialWaveIndex::make(1, 1, 1);
    single.emplace(idx, RadialSpinor(VectorXc::Ones(n), VectorXc::Zero(n)));
    const auto p = table.project(table.synthesize(single, n));
    for (const auto& [k, rs] : p) {
      const Real expect_plus = (k == idx) ? 1.0 : 0.0;
      CHECK((rs.plus.array() - expect_plus).abs().maxCoeff() < 1e-13);
      CHECK(rs.minus.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
  SUBCASE("zero field") {
    const auto p = table.project(table.synthesize({}, n));
    for (const auto& [k, rs] : p) CHECK(rs.stacked().norm() == 0.0);
  }
}

TEST_CASE("degree-n harmonics live in the P_n block") {
  const int j2max = 11;
  const BasisTable table(enumerate_modes(j2max), j2max + 3);
  const auto& q = table.quadrature();
  std::mt19937_64 rng(3);
  std::normal_distribution<Real> nd;
  for (int n = 0; n <= 4; ++n) {
    PointwiseField f{MatrixXc::Zero(1, 4 * q.size())};
    for (int c = 0; c < 4; ++c)
      for (int m = -n; m <= n; ++m) {
        const Complex coef(nd(rng), nd(rng));
        for (int a = 0; a < q.size(); ++a)
          f.values(0, 4 * a + c) += coef * spherical_harmonic(n, m, q.theta(a), q.phi(a));
      }
    Real total = 0;
    for (int a = 0; a < q.size(); ++a) total += q.weights()[a] * f.values.block(0, 4 * a, 1, 4).squaredNorm();
    const auto proj = table.project(f);
    Real inside = 0;
    Real outside = 0;
    for (const auto& [idx, rs] : proj) {
      const Real e = rs.stacked().squaredNorm();
      if (idx.j2 == 2 * n - 1 || idx.j2 == 2 * n + 1) inside += e;
      else outside += e;
    }
    CHECK(std::abs(inside - total) < 1e-10 * total);
    CHECK(outside < 1e-20 * total);
  }
}

TEST_CASE("angular Dirac eigencheck") {
  CHECK(angular_dirac_eigencheck(1, 1, 1) < 1e-8);
  CHECK(angular_dirac_eigencheck(1, -1, -1) < 1e-8);
  CHECK(angular_dirac_eigencheck(3, 1, 1) < 1e-8);
  CHECK(angular_dirac_eigencheck(9, -5, -1, 13) < 1e-8);
  CHECK_THROWS_AS(angular_dirac_eigencheck(9, 1, 1, 6), ConfigurationError);
}

TEST_CASE("band projector partitions the field") {
  SpinorField field;
  for (const auto& m : enumerate_modes(15)) field.emplace(m, RadialSpinor(VectorXc::Ones(2), VectorXc::Ones(2)));
  std::size_t total = 0;
  for (int level = -1; level <= 4; ++level) {
    const auto part = band_projector(field, level);
    for (const auto& [idx, rs] : part) {
      CHECK(band_level(idx.band()) == level);
      for (int other = -1; other <= 4; ++other)
        if (other != level) CHECK(band_projector(part, other).empty());
    }
    total += part.size();
  }
  CHECK(total == field.size());
  SpinorField half;
  half.emplace(PartialWaveIndex::make(1, 1, 1), field.begin()->second);
  CHECK(band_projector(half, -1).size() == 1);
  CHECK(band_projector(half, 0).empty());
}
