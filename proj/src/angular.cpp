#include "dwarp/angular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace dwarp {
namespace {

/// Normalized associated Legendre values P_l^m(cos theta) for m >= 0,
/// Condon-Shortley phase included, so that Y_l^m = P e^{i m phi}.
Real normalized_legendre(int l, int m, Real theta) {
  const Real x = std::cos(theta);
  const Real s = std::sin(theta);
  Real pmm = 1.0 / std::sqrt(4 * kPi);
  for (int i = 1; i <= m; ++i) pmm *= -std::sqrt((2.0 * i + 1) / (2.0 * i)) * s;
  if (l == m) return pmm;
  Real pm1 = std::sqrt(2.0 * m + 3) * x * pmm;
  if (l == m + 1) return pm1;
  Real prev = pmm;
  Real cur = pm1;
  for (int ll = m + 2; ll <= l; ++ll) {
    const Real a = std::sqrt((4.0 * ll * ll - 1) / (1.0 * ll * ll - 1.0 * m * m));
    const Real b = std::sqrt((1.0 * (ll - 1) * (ll - 1) - 1.0 * m * m) /
                             (4.0 * (ll - 1) * (ll - 1) - 1));
    const Real next = a * (x * cur - b * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::string half(int twice) {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

}  // namespace

PartialWaveIndex PartialWaveIndex::make(int j2, int m2, int k) {
  PartialWaveIndex idx{j2, m2, k};
  validate(idx);
  return idx;
}

std::string PartialWaveIndex::label() const {
  return "j=" + half(j2) + ",m=" + half(m2) + ",k=" + std::to_string(k);
}

void validate(const PartialWaveIndex& idx) {
  std::ostringstream why;
  if (idx.j2 < 1 || idx.j2 % 2 == 0) why << "j must lie in 1/2 + N";
  else if (std::abs(idx.m2) % 2 != 1 || std::abs(idx.m2) > idx.j2) why << "m_j must be a half-integer with |m_j| <= j";
  else if (std::abs(idx.k) * 2 != idx.j2 + 1) why << "k_j must be +-(j + 1/2)";
  const std::string msg = why.str();
  if (!msg.empty())
    throw IndexError("invalid partial wave (j2=" + std::to_string(idx.j2) + ", m2=" +
                     std::to_string(idx.m2) + ", k=" + std::to_string(idx.k) + "): " + msg);
}

std::vector<PartialWaveIndex> enumerate_modes(int j2max) {
  std::vector<PartialWaveIndex> out;
  for (int j2 = 1; j2 <= j2max; j2 += 2)
    for (int m2 = -j2; m2 <= j2; m2 += 2) {
      const int lam = (j2 + 1) / 2;
      out.push_back({j2, m2, -lam});
      out.push_back({j2, m2, lam});
    }
  return out;
}

std::vector<PartialWaveIndex> block_modes(int n) {
  std::vector<PartialWaveIndex> out;
  for (int j2 : {2 * n - 1, 2 * n + 1}) {
    if (j2 < 1) continue;
    for (int m2 = -j2; m2 <= j2; m2 += 2) {
      const int lam = (j2 + 1) / 2;
      out.push_back({j2, m2, -lam});
      out.push_back({j2, m2, lam});
    }
  }
  return out;
}

std::vector<PartialWaveIndex> band_modes(int n) {
  std::vector<PartialWaveIndex> out;
  if (n >= 1)
    for (int m2 = -(2 * n - 1); m2 <= 2 * n - 1; m2 += 2) out.push_back({2 * n - 1, m2, -n});
  for (int m2 = -(2 * n + 1); m2 <= 2 * n + 1; m2 += 2) out.push_back({2 * n + 1, m2, n + 1});
  return out;
}

Complex spherical_harmonic(int l, int m, Real theta, Real phi) {
  if (l < 0 || std::abs(m) > l)
    throw IndexError("spherical harmonic needs |m| <= l, got l=" + std::to_string(l) +
                     ", m=" + std::to_string(m));
  const int am = std::abs(m);
  const Complex y = normalized_legendre(l, am, theta) * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return (am % 2 ? -1.0 : 1.0) * std::conj(y);
}

Complex spherical_harmonic_dtheta(int l, int m, Real theta, Real phi) {
  if (l < 0 || std::abs(m) > l)
    throw IndexError("spherical harmonic needs |m| <= l");
  Complex d = m * std::cos(theta) / std::sin(theta) * spherical_harmonic(l, m, theta, phi);
  if (m < l)
    d += std::sqrt(Real(l - m) * Real(l + m + 1)) * std::polar(1.0, -phi) *
         spherical_harmonic(l, m + 1, theta, phi);
  return d;
}

namespace {

Complex y_or_zero(int l, int m, Real theta, Real phi) {
  if (l < 0 || std::abs(m) > l) return 0.0;
  return spherical_harmonic(l, m, theta, phi);
}

void check_jm(int j2, int m2) {
  const int lam = (j2 + 1) / 2;
  validate({j2, m2, lam});
}

}  // namespace

Vector2c e_plus_hat(int j2, int m2, Real theta, Real phi) {
  check_jm(j2, m2);
  const int l = (j2 - 1) / 2;
  Vector2c e;
  e[0] = std::sqrt(Real(j2 + m2) / (2.0 * j2)) * y_or_zero(l, (m2 - 1) / 2, theta, phi);
  e[1] = std::sqrt(Real(j2 - m2) / (2.0 * j2)) * y_or_zero(l, (m2 + 1) / 2, theta, phi);
  return e;
}

Vector2c e_minus_hat(int j2, int m2, Real theta, Real phi) {
  check_jm(j2, m2);
  const int l = (j2 + 1) / 2;
  Vector2c e;
  e[0] = std::sqrt(Real(j2 - m2 + 2) / (2.0 * j2 + 4)) * y_or_zero(l, (m2 - 1) / 2, theta, phi);
  e[1] = -std::sqrt(Real(j2 + m2 + 2) / (2.0 * j2 + 4)) * y_or_zero(l, (m2 + 1) / 2, theta, phi);
  return e;
}

Vector2c gamma_eigenspinor(int j2, int m2, int branch, Real theta, Real phi) {
  if (branch != 1 && branch != -1) throw IndexError("branch must be +1 or -1");
  return (e_plus_hat(j2, m2, theta, phi) + Real(branch) * kI * e_minus_hat(j2, m2, theta, phi)) /
         std::sqrt(2.0);
}

Eigen::Matrix<Complex, 2, 2> frame_rotation(Real theta, Real phi) {
  Eigen::Matrix<Complex, 2, 2> a;
  Eigen::Matrix<Complex, 2, 2> b;
  // exp(i s2 t) = cos t + i s2 sin t; exp(i s3 t) = diag(e^{it}, e^{-it})
  const Real c = std::cos(theta / 2);
  const Real s = std::sin(theta / 2);
  a << c, s, -s, c;
  b << std::polar(1.0, phi / 2), 0, 0, std::polar(1.0, -phi / 2);
  return a * b;
}

Vector4c AngularBasisElement::operator()(Real theta, Real phi) const {
  Vector4c v = Vector4c::Zero();
  switch (branch) {
    case Branch::FMinus: v.head<2>() = kI * e_minus_hat(index.j2, index.m2, theta, phi); break;
    case Branch::FPlus: v.tail<2>() = e_plus_hat(index.j2, index.m2, theta, phi); break;
    case Branch::GPlus: v.head<2>() = kI * e_plus_hat(index.j2, index.m2, theta, phi); break;
    case Branch::GMinus: v.tail<2>() = e_minus_hat(index.j2, index.m2, theta, phi); break;
  }
  return v;
}

std::pair<AngularBasisElement, AngularBasisElement> four_spinor_basis(const PartialWaveIndex& idx) {
  validate(idx);
  if (idx.k > 0) return {{idx, Branch::FMinus}, {idx, Branch::FPlus}};
  return {{idx, Branch::GPlus}, {idx, Branch::GMinus}};
}

std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre(int n) {
  std::vector<Real> x(n);
  std::vector<Real> w(n);
  for (int i = 0; i < n; ++i) {
    Real z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0;
      Real p1 = z;
      for (int k = 2; k <= n; ++k) {
        const Real p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const Real dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1 - z * z) * dp * dp);
  }
  return {x, w};
}

SphereQuadrature::SphereQuadrature(int degree) : degree_(degree) {
  if (degree < 0) throw ConfigurationError("quadrature degree must be non-negative");
  n_theta_ = (degree + 2) / 2;
  n_phi_ = degree + 1;
  auto [x, w] = gauss_legendre(n_theta_);
  theta_.resize(n_theta_);
  weights_.resize(n_theta_ * n_phi_);
  for (int t = 0; t < n_theta_; ++t) {
    theta_[t] = std::acos(x[t]);
    for (int p = 0; p < n_phi_; ++p) weights_[t * n_phi_ + p] = w[t] * 2 * kPi / n_phi_;
  }
}

VectorXc RadialSpinor::stacked() const {
  VectorXc v(2 * size());
  v << plus, minus;
  return v;
}

RadialSpinor RadialSpinor::from_stacked(const VectorXc& v, Representation r) {
  const Eigen::Index n = v.size() / 2;
  return {v.head(n), v.tail(n), r};
}

BasisTable::BasisTable(std::vector<PartialWaveIndex> modes, int degree)
    : modes_(std::move(modes)), quad_(degree) {
  int j2max = 0;
  for (const auto& m : modes_) {
    validate(m);
    j2max = std::max(j2max, m.j2);
  }
  if (degree < j2max + 1)
    throw ConfigurationError("quadrature degree " + std::to_string(degree) +
                             " is too coarse for j = " + std::to_string(j2max) +
                             "/2; need at least " + std::to_string(j2max + 1));
  const int q = quad_.size();
  values_.resize(2 * static_cast<Eigen::Index>(modes_.size()), 4 * q);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto [e1, e2] = four_spinor_basis(modes_[i]);
    for (int a = 0; a < q; ++a) {
      const Real th = quad_.theta(a);
      const Real ph = quad_.phi(a);
      values_.block(2 * i, 4 * a, 1, 4) = e1(th, ph).transpose();
      values_.block(2 * i + 1, 4 * a, 1, 4) = e2(th, ph).transpose();
    }
  }
  weighted_adjoint_ = values_.adjoint();
  for (int a = 0; a < q; ++a) weighted_adjoint_.middleRows(4 * a, 4) *= quad_.weights()[a];
}

int BasisTable::mode_position(const PartialWaveIndex& idx) const {
  const auto it = std::lower_bound(modes_.begin(), modes_.end(), idx);
  if (it != modes_.end() && *it == idx) return static_cast<int>(it - modes_.begin());
  const auto lin = std::find(modes_.begin(), modes_.end(), idx);
  if (lin == modes_.end()) throw IndexError("mode " + idx.label() + " is not in the basis table");
  return static_cast<int>(lin - modes_.begin());
}

PointwiseField BasisTable::synthesize(const SpinorField& field, int n_radial) const {
  MatrixXc coeff = MatrixXc::Zero(n_radial, values_.rows());
  for (const auto& [idx, rs] : field) {
    const int pos = mode_position(idx);
    if (rs.size() != n_radial) throw ConfigurationError("radial size mismatch in synthesis");
    coeff.col(2 * pos) = rs.plus;
    coeff.col(2 * pos + 1) = rs.minus;
  }
  return {coeff * values_};
}

SpinorField BasisTable::project(const PointwiseField& f, Representation rep) const {
  const MatrixXc coeff = f.values * weighted_adjoint_;
  SpinorField out;
  for (std::size_t i = 0; i < modes_.size(); ++i)
    out.emplace(modes_[i], RadialSpinor(coeff.col(2 * i), coeff.col(2 * i + 1), rep));
  return out;
}

RadialSpinor BasisTable::project(const PointwiseField& f, const PartialWaveIndex& idx,
                                 Representation rep) const {
  const int pos = mode_position(idx);
  return {f.values * weighted_adjoint_.col(2 * pos), f.values * weighted_adjoint_.col(2 * pos + 1),
          rep};
}

MatrixXc BasisTable::gram() const { return (values_ * weighted_adjoint_).transpose(); }

Real angular_dirac_eigencheck(int j2, int m2, int branch, int degree) {
  check_jm(j2, m2);
  if (degree <= 0) degree = j2 + 5;
  const int lmax = (j2 + 1) / 2 + 1;
  if (degree < lmax + (j2 + 1) / 2)
    throw ConfigurationError("quadrature degree too coarse for the eigencheck");
  const SphereQuadrature quad(degree);
  const int q = quad.size();
  const Real lambda = 0.5 * (j2 + 1);

  // Spectral coefficients of both components of R1* Gamma.
  std::vector<Vector2c> samples(q);
  for (int a = 0; a < q; ++a) samples[a] = gamma_eigenspinor(j2, m2, branch, quad.theta(a), quad.phi(a));
  struct Coef {
    int l;
    int m;
    Vector2c c;
  };
  std::vector<Coef> coefs;
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) {
      Vector2c c = Vector2c::Zero();
      for (int a = 0; a < q; ++a)
        c += quad.weights()[a] * std::conj(spherical_harmonic(l, m, quad.theta(a), quad.phi(a))) *
             samples[a];
      if (c.norm() > 1e-15) coefs.push_back({l, m, c});
    }

  Eigen::Matrix<Complex, 2, 2> s1;
  Eigen::Matrix<Complex, 2, 2> s2;
  Eigen::Matrix<Complex, 2, 2> s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;

  Real acc = 0.0;
  for (int a = 0; a < q; ++a) {
    const Real th = quad.theta(a);
    const Real ph = quad.phi(a);
    Vector2c g = Vector2c::Zero();
    Vector2c gth = Vector2c::Zero();
    Vector2c gph = Vector2c::Zero();
    for (const auto& cf : coefs) {
      const Complex y = spherical_harmonic(cf.l, cf.m, th, ph);
      g += y * cf.c;
      gth += spherical_harmonic_dtheta(cf.l, cf.m, th, ph) * cf.c;
      gph += (kI * Real(cf.m) * y) * cf.c;
    }
    const auto r1 = frame_rotation(th, ph);
    const Vector2c big = r1 * g;
    const Vector2c dth = (0.5 * kI) * s2 * big + r1 * gth;
    const Vector2c dph = r1 * ((0.5 * kI) * s3 * g) + r1 * gph;
    const Vector2c kg = -kI * s1 * (dth + (0.5 * std::cos(th) / std::sin(th)) * big) -
                        kI * s2 * dph / std::sin(th);
    acc += quad.weights()[a] * (kg - Real(branch) * lambda * big).squaredNorm();
  }
  return std::sqrt(acc);
}

int band_level(int band) {
  if (band <= 0) return -1;
  int level = 0;
  while ((2 << level) <= band) ++level;
  return level;
}

SpinorField band_projector(const SpinorField& field, int level) {
  SpinorField out;
  for (const auto& [idx, rs] : field)
    if (band_level(idx.band()) == level) out.emplace(idx, rs);
  return out;
}

}  // namespace dwarp
