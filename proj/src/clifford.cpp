#include "dwarp/clifford.hpp"

#include <cmath>
#include <sstream>

#include "dwarp/manifold.hpp"

namespace dwarp {
namespace {

SpinMatrix blocks(const PauliMatrix& a, const PauliMatrix& b, const PauliMatrix& c,
                  const PauliMatrix& d) {
  SpinMatrix m;
  m << a, b, c, d;
  return m;
}

StandardMatrices build_standard() {
  StandardMatrices s;
  const PauliMatrix zero = PauliMatrix::Zero();
  s.sigma[0] = PauliMatrix::Identity();
  s.sigma[1] << 0, 1, 1, 0;
  s.sigma[2] << 0, -kI, kI, 0;
  s.sigma[3] << 1, 0, 0, -1;
  s.gamma[0] = blocks(s.sigma[0], zero, zero, -s.sigma[0]);
  for (int j = 1; j <= 3; ++j) {
    s.gamma[j] = blocks(zero, s.sigma[j], -s.sigma[j], zero);
    s.alpha[j - 1] = s.gamma[0] * s.gamma[j];
  }
  s.beta = s.gamma[0];
  return s;
}

Real max_abs(const SpinMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

const StandardMatrices& standard_matrices() {
  static const StandardMatrices s = build_standard();
  return s;
}

Real minkowski(int mu, int nu) {
  if (mu != nu) return 0.0;
  return mu == 0 ? 1.0 : -1.0;
}

std::vector<PauliMatrix> permutation_rotation_candidates() {
  const auto& s = standard_matrices();
  const std::array<Complex, 4> values{Complex(0.5, 0.5), Complex(0.5, -0.5),
                                      Complex(-0.5, 0.5), Complex(-0.5, -0.5)};
  std::vector<PauliMatrix> found;
  for (int code = 0; code < 256; ++code) {
    PauliMatrix v;
    v << values[code & 3], values[(code >> 2) & 3], values[(code >> 4) & 3],
        values[(code >> 6) & 3];
    const PauliMatrix vh = v.adjoint();
    if (v * vh != PauliMatrix::Identity()) continue;
    if (v * s.sigma[1] * vh != s.sigma[3]) continue;
    if (v * s.sigma[2] * vh != s.sigma[1]) continue;
    if (v * s.sigma[3] * vh != s.sigma[2]) continue;
    found.push_back(v);
  }
  return found;
}

const SpinMatrix& permutation_rotation() {
  static const SpinMatrix u = [] {
    const auto candidates = permutation_rotation_candidates();
    if (candidates.empty()) throw Error("permutation rotation search found no candidate");
    const PauliMatrix zero = PauliMatrix::Zero();
    const PauliMatrix& v = candidates.front();
    return blocks(v, zero, zero, v);
  }();
  return u;
}

DiracSymbol dirac_symbol(const WarpFunction& warp, Real mass, Real r, Real theta) {
  const auto& s = standard_matrices();
  const Real phi = warp.phi(r);
  const Real logd = warp.dphi(r) / phi;
  const Real cot = std::cos(theta) / std::sin(theta);
  DiracSymbol sym;
  sym.d_r = -kI * s.alpha[0];
  sym.d_theta = (-kI / phi) * s.alpha[1];
  sym.d_phi = (-kI / (phi * std::sin(theta))) * s.alpha[2];
  sym.zeroth = mass * s.beta - kI * logd * s.alpha[0] + (-kI * cot / (2.0 * phi)) * s.alpha[1];
  return sym;
}

DiracSymbol conjugate(const DiracSymbol& symbol, const SpinMatrix& u) {
  const SpinMatrix uh = u.adjoint();
  return {u * symbol.d_r * uh, u * symbol.d_theta * uh, u * symbol.d_phi * uh,
          u * symbol.zeroth * uh};
}

BlockCheck check_block_structure(const WarpFunction& warp, Real mass,
                                 const std::vector<std::array<Real, 3>>& samples, Real tol) {
  const auto& s = standard_matrices();
  const SpinMatrix& u = permutation_rotation();
  BlockCheck report;

  auto record = [&](const std::string& what, Real dev, const std::array<Real, 3>& at) {
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol) {
      report.passed = false;
      std::ostringstream os;
      os << what << " deviates by " << dev << " at (r,theta,phi)=(" << at[0] << "," << at[1]
         << "," << at[2] << ")";
      report.failures.push_back(os.str());
    }
  };

  for (const auto& at : samples) {
    const Real r = at[0];
    const Real theta = at[1];
    const DiracSymbol sym = conjugate(dirac_symbol(warp, mass, r, theta), u);
    const Real phi = warp.phi(r);
    const Real logd = warp.dphi(r) / phi;
    const Real cot = std::cos(theta) / std::sin(theta);

    const std::array<std::pair<const SpinMatrix*, PauliMatrix>, 4> expected{{
        {&sym.d_r, -kI * s.sigma[3]},
        {&sym.d_theta, (-kI / phi) * s.sigma[1]},
        {&sym.d_phi, (-kI / (phi * std::sin(theta))) * s.sigma[2]},
        {&sym.zeroth, -kI * logd * s.sigma[3] + (-kI * cot / (2.0 * phi)) * s.sigma[1]},
    }};
    const std::array<const char*, 4> names{"d_r", "d_theta", "d_phi", "zeroth"};
    for (std::size_t t = 0; t < expected.size(); ++t) {
      const SpinMatrix& c = *expected[t].first;
      const PauliMatrix& a = expected[t].second;
      PauliMatrix diag_top = PauliMatrix::Zero();
      PauliMatrix diag_bottom = PauliMatrix::Zero();
      if (t == 3) {
        diag_top = mass * PauliMatrix::Identity();
        diag_bottom = -mass * PauliMatrix::Identity();
      }
      const SpinMatrix target = blocks(diag_top, a, a, diag_bottom);
      record(std::string(names[t]) + " block form", max_abs(c - target), at);
      record(std::string(names[t]) + " off-diagonal symmetry",
             (c.topRightCorner<2, 2>() - c.bottomLeftCorner<2, 2>()).cwiseAbs().maxCoeff(), at);
    }
  }
  return report;
}

}  // namespace dwarp
