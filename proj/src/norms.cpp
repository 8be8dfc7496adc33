#include "dwarp/norms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "dwarp/radial_ops.hpp"

namespace dwarp {
namespace {

std::string shortest(Real v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Real inv(Real v) { return std::isinf(v) ? 0.0 : 1.0 / v; }

}  // namespace

std::string to_string(Family f) { return f == Family::Massless ? "massless" : "massive"; }

Admissibility validate_admissible(Real p, Real q, Family family) {
  constexpr Real tol = 1e-12;
  Admissibility a;
  auto reject = [&](std::string why) {
    a.ok = false;
    a.reason = "admissibility: " + std::move(why);
    return a;
  };
  if (std::isnan(p) || std::isnan(q)) return reject("p and q must be numbers");
  if (family == Family::Massless) {
    const Real lhs = 2 * inv(p) + 2 * inv(q);
    if (std::abs(lhs - 1.0) > tol) return reject("2/" + shortest(p) + "+2/" + shortest(q) + " ≠ 1");
    if (!(p > 2)) return reject("massless estimates need p > 2, got p = " + shortest(p));
    return a;
  }
  const Real lhs = 2 * inv(p) + 3 * inv(q);
  if (std::abs(lhs - 1.5) > tol) return reject("2/" + shortest(p) + "+3/" + shortest(q) + " ≠ 3/2");
  if (p < 2) return reject("massive estimates need p >= 2, got p = " + shortest(p));
  if (q < 2 || q > 6) return reject("massive estimates need 2 <= q <= 6, got q = " + shortest(q));
  return a;
}

MixedNormSpec MixedNormSpec::make(Real p, Real q, Family family, Real T) {
  const auto adm = validate_admissible(p, q, family);
  if (!adm) throw ConfigurationError(adm.reason);
  if (!(T > 0)) throw ConfigurationError("mixed norm interval must have T > 0");
  return {p, q, 1.0 - 2.0 * inv(q), family, T};
}

VectorXr radial_measure(Measure m, const WarpFunction& warp, const RadialGrid& grid) {
  if (m == Measure::Euclidean) return grid.nodes().cwiseAbs2() * grid.dr();
  return phi_on(warp, grid).cwiseAbs2() * grid.dr();
}

Real lq_norm(const PointwiseField& values, Real q, const VectorXr& measure, const SphereQuadrature& quad) {
  if (q < 1) throw ConfigurationError("L^q norms need q >= 1");
  const Eigen::Index n = values.values.rows();
  if (measure.size() != n) throw ConfigurationError("lq_norm: radial size mismatch");
  const int nq = quad.size();
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Real row = 0.0;
    for (int a = 0; a < nq; ++a) {
      const Real mod2 = values.values.block(i, 4 * a, 1, 4).squaredNorm();
      row += quad.weights()[a] * std::pow(mod2, 0.5 * q);
    }
    acc += measure[i] * row;
  }
  return std::pow(acc, 1.0 / q);
}

PointwiseField field_values(const SpinorField& w, Measure m, const WarpFunction& warp,
                            const RadialGrid& grid, const BasisTable& table,
                            const VectorXr* multiplier) {
  PointwiseField f = table.synthesize(w, grid.size());
  VectorXr scale = (m == Measure::Manifold ? phi_on(warp, grid) : grid.nodes()).cwiseInverse();
  if (multiplier) scale = scale.cwiseProduct(*multiplier);
  f.values = scale.asDiagonal() * f.values;
  return f;
}

Real lq_norm(const SpinorField& w, Real q, Measure m, const WarpFunction& warp, const RadialGrid& grid,
             const BasisTable& table, const VectorXr* multiplier) {
  return lq_norm(field_values(w, m, warp, grid, table, multiplier), q, radial_measure(m, warp, grid),
                 table.quadrature());
}

ModeProfile mode_profile(const PartialWaveIndex& idx, int n_theta) {
  const auto [e1, e2] = four_spinor_basis(idx);
  const auto [x, w] = gauss_legendre(n_theta);
  ModeProfile p;
  for (int t = 0; t < n_theta; ++t) {
    const Real th = std::acos(x[t]);
    p.cos_theta_weights.push_back(2 * kPi * w[t]);
    p.first.push_back(e1(th, 0.0).squaredNorm());
    p.second.push_back(e2(th, 0.0).squaredNorm());
  }
  return p;
}

Real lq_norm_single_mode(const ModeProfile& prof, const VectorXc& gplus, const VectorXc& gminus, Real q,
                         const VectorXr& measure) {
  if (q < 1) throw ConfigurationError("L^q norms need q >= 1");
  const Eigen::Index n = gplus.size();
  const std::size_t nt = prof.first.size();
  const Real half = 0.5 * q;
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real a = std::norm(gplus[i]);
    const Real b = std::norm(gminus[i]);
    if (a == 0.0 && b == 0.0) continue;
    Real row = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      const Real mod2 = a * prof.first[t] + b * prof.second[t];
      row += prof.cos_theta_weights[t] * (half == 1.0 ? mod2 : half == 2.0 ? mod2 * mod2 : std::pow(mod2, half));
    }
    acc += measure[i] * row;
  }
  return std::pow(acc, 1.0 / q);
}

Real time_norm(const std::vector<Real>& times, const std::vector<Real>& values, Real p) {
  if (times.size() != values.size() || times.empty()) throw ConfigurationError("time_norm: bad samples");
  if (std::isinf(p)) return *std::max_element(values.begin(), values.end());
  if (times.size() == 1) return 0.0;
  Real acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    acc += 0.5 * (times[i + 1] - times[i]) * (std::pow(values[i], p) + std::pow(values[i + 1], p));
  return std::pow(acc, 1.0 / p);
}

Real strichartz_functional(const FieldTrajectory& traj, const MixedNormSpec& spec, const WarpFunction& warp,
                           const RadialGrid& grid, const StrichartzOptions& opt) {
  const auto adm = validate_admissible(spec.p, spec.q, spec.family);
  if (!adm) throw ConfigurationError(adm.reason);
  if (traj.states.empty()) throw ConfigurationError("strichartz_functional: empty trajectory");
  const Real tol = 1e-9 * std::max(1.0, spec.T);
  if (traj.times.front() > tol || traj.times.back() < spec.T - tol)
    throw ConfigurationError("strichartz_functional: samples do not cover (0, T)");

  const VectorXr phi = phi_on(warp, grid);
  const VectorXr measure = phi.cwiseAbs2() * grid.dr();
  // Multiplier taking w to (phi/r)^e g with g = w/phi.
  VectorXr mult(grid.size());
  for (int i = 0; i < grid.size(); ++i) mult[i] = std::pow(phi[i] / grid.node(i), spec.weight_exponent) / phi[i];

  std::set<PartialWaveIndex> modes;
  for (const auto& s : traj.states)
    for (const auto& [idx, rs] : s) modes.insert(idx);

  std::vector<Real> times;
  std::vector<Real> values;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (traj.times[k] > spec.T + tol) break;
    times.push_back(traj.times[k]);
  }
  values.reserve(times.size());

  if (modes.size() == 1) {
    const PartialWaveIndex idx = *modes.begin();
    const ModeProfile prof = mode_profile(idx, opt.n_theta);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto it = traj.states[k].find(idx);
      if (it == traj.states[k].end()) {
        values.push_back(0.0);
        continue;
      }
      values.push_back(lq_norm_single_mode(prof, mult.cwiseProduct(it->second.plus),
                                           mult.cwiseProduct(it->second.minus), spec.q, measure));
    }
  } else {
    int j2max = 1;
    for (const auto& m : modes) j2max = std::max(j2max, m.j2);
    const BasisTable table(std::vector<PartialWaveIndex>(modes.begin(), modes.end()), j2max + opt.extra_degree);
    for (std::size_t k = 0; k < times.size(); ++k) {
      PointwiseField f = table.synthesize(traj.states[k], grid.size());
      f.values = mult.asDiagonal() * f.values;
      values.push_back(lq_norm(f, spec.q, measure, table.quadrature()));
    }
  }
  return time_norm(times, values, spec.p);
}

Real hs_norm(const VectorXc& w, Real s, const WarpFunction& warp, const RadialGrid& grid) {
  if (s < 0) throw ConfigurationError("hs_norm needs s >= 0");
  if (s == 0) return std::sqrt(w.squaredNorm() * grid.dr());
  return sobolev_operator(warp, grid)->norm(s, w);
}

Real hs_norm(const RadialSpinor& w, Real s, const WarpFunction& warp, const RadialGrid& grid) {
  const Real a = hs_norm(w.plus, s, warp, grid);
  const Real b = hs_norm(w.minus, s, warp, grid);
  return std::sqrt(a * a + b * b);
}

Real hab_norm(const SpinorField& w, Real a, Real b, const WarpFunction& warp, const RadialGrid& grid) {
  Real acc = 0.0;
  for (const auto& [idx, rs] : w) {
    const Real bracket = std::pow(1.0 + Real(idx.k) * idx.k, b);
    for (const VectorXc* f : {&rs.plus, &rs.minus}) {
      const Real l2 = f->squaredNorm() * grid.dr();
      const Real ha = hs_norm(*f, a, warp, grid);
      acc += bracket * l2 + ha * ha;
    }
  }
  return std::sqrt(acc);
}

Real l2_norm(const SpinorField& w, const RadialGrid& grid) {
  Real acc = 0.0;
  for (const auto& [idx, rs] : w) acc += rs.plus.squaredNorm() + rs.minus.squaredNorm();
  return std::sqrt(acc * grid.dr());
}

Real l2_norm(const VectorXc& stacked, const RadialGrid& grid) {
  return std::sqrt(stacked.squaredNorm() * grid.dr());
}

}  // namespace dwarp
