#include "dwarp/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dwarp {
namespace {

std::string at_radius(const std::string& what, Real r) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at r = " << r;
  return os.str();
}

Real checked_phi(const WarpFunction& w, Real r) {
  const Real v = w.phi(r);
  if (!std::isfinite(v)) throw DomainError(at_radius(w.name + ": non-finite phi", r));
  if (v == 0.0) throw DomainError(at_radius(w.name + ": phi vanishes", r));
  return v;
}

}  // namespace

WarpFunction flat_warp() {
  return {"flat", [](Real r) { return r; }, [](Real) { return 1.0; }, [](Real) { return 0.0; }};
}

WarpFunction hyperbolic_warp() {
  return {"hyperbolic", [](Real r) { return std::sinh(r); }, [](Real r) { return std::cosh(r); },
          [](Real r) { return std::sinh(r); }};
}

WarpFunction conical_warp() {
  return {"conical",
          [](Real r) { return r + r * r * r / (1 + r * r); },
          [](Real r) {
            const Real q = 1 + r * r;
            return 1 + (3 * r * r + r * r * r * r) / (q * q);
          },
          [](Real r) {
            const Real q = 1 + r * r;
            return (6 * r - 2 * r * r * r) / (q * q * q);
          }};
}

WarpFunction sine_warp() {
  WarpFunction w{"sine", [](Real r) { return std::sin(r); }, [](Real r) { return std::cos(r); },
                 [](Real r) { return -std::sin(r); }};
  w.admissible = false;
  return w;
}

WarpFunction polynomial_warp(std::string name, std::vector<Real> c) {
  if (c.empty()) throw ConfigurationError("polynomial warp needs at least one coefficient");
  auto eval = [c](Real r, int order) {
    // d^order/dr^order of sum c_i r^(2i+1), by Horner on r^2.
    Real acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
      const int p = 2 * static_cast<int>(i) + 1;
      Real factor = 1.0;
      for (int d = 0; d < order; ++d) factor *= (p - d);
      if (p - order < 0 || factor == 0.0) continue;
      acc += c[i] * factor * std::pow(r, p - order);
    }
    return acc;
  };
  return {std::move(name), [eval](Real r) { return eval(r, 0); },
          [eval](Real r) { return eval(r, 1); }, [eval](Real r) { return eval(r, 2); }};
}

std::vector<WarpFunction> builtin_warps() {
  return {flat_warp(), hyperbolic_warp(), conical_warp(), sine_warp()};
}

WarpFunction warp_by_name(const std::string& name) {
  for (auto& w : builtin_warps())
    if (w.name == name) return w;
  throw ConfigurationError("unknown warp '" + name + "'");
}

VectorXr phi_on(const WarpFunction& w, const RadialGrid& grid) {
  VectorXr out(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    out[i] = checked_phi(w, grid.node(i));
    if (out[i] < 0) throw DomainError(at_radius(w.name + ": negative phi", grid.node(i)));
  }
  return out;
}

AssumptionReport check_assumptions(const WarpFunction& w, const RadialGrid& grid, Real tol) {
  AssumptionReport rep;
  auto fail = [&](const std::string& msg) {
    rep.passed = false;
    rep.diagnostics.push_back(msg);
  };

  Real min_phi = std::numeric_limits<Real>::infinity();
  Real min_ratio = std::numeric_limits<Real>::infinity();
  Real min_tail = std::numeric_limits<Real>::infinity();
  Real sup_log = 0.0;
  Real sup_curv = 0.0;
  bool positive = true;

  auto visit_tail = [&](Real r, Real phi) {
    min_tail = std::min(min_tail, phi);
    sup_log = std::max(sup_log, std::abs(w.dphi(r) / phi));
  };

  for (int i = 0; i < grid.size(); ++i) {
    const Real r = grid.node(i);
    const Real phi = w.phi(r);
    if (!std::isfinite(phi) || !std::isfinite(w.dphi(r)) || !std::isfinite(w.d2phi(r)))
      throw DomainError(at_radius(w.name + ": non-finite warp evaluation", r));
    min_phi = std::min(min_phi, phi);
    if (phi <= 0) {
      if (positive) fail(at_radius("positivity: phi = " + std::to_string(phi), r));
      positive = false;
      continue;
    }
    min_ratio = std::min(min_ratio, phi / r);
    if (r >= 1.0) visit_tail(r, phi);
    const Curvatures c = curvatures(w, r);
    sup_curv = std::max(sup_curv, std::abs(c.scalar));
  }
  if (grid.rmax() >= 1.0) {
    const Real phi1 = w.phi(1.0);
    if (phi1 > 0) visit_tail(1.0, phi1);
  }

  // Extrapolation to r = 0 from the first nodes: phi fitted by
  // c0 + c1 r + c3 r^3 (odd plus offset), phi' linear in r^2 (even).
  const Real r0 = grid.node(0);
  const Real r1 = r0 + grid.dr();
  const Real r2 = r0 + 2 * grid.dr();
  {
    Eigen::Matrix3d a;
    Eigen::Vector3d y;
    int row = 0;
    for (Real r : {r0, r1, r2}) {
      a.row(row) << 1, r, r * r * r;
      y[row++] = w.phi(r);
    }
    rep.phi_at_zero = a.fullPivLu().solve(y)[0];
  }
  rep.dphi_at_zero = w.dphi(r0) - (w.dphi(r1) - w.dphi(r0)) * r0 * r0 / (r1 * r1 - r0 * r0);
  if (std::abs(rep.phi_at_zero) > tol)
    fail("phi(0) extrapolates to " + std::to_string(rep.phi_at_zero) + ", expected 0");
  if (std::abs(rep.dphi_at_zero - 1.0) > tol)
    fail("phi'(0) extrapolates to " + std::to_string(rep.dphi_at_zero) + ", expected 1");

  rep.sup_log_derivative = sup_log;
  rep.inf_phi_tail = std::isfinite(min_tail) ? min_tail : 0.0;
  rep.curvature_bound = sup_curv;
  rep.inf_phi_over_r = positive ? min_ratio : std::min(0.0, min_phi);

  if (positive && std::isfinite(min_tail) && min_tail <= tol)
    fail("inf_{r>=1} phi = " + std::to_string(min_tail) + " is not bounded away from 0");
  if (positive && min_ratio <= tol)
    fail("inf phi/r = " + std::to_string(min_ratio) + " is not bounded away from 0");
  if (!std::isfinite(sup_curv)) fail("scalar curvature is unbounded on the grid");
  if (!w.admissible) fail(w.name + " is flagged as a test-only warp");
  return rep;
}

SigmaWeight sigma_weight(const WarpFunction& w, Real r) {
  if (!(r > 0)) throw DomainError(at_radius("sigma weight needs r > 0", r));
  if (r < kSeriesRadius) return {1.0, 0.0};
  const Real phi = checked_phi(w, r);
  return {r / phi, 1.0 / r - w.dphi(r) / phi};
}

Real potential(const WarpFunction& w, int k, Real r) {
  if (!(r > 0)) throw DomainError(at_radius("potential needs r > 0", r));
  if (r < kSeriesRadius) return 0.0;
  const Real phi = checked_phi(w, r);
  return k * (1.0 / phi - 1.0 / r);
}

Curvatures curvatures(const WarpFunction& w, Real r) {
  const Real phi = checked_phi(w, r);
  const Real d = w.dphi(r);
  Curvatures c;
  c.sec_tan = (1 - d) * (1 + d) / (phi * phi);
  c.sec_rad = -w.d2phi(r) / phi;
  c.scalar = 2 * (2 * c.sec_rad + c.sec_tan);
  return c;
}

}  // namespace dwarp
