#include "dwarp/radial_ops.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <vector>

namespace dwarp {
namespace {

using Triplet = Eigen::Triplet<Real>;

RadialOperator assemble(const PartialWaveIndex& idx, Real mass, const RadialGrid& grid,
                        const VectorXr& coupling) {
  validate(idx);
  const int n = grid.size();
  const Real h = 0.5 / grid.dr();
  std::vector<Triplet> t;
  t.reserve(8 * n);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, mass);
    t.emplace_back(n + i, n + i, -mass);
    t.emplace_back(i, n + i, coupling[i]);
    t.emplace_back(n + i, i, coupling[i]);
    if (i + 1 < n) {
      // (D w)_i = (w_{i+1} - w_{i-1}) / 2dr; upper block is -D, lower is D.
      t.emplace_back(i, n + i + 1, -h);
      t.emplace_back(n + i, i + 1, h);
    }
    if (i > 0) {
      t.emplace_back(i, n + i - 1, h);
      t.emplace_back(n + i, i - 1, -h);
    }
  }
  RadialOperator op;
  op.matrix.resize(2 * n, 2 * n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.coupling = coupling;
  op.index = idx;
  op.mass = mass;
  op.grid = grid;
  return op;
}

VectorXr flat_coupling(int k, const RadialGrid& grid) {
  VectorXr c(grid.size());
  for (int i = 0; i < grid.size(); ++i) c[i] = Real(k) / grid.node(i);
  return c;
}

// k/phi written as k/r + k(1/phi - 1/r), so that curved = flat + V holds
// entry by entry in floating point.
VectorXr curved_coupling(int k, const WarpFunction& warp, const RadialGrid& grid) {
  phi_on(warp, grid);
  VectorXr c(grid.size());
  for (int i = 0; i < grid.size(); ++i) c[i] = Real(k) / grid.node(i) + potential(warp, k, grid.node(i));
  return c;
}

}  // namespace

std::string to_string(OperatorForm f) {
  switch (f) {
    case OperatorForm::Curved: return "curved";
    case OperatorForm::SigmaFlat: return "sigma-flat";
    case OperatorForm::FlatReference: return "flat-reference";
  }
  return "?";
}

SparseXr central_difference(const RadialGrid& grid) {
  const int n = grid.size();
  const Real h = 0.5 / grid.dr();
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n) t.emplace_back(i, i + 1, h);
    if (i > 0) t.emplace_back(i, i - 1, -h);
  }
  SparseXr d(n, n);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

RadialOperator build_curved(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                            const RadialGrid& grid) {
  RadialOperator op = assemble(idx, mass, grid, curved_coupling(idx.k, warp, grid));
  op.warp = warp.name;
  op.form = OperatorForm::Curved;
  return op;
}

RadialOperator build_sigma_flat(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                                const RadialGrid& grid) {
  RadialOperator op = assemble(idx, mass, grid, curved_coupling(idx.k, warp, grid));
  op.warp = warp.name;
  op.form = OperatorForm::SigmaFlat;
  return op;
}

RadialOperator build_flat_reference(const PartialWaveIndex& idx, Real mass, const RadialGrid& grid) {
  RadialOperator op = assemble(idx, mass, grid, flat_coupling(idx.k, grid));
  op.warp = "flat";
  op.form = OperatorForm::FlatReference;
  return op;
}

SparseXr potential_matrix(const PartialWaveIndex& idx, const WarpFunction& warp, const RadialGrid& grid) {
  validate(idx);
  const int n = grid.size();
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const Real v = potential(warp, idx.k, grid.node(i));
    t.emplace_back(i, n + i, v);
    t.emplace_back(n + i, i, v);
  }
  SparseXr m(2 * n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Real conjugation_residual(const PartialWaveIndex& idx, Real mass, const WarpFunction& warp,
                          const RadialGrid& grid, const RadialSpinor& g) {
  validate(idx);
  const int n = grid.size();
  if (g.size() != n) throw ConfigurationError("conjugation_residual: test function size mismatch");
  const SparseXr d = central_difference(grid);
  VectorXr sigma(n);
  VectorXr logd(n);
  VectorXr kphi(n);
  VectorXr inv_r = grid.nodes().cwiseInverse();
  for (int i = 0; i < n; ++i) {
    const Real r = grid.node(i);
    const Real phi = warp.phi(r);
    sigma[i] = sigma_weight(warp, r).sigma;
    logd[i] = warp.dphi(r) / phi;
    kphi[i] = idx.k / phi;
  }
  // Curved block applied to G = sigma g, in the g-representation on phi^2 dr.
  const VectorXc gp = sigma.cwiseProduct(g.plus);
  const VectorXc gm = sigma.cwiseProduct(g.minus);
  const VectorXc cov_p = d * gp + logd.cwiseProduct(gp);
  const VectorXc cov_m = d * gm + logd.cwiseProduct(gm);
  const VectorXc curved_top = mass * gp - cov_m + kphi.cwiseProduct(gm);
  const VectorXc curved_bot = cov_p + kphi.cwiseProduct(gp) - mass * gm;
  // Sigma-flat block on g, on r^2 dr.
  const VectorXc flat_p = d * g.plus + inv_r.cwiseProduct(g.plus);
  const VectorXc flat_m = d * g.minus + inv_r.cwiseProduct(g.minus);
  const VectorXc sig_top = mass * g.plus - flat_m + kphi.cwiseProduct(g.minus);
  const VectorXc sig_bot = flat_p + kphi.cwiseProduct(g.plus) - mass * g.minus;

  const VectorXr inv_sigma = sigma.cwiseInverse();
  const VectorXc res_top = inv_sigma.cwiseProduct(curved_top) - sig_top;
  const VectorXc res_bot = inv_sigma.cwiseProduct(curved_bot) - sig_bot;
  const VectorXr r2 = grid.nodes().cwiseAbs2();
  const Real acc = (res_top.cwiseAbs2().cwiseProduct(r2).sum() + res_bot.cwiseAbs2().cwiseProduct(r2).sum()) * grid.dr();
  return std::sqrt(acc);
}

RadialSobolev::RadialSobolev(const WarpFunction& warp, const RadialGrid& grid)
    : grid_(grid), diag_(grid.size()), sub_(grid.size() > 1 ? grid.size() - 1 : 0) {
  const int n = grid.size();
  const Real inv_h2 = 1.0 / (grid.dr() * grid.dr());
  for (int i = 0; i < n; ++i) {
    const Real r = grid.node(i);
    const Real phi = warp.phi(r);
    if (!std::isfinite(phi) || phi <= 0) throw DomainError("Sobolev operator: bad phi at r = " + std::to_string(r));
    // Odd reflection w_{-1} = -w_0 gives the 3/dr^2 corner entry.
    diag_[i] = 1.0 + (i == 0 ? 3.0 : 2.0) * inv_h2 + warp.d2phi(r) / phi;
    if (i + 1 < n) sub_[i] = -inv_h2;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> es;
  es.computeFromTridiagonal(diag_, sub_, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw ConfigurationError("Sobolev operator: eigensolver failed");
  evals_ = es.eigenvalues();
  if (evals_[0] <= 0) {
    std::ostringstream os;
    os.precision(17);
    os << "Sobolev operator for warp '" << warp.name << "' is not positive: eigenvalue " << evals_[0];
    throw ConfigurationError(os.str());
  }
  evecs_ = es.eigenvectors();
}

VectorXc RadialSobolev::apply(Real s, const VectorXc& w) const {
  if (w.size() != evals_.size()) throw ConfigurationError("Sobolev apply: size mismatch");
  if (s == 0.0) return w;
  VectorXc c = evecs_.transpose() * w;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::pow(evals_[i], 0.5 * s);
  return evecs_ * c;
}

Real RadialSobolev::norm(Real s, const VectorXc& w) const {
  if (w.size() != evals_.size()) throw ConfigurationError("Sobolev norm: size mismatch");
  if (s == 0.0) return std::sqrt(w.squaredNorm() * grid_.dr());
  const VectorXc c = evecs_.transpose() * w;
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) acc += std::pow(evals_[i], s) * std::norm(c[i]);
  return std::sqrt(acc * grid_.dr());
}

MatrixXr RadialSobolev::squared() const {
  const int n = grid_.size();
  MatrixXr m = MatrixXr::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag_[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = sub_[i];
  }
  return m;
}

std::shared_ptr<const RadialSobolev> sobolev_operator(const WarpFunction& warp, const RadialGrid& grid) {
  using Key = std::tuple<std::string, int, Real>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const RadialSobolev>> cache;
  const Key key{warp.name, grid.size(), grid.dr()};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto op = std::make_shared<const RadialSobolev>(warp, grid);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 16) cache.clear();
  return cache.emplace(key, op).first->second;
}

VectorXc sobolev_apply(const WarpFunction& warp, const RadialGrid& grid, Real s, const VectorXc& f) {
  if (s < 0) throw ConfigurationError("Sobolev exponent must be non-negative");
  return sobolev_operator(warp, grid)->apply(s, f);
}

}  // namespace dwarp
