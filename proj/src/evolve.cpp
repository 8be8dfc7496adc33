#include "dwarp/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dwarp {
namespace {

using SparseXc = Eigen::SparseMatrix<Complex>;

bool finite(const VectorXc& v) { return v.allFinite(); }

/// Linear propagation of a whole field by one step, blocks cached by k.
class FieldStepper {
 public:
  FieldStepper(Real mass, const WarpFunction& warp, const RadialGrid& grid, Real dt, Scheme scheme, int substeps = 1)
      : mass_(mass), warp_(warp), grid_(grid), dt_(dt), scheme_(scheme), substeps_(substeps) {}

  const Propagator& propagator(const PartialWaveIndex& idx) {
    auto it = cache_.find(idx.k);
    if (it == cache_.end())
      it = cache_.emplace(idx.k, Propagator(build_curved(idx, mass_, warp_, grid_), dt_, scheme_)).first;
    return it->second;
  }

  RadialSpinor advance(const PartialWaveIndex& idx, const RadialSpinor& w) {
    const Propagator& p = propagator(idx);
    VectorXc v = w.stacked();
    for (int s = 0; s < substeps_; ++s) v = p.step(v);
    return RadialSpinor::from_stacked(v, w.rep);
  }

  SpinorField advance(const SpinorField& f) {
    SpinorField out;
    for (const auto& [idx, rs] : f) out.emplace(idx, advance(idx, rs));
    return out;
  }

 private:
  Real mass_;
  WarpFunction warp_;
  RadialGrid grid_;
  Real dt_;
  Scheme scheme_;
  int substeps_;
  std::map<int, Propagator> cache_;
};

bool single_halfspin(const SpinorField& f) { return f.size() == 1 && f.begin()->first.j2 == 1; }

void check_finite(const SpinorField& f, Real t) {
  for (const auto& [idx, rs] : f)
    if (!finite(rs.plus) || !finite(rs.minus))
      throw BlowUpError("non-finite state in mode " + idx.label() + " at t = " + std::to_string(t), t);
}

std::vector<PartialWaveIndex> pointwise_modes(const SpinorField& u0, int j2max) {
  std::set<PartialWaveIndex> modes;
  int top = 1;
  for (const auto& [idx, rs] : u0) {
    modes.insert(idx);
    top = std::max(top, idx.j2);
  }
  if (j2max <= 0) j2max = top + 4;
  for (const auto& m : enumerate_modes(j2max)) modes.insert(m);
  return {modes.begin(), modes.end()};
}

SpinorField axpy(const SpinorField& x, Complex a, const SpinorField& y) {
  // x + a y over the union of modes
  SpinorField out = x;
  for (const auto& [idx, rs] : y) {
    auto it = out.find(idx);
    if (it == out.end()) {
      out.emplace(idx, RadialSpinor(a * rs.plus, a * rs.minus, rs.rep));
    } else {
      it->second.plus += a * rs.plus;
      it->second.minus += a * rs.minus;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::CrankNicolson ? "crank-nicolson" : "spectral-exponential"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "crank-nicolson") return Scheme::CrankNicolson;
  if (s == "spectral-exponential" || s == "spectral") return Scheme::Spectral;
  throw ConfigurationError("unknown scheme '" + s + "'");
}

void EvolutionConfig::validate() const {
  if (!(dt > 0)) throw ConfigurationError("evolution: dt must be positive");
  if (!(T >= dt)) throw ConfigurationError("evolution: T must be at least dt");
  if (stride < 1) throw ConfigurationError("evolution: stride must be >= 1");
  const Real ratio = T / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ConfigurationError("evolution: T must be a whole number of steps");
}

int EvolutionConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

SpectralDecomposition::SpectralDecomposition(const RadialOperator& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(h.dense());
  if (es.info() != Eigen::Success) throw ConfigurationError("spectral decomposition failed");
  energies = es.eigenvalues();
  vectors = es.eigenvectors();
}

VectorXc SpectralDecomposition::propagate(const VectorXc& psi, Real t) const {
  VectorXc c = vectors.transpose() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -t * energies[i]);
  return vectors * c;
}

Propagator::Propagator(const RadialOperator& h, Real dt, Scheme scheme) : scheme_(scheme), dt_(dt) {
  if (scheme == Scheme::Spectral) {
    eig_ = std::make_shared<const SpectralDecomposition>(h);
    phases_.resize(eig_->energies.size());
    for (Eigen::Index i = 0; i < phases_.size(); ++i) phases_[i] = std::polar(1.0, -dt * eig_->energies[i]);
    return;
  }
  const SparseXc hc = h.matrix.cast<Complex>();
  SparseXc id(h.dim(), h.dim());
  id.setIdentity();
  const Complex half = kI * (0.5 * dt);
  const SparseXc a = id + half * hc;
  rhs_ = id - half * hc;
  lu_ = std::make_shared<Eigen::SparseLU<SparseXc>>();
  lu_->analyzePattern(a);
  lu_->factorize(a);
  // I + i dt/2 H is invertible for Hermitian H.
  if (lu_->info() != Eigen::Success) throw ConfigurationError("Crank-Nicolson factorization failed");
}

Propagator::Propagator(std::shared_ptr<const SpectralDecomposition> eig, Real dt)
    : scheme_(Scheme::Spectral), dt_(dt), eig_(std::move(eig)) {
  phases_.resize(eig_->energies.size());
  for (Eigen::Index i = 0; i < phases_.size(); ++i) phases_[i] = std::polar(1.0, -dt * eig_->energies[i]);
}

VectorXc Propagator::step(const VectorXc& psi) const {
  if (scheme_ == Scheme::Spectral) {
    if (psi.size() != phases_.size()) throw ConfigurationError("propagator: dimension mismatch");
    VectorXc c = eig_->vectors.transpose() * psi;
    c.array() *= phases_.array();
    return eig_->vectors * c;
  }
  if (psi.size() != rhs_.rows()) throw ConfigurationError("propagator: dimension mismatch");
  const VectorXc b = rhs_ * psi;
  return lu_->solve(b);
}

VectorXc step(const RadialOperator& h, const VectorXc& psi, Real dt, Scheme scheme) {
  return Propagator(h, dt, scheme).step(psi);
}

Trajectory evolve_linear(const RadialOperator& h, const VectorXc& psi0, const EvolutionConfig& cfg) {
  cfg.validate();
  const Propagator p(h, cfg.dt, cfg.scheme);
  const int steps = cfg.steps();
  Trajectory traj;
  VectorXc psi = psi0;
  traj.times.push_back(0.0);
  traj.states.push_back(psi);
  for (int n = 1; n <= steps; ++n) {
    psi = p.step(psi);
    if (n % cfg.stride == 0 || n == steps) {
      traj.times.push_back(n * cfg.dt);
      traj.states.push_back(psi);
    }
  }
  return traj;
}

FieldTrajectory evolve_linear(const SpinorField& u0, Real mass, const WarpFunction& warp, const RadialGrid& grid,
                              const EvolutionConfig& cfg) {
  cfg.validate();
  FieldStepper stepper(mass, warp, grid, cfg.dt, cfg.scheme);
  const int steps = cfg.steps();
  FieldTrajectory traj;
  SpinorField u = u0;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  for (int n = 1; n <= steps; ++n) {
    u = stepper.advance(u);
    if (n % cfg.stride == 0 || n == steps) {
      traj.times.push_back(n * cfg.dt);
      traj.states.push_back(u);
    }
  }
  return traj;
}

std::vector<Real> duhamel_residual(const RadialOperator& h0, const SparseXr& v, const Trajectory& traj) {
  const std::size_t ns = traj.states.size();
  if (ns == 0) return {};
  if (v.rows() != h0.dim() || traj.states.front().size() != h0.dim())
    throw ConfigurationError("duhamel_residual: mismatched grids");
  const Real delta = ns > 1 ? traj.times[1] - traj.times[0] : 0.0;
  for (std::size_t n = 1; n < ns; ++n)
    if (std::abs(traj.times[n] - traj.times[n - 1] - delta) > 1e-9 * delta)
      throw ConfigurationError("duhamel_residual: samples must be uniform in time");

  const SpectralDecomposition eig(h0);
  const MatrixXr& q = eig.vectors;
  VectorXc step_phase(eig.energies.size());
  for (Eigen::Index i = 0; i < step_phase.size(); ++i) step_phase[i] = std::polar(1.0, -delta * eig.energies[i]);

  const VectorXc a0 = q.transpose() * traj.states[0];
  VectorXc free = a0;
  VectorXc integral = VectorXc::Zero(a0.size());
  VectorXc b_prev = q.transpose() * (v * traj.states[0]);
  std::vector<Real> out;
  out.reserve(ns);
  const Real dr = h0.grid.dr();
  out.push_back(std::sqrt((q.transpose() * traj.states[0] - a0).squaredNorm() * dr));
  for (std::size_t n = 1; n < ns; ++n) {
    const VectorXc b = q.transpose() * (v * traj.states[n]);
    integral = (step_phase.array() * (integral + 0.5 * delta * b_prev).array()).matrix() + 0.5 * delta * b;
    free = (step_phase.array() * free.array()).matrix();
    const VectorXc an = q.transpose() * traj.states[n];
    out.push_back(std::sqrt((an - free + kI * integral).squaredNorm() * dr));
    b_prev = b;
  }
  return out;
}

FieldTrajectory evolve_nonlinear(const SpinorField& u0, Real mass, const WarpFunction& warp, const RadialGrid& grid,
                                 const EvolutionConfig& cfg, const Nonlinearity& nl, const NonlinearOptions& opt) {
  cfg.validate();
  const VectorXr phi = phi_on(warp, grid);
  const int steps = cfg.steps();
  FieldStepper half(mass, warp, grid, 0.5 * cfg.dt, cfg.scheme);
  const bool fast = opt.allow_fast_path && single_halfspin(u0);

  std::unique_ptr<BasisTable> table;
  SpinorField u = u0;
  if (!fast) {
    const auto modes = pointwise_modes(u0, opt.j2max);
    int j2max = 1;
    for (const auto& m : modes) j2max = std::max(j2max, m.j2);
    table = std::make_unique<BasisTable>(modes, opt.degree > 0 ? opt.degree : j2max + 6);
    for (const auto& m : modes)
      if (!u.count(m)) u.emplace(m, RadialSpinor::zero(grid.size()));
  }

  FieldTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  for (int n = 1; n <= steps; ++n) {
    u = half.advance(u);
    if (fast) {
      auto& [idx, rs] = *u.begin();
      rs = halfspin_phase_step(idx, rs, cfg.dt, nl, phi);
    } else {
      u = nonlinear_phase_step(u, cfg.dt, nl, *table, phi);
    }
    u = half.advance(u);
    check_finite(u, n * cfg.dt);
    if (n % cfg.stride == 0 || n == steps) {
      traj.times.push_back(n * cfg.dt);
      traj.states.push_back(u);
    }
  }
  return traj;
}

Real max_distance(const FieldTrajectory& a, const FieldTrajectory& b, const RadialGrid& grid) {
  if (a.states.size() != b.states.size()) throw ConfigurationError("max_distance: sample mismatch");
  Real worst = 0.0;
  for (std::size_t n = 0; n < a.states.size(); ++n)
    worst = std::max(worst, l2_norm(axpy(a.states[n], -1.0, b.states[n]), grid));
  return worst;
}

PicardResult picard_solve(const SpinorField& u0, Real mass, const WarpFunction& warp, const RadialGrid& grid,
                          const Nonlinearity& nl, Real T, Real tol, const PicardOptions& opt) {
  EvolutionConfig cfg{opt.dt, T, 1, opt.scheme};
  cfg.validate();
  const int steps = cfg.steps();
  const VectorXr phi = phi_on(warp, grid);
  const MixedNormSpec metric = MixedNormSpec::make(opt.p, opt.q, opt.family, T);

  // Linear part of one time step; with Crank-Nicolson two half steps, as
  // in the Strang integrator.
  const bool cn = opt.scheme == Scheme::CrankNicolson;
  FieldStepper stepper(mass, warp, grid, cn ? 0.5 * opt.dt : opt.dt, opt.scheme, cn ? 2 : 1);
  const bool fast = opt.nonlinear.allow_fast_path && single_halfspin(u0);

  SpinorField start = u0;
  std::unique_ptr<BasisTable> table;
  if (!fast) {
    const auto modes = pointwise_modes(u0, opt.nonlinear.j2max);
    int j2max = 1;
    for (const auto& m : modes) j2max = std::max(j2max, m.j2);
    table = std::make_unique<BasisTable>(modes, opt.nonlinear.degree > 0 ? opt.nonlinear.degree : j2max + 6);
    for (const auto& m : modes)
      if (!start.count(m)) start.emplace(m, RadialSpinor::zero(grid.size()));
  }
  auto nonlinear = [&](const SpinorField& v) {
    if (fast) {
      SpinorField out;
      const auto& [idx, rs] = *v.begin();
      out.emplace(idx, halfspin_nonlinear_term(idx, rs, nl, phi));
      return out;
    }
    return nonlinear_term(v, nl, *table, phi);
  };

  std::vector<Real> times(steps + 1);
  for (int n = 0; n <= steps; ++n) times[n] = n * opt.dt;
  std::vector<SpinorField> linear(steps + 1);
  linear[0] = start;
  for (int n = 1; n <= steps; ++n) linear[n] = stepper.advance(linear[n - 1]);

  const Real scale = l2_norm(start, grid);
  PicardResult res;
  std::vector<SpinorField> current = linear;
  int bad = 0;
  for (int k = 1; k <= opt.max_iterations; ++k) {
    std::vector<SpinorField> next(steps + 1);
    SpinorField f_prev = nonlinear(current[0]);
    SpinorField integral;
    for (const auto& [idx, rs] : start) integral.emplace(idx, RadialSpinor::zero(grid.size()));
    next[0] = linear[0];
    for (int n = 1; n <= steps; ++n) {
      const SpinorField f = nonlinear(current[n]);
      integral = axpy(stepper.advance(axpy(integral, 0.5 * opt.dt, f_prev)), 0.5 * opt.dt, f);
      next[n] = axpy(linear[n], -kI, integral);
      check_finite(next[n], times[n]);
      f_prev = f;
    }

    FieldTrajectory diff{times, {}};
    Real sup = 0.0;
    for (int n = 0; n <= steps; ++n) {
      diff.states.push_back(axpy(next[n], -1.0, current[n]));
      sup = std::max(sup, l2_norm(diff.states.back(), grid));
    }
    const Real d = sup + strichartz_functional(diff, metric, warp, grid);
    if (!res.distances.empty() && res.distances.back() > 0) {
      const Real ratio = d / res.distances.back();
      res.ratios.push_back(ratio);
      bad = ratio >= 1.0 ? bad + 1 : 0;
    }
    res.distances.push_back(d);
    current = std::move(next);
    res.iterations = k;
    if (d <= tol * scale) {
      res.solution = {times, current};
      res.converged = true;
      return res;
    }
    if (bad >= 3) {
      if (!opt.throw_on_failure) return res;
      throw NoContractionError("Picard iteration does not contract on T = " + std::to_string(T));
    }
  }
  if (!opt.throw_on_failure) return res;
  throw NoContractionError("Picard iteration budget exhausted on T = " + std::to_string(T));
}

}  // namespace dwarp
