#include "dwarp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dwarp {
namespace {

Real bracket(int n) { return std::sqrt(1.0 + Real(n) * n); }

std::mt19937_64 member_rng(std::uint64_t seed, int n, int member, std::uint32_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(member), salt};
  return std::mt19937_64(seq);
}

Real uniform(std::mt19937_64& gen, Real lo, Real hi) { return std::uniform_real_distribution<Real>(lo, hi)(gen); }

std::string grid_tag(const RadialGrid& g) {
  std::ostringstream os;
  os << "N=" << g.size() << ",dr=" << g.dr();
  return os.str();
}

void require_assumptions(const ExperimentSpec& spec) {
  if (spec.waive_assumptions) return;
  const auto rep = check_assumptions(spec.warp, spec.grid);
  if (rep.passed) return;
  std::string msg = "warp '" + spec.warp.name + "' fails the standing assumptions";
  for (const auto& d : rep.diagnostics) msg += "; " + d;
  throw ConfigurationError(msg);
}

void add_row(Table* sink, std::vector<Cell> row) {
  if (sink) sink->rows.push_back(std::move(row));
}

void set_columns(Table* sink, std::vector<std::string> cols) {
  if (sink) {
    sink->columns = std::move(cols);
    sink->rows.clear();
  }
}

// r exp(-(r - r0)^2 / s^2) on both components, with complex weights.
struct Bump {
  PartialWaveIndex mode;
  Real r0 = 0, width = 1;
  Complex a = 1, b = 0;

  RadialSpinor on(const RadialGrid& grid) const {
    RadialSpinor w = RadialSpinor::zero(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      const Real r = grid.node(i);
      const Real x = (r - r0) / width;
      const Real f = r * std::exp(-x * x);
      w.plus[i] = a * f;
      w.minus[i] = b * f;
    }
    return w;
  }
};

Bump draw_bump(std::mt19937_64& gen, const std::vector<PartialWaveIndex>& modes, const StrichartzParams& p) {
  Bump bump;
  bump.mode = modes[std::uniform_int_distribution<std::size_t>(0, modes.size() - 1)(gen)];
  bump.r0 = uniform(gen, p.r0_min, p.r0_max);
  bump.width = uniform(gen, p.width_min, p.width_max);
  bump.a = std::polar(1.0, uniform(gen, 0, 2 * kPi));
  bump.b = std::polar(uniform(gen, 0, 1), uniform(gen, 0, 2 * kPi));
  return bump;
}

Real data_norm(const RadialSpinor& w, Real s, const WarpFunction& warp, const RadialGrid& grid) {
  return hs_norm(w, s, warp, grid);
}

std::string pair_label(const NormPair& p) {
  std::ostringstream os;
  os << "(" << p.p << "," << p.q << ")" << (p.family == Family::Massless ? "massless" : "massive");
  return os.str();
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::StrichartzRatio: return "strichartz_ratio";
    case ExperimentKind::PotentialBound: return "potential_bound";
    case ExperimentKind::SigmaContinuity: return "sigma_continuity";
    case ExperimentKind::Duhamel: return "duhamel";
    case ExperimentKind::Invariance: return "invariance";
    case ExperimentKind::Contraction: return "contraction";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::StrichartzRatio, ExperimentKind::PotentialBound, ExperimentKind::SigmaContinuity,
                 ExperimentKind::Duhamel, ExperimentKind::Invariance, ExperimentKind::Contraction})
    if (to_string(k) == s) return k;
  throw ConfigurationError("unknown experiment kind '" + s + "'");
}

Real default_tolerance(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::StrichartzRatio: return 0.1;   // relative refinement change
    case ExperimentKind::PotentialBound: return 0.0;    // exact
    case ExperimentKind::SigmaContinuity: return 1e-12; // |C0 - 1|
    case ExperimentKind::Duhamel: return 5e-6;          // residual at the first dt
    case ExperimentKind::Invariance: return 1e-8;       // leakage / |u0|
    case ExperimentKind::Contraction: return 0.5;       // contraction ratio
  }
  return 0.0;
}

Real ExperimentSpec::effective_tolerance() const { return tolerance > 0 ? tolerance : default_tolerance(kind); }

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void ExperimentResult::check(std::string label, Real value, Real bound, bool upper) {
  const bool ok = std::isfinite(value) && (upper ? value <= bound : value >= bound);
  checks.push_back({std::move(label), value, bound, upper, ok});
}

// ---------------------------------------------------------------------------

std::vector<RatioRecord> run_strichartz_ratio(const ExperimentSpec& spec, Table* sink) {
  const auto& p = spec.strichartz;
  require_assumptions(spec);
  spec.evolution.validate();
  const Real T = spec.evolution.T;
  if (p.pairs.empty()) throw ConfigurationError("strichartz_ratio: no (p,q) pairs");
  for (const auto& pr : p.pairs) MixedNormSpec::make(pr.p, pr.q, pr.family, T);
  if (p.n_min < 0 || p.n_max < p.n_min) throw ConfigurationError("strichartz_ratio: bad n range");
  if (p.ensemble < 1) throw ConfigurationError("strichartz_ratio: ensemble must be >= 1");
  if (!(p.r0_min > 0 && p.r0_max >= p.r0_min && p.width_min > 0 && p.width_max >= p.width_min))
    throw ConfigurationError("strichartz_ratio: bad bump ranges");
  if (p.sample_stride < 1 || spec.evolution.steps() % p.sample_stride != 0)
    throw ConfigurationError("strichartz_ratio: sample_stride must divide the step count");
  const Real reach = p.r0_max + 4 * p.width_max + T + p.margin;
  if (reach > spec.grid.rmax())
    throw ConfigurationError("strichartz_ratio: support + T + margin = " + std::to_string(reach) +
                             " exceeds R_max = " + std::to_string(spec.grid.rmax()));

  set_columns(sink, {"n", "member", "mode", "j", "mj", "k", "p", "q", "family", "mass", "T", "theta", "s", "r0",
                     "width", "functional", "data_norm", "ratio", "raw_ratio", "unweighted_ratio", "refined_ratio",
                     "refinement_change", "grid", "seed"});

  std::vector<Real> masses;
  for (const auto& pr : p.pairs) {
    const Real m = pr.family == Family::Massless ? 0.0 : p.mass;
    if (std::find(masses.begin(), masses.end(), m) == masses.end()) masses.push_back(m);
  }

  EvolutionConfig coarse = spec.evolution;
  coarse.stride = p.sample_stride;
  EvolutionConfig fine = coarse;
  fine.dt = coarse.dt / 2;
  fine.stride = 2 * p.sample_stride;
  const RadialGrid grid = spec.grid;
  const RadialGrid refined = grid.refined();
  const StrichartzOptions sopt{p.n_theta, 8};

  std::vector<RatioRecord> out;
  for (int n = p.n_min; n <= p.n_max; ++n) {
    const auto modes = block_modes(n);
    for (int member = 0; member < p.ensemble; ++member) {
      auto gen = member_rng(spec.seed, n, member, 0x5717u);
      const Bump bump = draw_bump(gen, modes, p);
      const RadialSpinor w0 = bump.on(grid);
      const RadialSpinor w0f = bump.on(refined);
      for (Real mass : masses) {
        const FieldTrajectory traj = evolve_linear({{bump.mode, w0}}, mass, spec.warp, grid, coarse);
        FieldTrajectory traj_f;
        if (p.refine) traj_f = evolve_linear({{bump.mode, w0f}}, mass, spec.warp, refined, fine);
        for (const auto& pr : p.pairs) {
          if ((pr.family == Family::Massless ? 0.0 : p.mass) != mass) continue;
          const MixedNormSpec ms = MixedNormSpec::make(pr.p, pr.q, pr.family, T);
          MixedNormSpec plain = ms;
          plain.weight_exponent = 0;
          RatioRecord rec;
          rec.n = n;
          rec.member = member;
          rec.mode = bump.mode;
          rec.pair = pr;
          rec.mass = mass;
          rec.T = T;
          rec.theta = p.theta;
          rec.s = pr.family == Family::Massless ? 2 / pr.p : 1 / pr.p;
          rec.functional = strichartz_functional(traj, ms, spec.warp, grid, sopt);
          rec.data_norm = data_norm(w0, rec.s, spec.warp, grid);
          rec.raw_ratio = rec.functional / rec.data_norm;
          rec.ratio = rec.raw_ratio / std::pow(bracket(n), p.theta);
          rec.unweighted_ratio = strichartz_functional(traj, plain, spec.warp, grid, sopt) / rec.data_norm;
          if (p.refine)
            rec.refined_ratio = strichartz_functional(traj_f, ms, spec.warp, refined, sopt) /
                                data_norm(w0f, rec.s, spec.warp, refined) / std::pow(bracket(n), p.theta);
          rec.grid_tag = grid_tag(grid);
          rec.seed = spec.seed;
          add_row(sink, {(long long)n, (long long)member, bump.mode.label(), bump.mode.j(), bump.mode.mj(),
                         (long long)bump.mode.k, pr.p, pr.q, to_string(pr.family), mass, T, p.theta, rec.s, bump.r0,
                         bump.width, rec.functional, rec.data_norm, rec.ratio, rec.raw_ratio, rec.unweighted_ratio,
                         rec.refined_ratio, std::abs(rec.refined_ratio / rec.ratio - 1), rec.grid_tag,
                         (long long)spec.seed});
          out.push_back(rec);
        }
      }
    }
  }
  return out;
}

GrowthFit fit_growth(const std::vector<int>& n, const std::vector<Real>& values) {
  if (n.size() != values.size() || n.size() < 2) throw ConfigurationError("fit_growth needs two or more points");
  Eigen::MatrixXd a(n.size(), 2);
  Eigen::VectorXd y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(values[i] > 0)) throw ConfigurationError("fit_growth needs positive values");
    a(i, 0) = std::log(bracket(n[i]));
    a(i, 1) = 1;
    y[i] = std::log(values[i]);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  return {c[0], c[1]};
}

// ---------------------------------------------------------------------------

PotentialReport run_potential_bound(const ExperimentSpec& spec, Table* sink) {
  require_assumptions(spec);
  const int n_max = spec.potential.n_max;
  if (n_max < 0) throw ConfigurationError("potential_bound: n_max must be >= 0");
  set_columns(sink, {"scope", "n", "mode", "k", "norm", "predicted", "bound", "exact"});
  const RadialGrid& grid = spec.grid;
  PotentialReport rep;
  for (int i = 0; i < grid.size(); ++i)
    rep.sup_difference = std::max(rep.sup_difference, std::abs(potential(spec.warp, 1, grid.node(i))));
  const Real c_phi = std::sqrt(2.0) * rep.sup_difference;
  for (int n = 0; n <= n_max; ++n) {
    Real block = 0;
    for (const auto& idx : block_modes(n)) {
      const SparseXr v = potential_matrix(idx, spec.warp, grid);
      Real norm = 0;
      for (int k = 0; k < v.outerSize(); ++k)
        for (SparseXr::InnerIterator it(v, k); it; ++it) norm = std::max(norm, std::abs(it.value()));
      const PotentialRow row{n, idx, norm, std::abs(idx.k) * rep.sup_difference};
      block = std::max(block, norm);
      rep.modes.push_back(row);
      add_row(sink, {std::string("mode"), (long long)n, idx.label(), (long long)idx.k, row.norm, row.predicted,
                     c_phi * bracket(n), (long long)(row.norm == row.predicted)});
    }
    rep.block_norms.push_back(block);
    rep.c_phi = std::max(rep.c_phi, block / bracket(n));
    add_row(sink, {std::string("block"), (long long)n, std::string("P_") + std::to_string(n), (long long)0, block,
                   Real(n + 1) * rep.sup_difference, c_phi * bracket(n), (long long)1});
  }
  return rep;
}

// ---------------------------------------------------------------------------

SigmaConstants run_sigma_continuity(const ExperimentSpec& spec, Table* sink) {
  require_assumptions(spec);
  if (spec.sigma.ensemble < 1) throw ConfigurationError("sigma_continuity: ensemble must be >= 1");
  set_columns(sink, {"member", "r0", "width", "l2_ratio", "h1_ratio"});
  const RadialGrid& grid = spec.grid;
  const Real R = grid.rmax();
  const VectorXr phi = phi_on(spec.warp, grid);
  SigmaConstants c;
  c.c0_min = kInfinity;
  for (int i = 0; i < grid.size(); ++i)
    c.sup_logderiv = std::max(c.sup_logderiv, std::abs(sigma_weight(spec.warp, grid.node(i)).logderiv));
  c.bound = 1 + c.sup_logderiv;
  for (int member = 0; member < spec.sigma.ensemble; ++member) {
    auto gen = member_rng(spec.seed, 0, member, 0x5165u);
    const Real r0 = uniform(gen, 0.5, 0.5 * R);
    const Real width = uniform(gen, 0.3, std::min(1.5, R / 8));
    const Complex a = std::polar(1.0, uniform(gen, 0, 2 * kPi));
    // f on R^3 has w = r f; sigma f on M has w = phi sigma f = r f.
    VectorXc w(grid.size());
    VectorXc g_flat(grid.size());
    VectorXc g_curved(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      const Real r = grid.node(i);
      const Real x = (r - r0) / width;
      const Complex f = a * std::exp(-x * x) * (1.0 + 0.3 * x);
      g_flat[i] = f;
      g_curved[i] = sigma_weight(spec.warp, r).sigma * f;
      w[i] = r * f;
    }
    Real l2_m = 0, l2_e = 0;
    for (int i = 0; i < grid.size(); ++i) {
      l2_m += std::norm(g_curved[i]) * phi[i] * phi[i];
      l2_e += std::norm(g_flat[i]) * grid.node(i) * grid.node(i);
    }
    const Real r_l2 = std::sqrt(l2_m / l2_e);
    const Real r_h1 = hs_norm(VectorXc(phi.cwiseProduct(g_curved)), 1, spec.warp, grid) / hs_norm(w, 1, flat_warp(), grid);
    c.c0 = std::max(c.c0, r_l2);
    c.c0_min = std::min(c.c0_min, r_l2);
    c.c1 = std::max(c.c1, r_h1);
    add_row(sink, {(long long)member, r0, width, r_l2, r_h1});
  }
  return c;
}

// ---------------------------------------------------------------------------

std::vector<DuhamelRow> run_duhamel(const ExperimentSpec& spec, Table* sink) {
  require_assumptions(spec);
  const auto& p = spec.duhamel;
  spec.evolution.validate();
  if (p.k == 0) throw ConfigurationError("duhamel: k must be nonzero");
  if (p.refinements < 1) throw ConfigurationError("duhamel: need at least one refinement");
  set_columns(sink, {"dt", "residual", "order"});
  const PartialWaveIndex idx = PartialWaveIndex::make(2 * std::abs(p.k) - 1, 1, p.k);
  const RadialGrid& grid = spec.grid;
  const RadialOperator h0 = build_flat_reference(idx, p.mass, grid);
  const SparseXr v = potential_matrix(idx, spec.warp, grid);
  RadialOperator h = h0;
  h.matrix = h0.matrix + v;
  auto eig = std::make_shared<const SpectralDecomposition>(h);

  RadialSpinor w0 = RadialSpinor::zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const Real r = grid.node(i);
    const Real x = (r - p.center) / p.width;
    w0.plus[i] = r * std::exp(-x * x);
    w0.minus[i] = Complex(0, 0.5) * r * std::exp(-x * x);
  }
  VectorXc psi0 = w0.stacked();
  psi0 /= l2_norm(psi0, grid);

  std::vector<DuhamelRow> rows;
  Real dt = spec.evolution.dt;
  for (int level = 0; level <= p.refinements; ++level, dt /= 2) {
    EvolutionConfig cfg{dt, spec.evolution.T, 1, Scheme::Spectral};
    cfg.validate();
    const Propagator prop(eig, dt);
    Trajectory traj;
    VectorXc psi = psi0;
    traj.times.push_back(0);
    traj.states.push_back(psi);
    for (int n = 1; n <= cfg.steps(); ++n) {
      psi = prop.step(psi);
      traj.times.push_back(n * dt);
      traj.states.push_back(psi);
    }
    const auto res = duhamel_residual(h0, v, traj);
    const Real worst = *std::max_element(res.begin(), res.end());
    const Real order = rows.empty() ? kNaN : std::log2(rows.back().residual / worst);
    rows.push_back({dt, worst});
    add_row(sink, {dt, worst, order});
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<LeakageSeries> run_invariance(const ExperimentSpec& spec, Table* sink) {
  require_assumptions(spec);
  const auto& p = spec.invariance;
  spec.evolution.validate();
  set_columns(sink, {"case", "mode", "density", "power", "t", "leakage_relative"});
  const RadialGrid& grid = spec.grid;
  const PartialWaveIndex half = PartialWaveIndex::make(1, p.m2, p.k);
  const Real center = std::min(3.0, 0.3 * grid.rmax());
  auto data = [&](const PartialWaveIndex& idx) {
    RadialSpinor w = RadialSpinor::zero(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      const Real r = grid.node(i);
      const Real x = (r - center) / 0.8;
      w.plus[i] = p.amplitude * r * std::exp(-x * x);
      w.minus[i] = Complex(0.3, 0.4) * p.amplitude * r * std::exp(-x * x) * x;
    }
    return SpinorField{{idx, w}};
  };
  NonlinearOptions opt;
  opt.j2max = p.j2max;
  opt.allow_fast_path = false;

  std::vector<LeakageSeries> out;
  auto record = [&](LeakageSeries s, const FieldTrajectory& traj, Real norm0) {
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const Real l = leakage(traj.states[n], {s.mode}, grid) / norm0;
      s.times.push_back(traj.times[n]);
      s.relative.push_back(l);
      s.max_relative = std::max(s.max_relative, l);
      add_row(sink, {s.label, s.mode.label(), s.power == 0 ? std::string("none") : to_string(s.density), s.power,
                     traj.times[n], l});
    }
    out.push_back(std::move(s));
  };

  const SpinorField u0 = data(half);
  const Real norm0 = l2_norm(u0, grid);
  {
    SpinorField padded = u0;
    for (const auto& m : enumerate_modes(p.j2max))
      if (!padded.count(m)) padded.emplace(m, RadialSpinor::zero(grid.size()));
    LeakageSeries s;
    s.label = "linear";
    s.mode = half;
    record(std::move(s), evolve_linear(padded, p.mass, spec.warp, grid, spec.evolution), norm0);
  }
  for (DensityKind kind : p.densities)
    for (Real power : p.powers) {
      LeakageSeries s;
      s.label = "halfspin";
      s.mode = half;
      s.density = kind;
      s.power = power;
      record(std::move(s), evolve_nonlinear(u0, p.mass, spec.warp, grid, spec.evolution, {power, kind}, opt), norm0);
    }
  if (p.counterexample) {
    const PartialWaveIndex three = PartialWaveIndex::make(3, p.m2, p.k > 0 ? 2 : -2);
    const SpinorField v0 = data(three);
    LeakageSeries s;
    s.label = "counterexample";
    s.mode = three;
    s.density = DensityKind::Charge;
    s.power = 2;
    s.counterexample = true;
    record(std::move(s), evolve_nonlinear(v0, p.mass, spec.warp, grid, spec.evolution, {2, DensityKind::Charge}, opt),
           l2_norm(v0, grid));
  }
  return out;
}

// ---------------------------------------------------------------------------

ContractionReport run_contraction(const ExperimentSpec& spec, Table* sink) {
  require_assumptions(spec);
  const auto& p = spec.contraction;
  const Real dt = spec.evolution.dt;
  if (p.radii.empty()) throw ConfigurationError("contraction: empty radius ladder");
  MixedNormSpec::make(p.metric.p, p.metric.q, p.metric.family, p.T_cap);
  const int cap_steps = static_cast<int>(std::llround(p.T_cap / dt));
  if (cap_steps < 4 || std::abs(cap_steps * dt - p.T_cap) > 1e-9 * p.T_cap)
    throw ConfigurationError("contraction: T_cap must be a multiple of dt with at least 4 steps");
  set_columns(sink, {"radius", "amplitude", "T", "converged", "iterations", "max_ratio", "first_ratio"});

  const RadialGrid& grid = spec.grid;
  const PartialWaveIndex idx{1, 1, 1};
  const Real center = std::min(3.0, 0.3 * grid.rmax());
  RadialSpinor shape = RadialSpinor::zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const Real r = grid.node(i);
    const Real x = (r - center) / 0.7;
    shape.plus[i] = r * std::exp(-x * x);
    shape.minus[i] = 0.5 * r * std::exp(-x * x);
  }
  const Real shape_size = hab_norm({{idx, shape}}, p.a, p.b, spec.warp, grid);
  const Nonlinearity nl{p.power, p.density};
  PicardOptions opt;
  opt.dt = dt;
  opt.scheme = spec.evolution.scheme;
  opt.p = p.metric.p;
  opt.q = p.metric.q;
  opt.family = p.metric.family;
  opt.throw_on_failure = false;

  auto field = [&](Real amp) {
    RadialSpinor w = shape;
    w.plus *= amp;
    w.minus *= amp;
    return SpinorField{{idx, w}};
  };
  struct Attempt {
    bool ok;
    Real max_ratio;
    Real first_ratio;
    PicardResult res;
  };
  auto attempt = [&](Real amp, Real radius, int steps) {
    Attempt a{false, kNaN, kNaN, {}};
    try {
      a.res = picard_solve(field(amp), p.mass, spec.warp, grid, nl, steps * dt, p.tol, opt);
    } catch (const BlowUpError&) {
      a.res.converged = false;
    }
    if (!a.res.ratios.empty()) {
      a.max_ratio = *std::max_element(a.res.ratios.begin(), a.res.ratios.end());
      a.first_ratio = a.res.ratios.front();
    } else if (a.res.converged) {
      // The first correction was already below tol.
      a.max_ratio = 0;
      a.first_ratio = 0;
    }
    a.ok = a.res.converged && !(a.max_ratio > 0.5);
    add_row(sink, {radius, amp, steps * dt, (long long)a.res.converged, (long long)a.res.iterations, a.max_ratio,
                   a.first_ratio});
    return a;
  };

  std::vector<Real> radii = p.radii;
  std::sort(radii.begin(), radii.end());
  ContractionReport rep;
  for (Real radius : radii) {
    ContractionPoint pt;
    pt.radius = radius;
    pt.amplitude = radius / shape_size;
    int lo = 0, hi = cap_steps;
    if (attempt(pt.amplitude, radius, cap_steps).ok) {
      lo = cap_steps;
      pt.capped = true;
    } else {
      for (int s = 0; s < p.bisection_steps && hi - lo > 1; ++s) {
        const int mid = (lo + hi) / 2;
        (attempt(pt.amplitude, radius, mid).ok ? lo : hi) = mid;
      }
    }
    pt.t_star = lo * dt;
    const int half = std::max(2, cap_steps / 2);
    pt.first_ratio_T = attempt(pt.amplitude, radius, half).first_ratio;
    pt.first_ratio_half = attempt(pt.amplitude, radius, std::max(1, half / 2)).first_ratio;
    rep.points.push_back(pt);
  }

  const ContractionPoint& small = rep.points.front();
  if (small.t_star > 0) {
    const int steps = static_cast<int>(std::llround(small.t_star / dt));
    const Attempt a = attempt(small.amplitude, small.radius, steps);
    rep.small_data_max_ratio = a.max_ratio;
    if (a.res.converged) {
      const EvolutionConfig cfg{dt, steps * dt, 1, spec.evolution.scheme};
      const auto strang = evolve_nonlinear(field(small.amplitude), p.mass, spec.warp, grid, cfg, nl);
      rep.agreement = max_distance(a.res.solution, strang, grid);
      rep.agreement_T = steps * dt;
      rep.agreement_bound = std::max(p.agreement_floor, 5 * dt * dt * rep.agreement_T);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

void run_experiment(const ExperimentSpec& spec, ExperimentResult& out) {
  out.name = spec.name;
  out.kind = spec.kind;
  out.checks.clear();
  out.headline.clear();
  const Real tol = spec.effective_tolerance();
  switch (spec.kind) {
    case ExperimentKind::StrichartzRatio: {
      const auto recs = run_strichartz_ratio(spec, &out.table);
      const auto& p = spec.strichartz;
      const AssumptionReport ar = check_assumptions(spec.warp, spec.grid);
      for (const auto& pr : p.pairs) {
        const std::string tag = pair_label(pr);
        long long bad = 0;
        Real worst_change = 0, max_ratio = 0, min_gain = kInfinity;
        std::map<int, Real> max_raw;
        for (const auto& r : recs) {
          if (r.pair.p != pr.p || r.pair.q != pr.q || r.pair.family != pr.family) continue;
          if (!std::isfinite(r.ratio) || r.ratio < 0) ++bad;
          if (p.refine) worst_change = std::max(worst_change, std::abs(r.refined_ratio / r.ratio - 1));
          max_ratio = std::max(max_ratio, r.ratio);
          min_gain = std::min(min_gain, r.ratio * std::pow(bracket(r.n), r.theta) / r.unweighted_ratio);
          max_raw[r.n] = std::max(max_raw[r.n], r.raw_ratio);
        }
        out.check(tag + " non-finite ratios", Real(bad), 0);
        out.headline[tag + " max_ratio"] = max_ratio;
        if (p.refine) out.check(tag + " refinement change", worst_change, tol);
        std::vector<int> ns;
        std::vector<Real> vals;
        for (const auto& [n, v] : max_raw)
          if (n >= p.fit_n_min) {
            ns.push_back(n);
            vals.push_back(v);
          }
        if (ns.size() >= 2) out.check(tag + " growth exponent", fit_growth(ns, vals).exponent, p.exponent_bound);
        // phi/r >= 1 makes the weight a gain: the weighted ratio is the larger one.
        if (ar.inf_phi_over_r >= 1 - 1e-12) out.check(tag + " weighted / unweighted", min_gain, 1 - 1e-12, false);
        else out.headline[tag + " weighted / unweighted min"] = min_gain;
      }
      break;
    }
    case ExperimentKind::PotentialBound: {
      const auto rep = run_potential_bound(spec, &out.table);
      long long mismatched = 0;
      for (const auto& m : rep.modes)
        if (std::abs(m.norm - m.predicted) > tol) ++mismatched;
      out.check("modes with norm != |k| sup|1/phi - 1/r|", Real(mismatched), 0);
      const Real c_phi = std::sqrt(2.0) * rep.sup_difference;
      Real worst = 0;
      for (std::size_t n = 0; n < rep.block_norms.size(); ++n)
        worst = std::max(worst, rep.block_norms[n] / (c_phi * bracket(int(n))));
      out.check("max_n block norm / (C_phi <n>)", worst, 1 + 1e-12);
      out.headline["sup|1/phi-1/r|"] = rep.sup_difference;
      out.headline["C_phi"] = c_phi;
      out.headline["C_phi_empirical"] = rep.c_phi;
      break;
    }
    case ExperimentKind::SigmaContinuity: {
      const auto c = run_sigma_continuity(spec, &out.table);
      out.check("|C0 - 1|", std::max(std::abs(c.c0 - 1), std::abs(c.c0_min - 1)), tol);
      out.check("C1 / (1 + sup|sigma'/sigma|)", c.c1 / c.bound, 1);
      out.headline["C0"] = c.c0;
      out.headline["C1"] = c.c1;
      out.headline["sup|sigma'/sigma|"] = c.sup_logderiv;
      break;
    }
    case ExperimentKind::Duhamel: {
      const auto rows = run_duhamel(spec, &out.table);
      out.check("residual at dt", rows.front().residual, tol);
      Real min_order = kInfinity;
      for (std::size_t i = 1; i < rows.size(); ++i)
        min_order = std::min(min_order, std::log2(rows[i - 1].residual / rows[i].residual));
      out.check("min order", min_order, spec.duhamel.min_order, false);
      out.headline["residual"] = rows.front().residual;
      out.headline["order"] = min_order;
      break;
    }
    case ExperimentKind::Invariance: {
      const auto series = run_invariance(spec, &out.table);
      for (const auto& s : series) {
        const std::string tag = s.label + (s.power == 0 ? "" : " " + to_string(s.density) + " r=" + [&] {
          std::ostringstream os;
          os << s.power;
          return os.str();
        }());
        if (s.counterexample)
          out.check(tag + " leakage", s.max_relative, spec.invariance.counterexample_bound, false);
        else if (s.power == 0)
          out.check(tag + " leakage", s.max_relative, 1e-12);
        else
          out.check(tag + " leakage", s.max_relative, tol);
        out.headline[tag] = s.max_relative;
      }
      break;
    }
    case ExperimentKind::Contraction: {
      const auto rep = run_contraction(spec, &out.table);
      out.check("small-data max ratio", rep.small_data_max_ratio, tol);
      long long up = 0, ratio_up = 0;
      for (std::size_t i = 1; i < rep.points.size(); ++i)
        if (rep.points[i].t_star > rep.points[i - 1].t_star) ++up;
      for (const auto& pt : rep.points) {
        if (pt.first_ratio_half > pt.first_ratio_T) ++ratio_up;
        out.headline["T*(R=" + [&] {
          std::ostringstream os;
          os << pt.radius;
          return os.str();
        }() + ")"] = pt.t_star;
      }
      out.check("T*(R) increases", Real(up), 0);
      out.check("ratio grows when T is halved", Real(ratio_up), 0);
      out.check("Picard vs Strang distance", rep.agreement, rep.agreement_bound);
      break;
    }
  }
}

}  // namespace dwarp
