// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Run a subset with e.g. `acceptance 2 7`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "dwarp/clifford.hpp"
#include "dwarp/config.hpp"
#include "dwarp/csv.hpp"
#include "dwarp/evolve.hpp"
#include "dwarp/experiments.hpp"
#include "dwarp/norms.hpp"
#include "dwarp/radial_ops.hpp"

using namespace dwarp;

namespace {

// Pinned tolerances.
constexpr Real kC1RuntimeS = 1.0;
constexpr Real kC2Unitarity = 1e-10;
constexpr Real kC2RuntimePerWarpS = 60.0;
constexpr Real kC3Isometry = 1e-8;
constexpr Real kC3Order = 1.8;
constexpr Real kC4Residual = 1e-6;
constexpr Real kC6Refinement = 0.10;
constexpr Real kC6Exponent = 1.3;
constexpr int kC6Ensemble = 50;
constexpr Real kC6RuntimeS = 30 * 60.0;
constexpr Real kC7Residual = 5e-6;
constexpr Real kC7Order = 1.8;
constexpr Real kC8Leakage = 1e-8;
constexpr Real kC8Counterexample = 1e-4;
constexpr Real kC9Ratio = 0.5;
constexpr Real kC9AgreementFloor = 1e-6;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

Real seconds_since(Clock::time_point t0) { return std::chrono::duration<Real>(Clock::now() - t0).count(); }

Real max_abs(const MatrixXr& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

RadialSpinor bump(const RadialGrid& grid, Real center, Real width, Complex a, Complex b) {
  RadialSpinor w = RadialSpinor::zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const Real r = grid.node(i);
    const Real x = (r - center) / width;
    w.plus[i] = a * r * std::exp(-x * x);
    w.minus[i] = b * r * std::exp(-x * x) * (1 + 0.5 * x);
  }
  return w;
}

std::string describe_checks(const ExperimentResult& res) {
  std::ostringstream os;
  for (const auto& c : res.checks)
    if (!c.passed) os << " [" << c.name << " = " << c.value << (c.upper ? " > " : " < ") << c.bound << "]";
  return os.str();
}

// 1 --------------------------------------------------------------------------
void c1(Outcome& o) {
  const auto t0 = Clock::now();
  const auto& s = standard_matrices();
  const SpinMatrix id = SpinMatrix::Identity();
  int bad = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      if (anticommutator(s.gamma[mu], s.gamma[nu]) != SpinMatrix(2 * minkowski(mu, nu) * id)) ++bad;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const PauliMatrix sij = anticommutator(s.sigma[i + 1], s.sigma[j + 1]);
      if (sij != PauliMatrix((i == j ? 2.0 : 0.0) * PauliMatrix::Identity())) ++bad;
      if (anticommutator(s.alpha[i], s.alpha[j]) != SpinMatrix((i == j ? 2.0 : 0.0) * id)) ++bad;
    }
    if (anticommutator(s.alpha[i], s.beta) != SpinMatrix::Zero()) ++bad;
  }
  if (s.beta * s.beta != id) ++bad;
  // sigma_1 sigma_2 = i sigma_3, cyclically.
  const Complex I(0, 1);
  for (int i = 0; i < 3; ++i)
    if (s.sigma[1 + i] * s.sigma[1 + (i + 1) % 3] != PauliMatrix(I * s.sigma[1 + (i + 2) % 3])) ++bad;
  o.require(bad == 0, std::to_string(bad) + " algebra identities");

  const SpinMatrix& u = permutation_rotation();
  int conj_bad = 0;
  if (u * u.adjoint() != id) ++conj_bad;
  if (u * s.alpha[0] * u.adjoint() != s.alpha[2]) ++conj_bad;
  if (u * s.alpha[1] * u.adjoint() != s.alpha[0]) ++conj_bad;
  if (u * s.alpha[2] * u.adjoint() != s.alpha[1]) ++conj_bad;
  if (u * s.beta * u.adjoint() != s.beta) ++conj_bad;
  o.require(conj_bad == 0, std::to_string(conj_bad) + " conjugations");

  std::vector<std::array<Real, 3>> samples;
  for (Real r : {0.3, 1.0, 2.5})
    for (Real th : {0.4, 1.3, 2.7}) samples.push_back({r, th, 0.0});
  Real block_dev = 0;
  for (const auto& w : {flat_warp(), hyperbolic_warp(), conical_warp()}) {
    const auto chk = check_block_structure(w, 0.7, samples);
    o.require(chk.passed, "block structure on " + w.name);
    block_dev = std::max(block_dev, chk.max_deviation);
  }
  const Real t = seconds_since(t0);
  o.require(t < kC1RuntimeS, "runtime");
  o.detail << "identity mismatches " << bad + conj_bad << ", block deviation " << block_dev << ", " << t << " s";
}

// 2 --------------------------------------------------------------------------
void c2(Outcome& o) {
  const EvolutionConfig cfg{0.01, 5.0, 1, Scheme::CrankNicolson};
  for (const auto& warp : builtin_warps()) {
    const auto t0 = Clock::now();
    // The sphere warp closes at pi; keep the grid inside it.
    const RadialGrid grid = warp.name == "sine" ? RadialGrid(1024, 3.1 / 1024) : RadialGrid(1024, 0.02);
    Real worst = 0;
    for (int ak = 1; ak <= 9; ++ak)
      for (int k : {-ak, ak}) {
        const auto idx = PartialWaveIndex::make(2 * ak - 1, 1, k);
        const RadialOperator h = build_curved(idx, 1.0, warp, grid);
        const RadialSpinor w = bump(grid, 0.5 * grid.rmax(), 0.1 * grid.rmax(), {1, 0.2}, {0.3, -0.7});
        const Trajectory traj = evolve_linear(h, w.stacked(), cfg);
        const Real n0 = l2_norm(traj.states.front(), grid);
        for (const auto& st : traj.states) worst = std::max(worst, std::abs(l2_norm(st, grid) / n0 - 1));
      }
    const Real t = seconds_since(t0);
    o.require(worst <= kC2Unitarity, warp.name + " unitarity");
    o.require(t < kC2RuntimePerWarpS, warp.name + " runtime");
    o.detail << warp.name << ": " << worst << " (" << t << " s); ";
  }
}

// 3 --------------------------------------------------------------------------
void c3(Outcome& o) {
  // (a) curved == sigma-flat == flat + V, bitwise.
  const RadialGrid grid(300, 0.04);
  Real exact_dev = 0;
  for (const auto& w : {hyperbolic_warp(), conical_warp()})
    for (int k : {-4, -1, 1, 3}) {
      const auto idx = PartialWaveIndex::make(2 * std::abs(k) - 1, 1, k);
      const SparseXr flat_plus_v = build_flat_reference(idx, 0.7, grid).matrix + potential_matrix(idx, w, grid);
      const SparseXr sigma = build_sigma_flat(idx, 0.7, w, grid).matrix;
      exact_dev = std::max(exact_dev, max_abs(MatrixXr(flat_plus_v - sigma)));
      exact_dev = std::max(exact_dev, max_abs(MatrixXr(build_curved(idx, 0.7, w, grid).matrix - sigma)));
    }
  o.require(exact_dev == 0.0, "(a) exact identity");

  // (b) sigma^{2/q} isometry on 20 random fields.
  const RadialGrid g2(150, 0.04);
  const auto modes = enumerate_modes(3);
  const BasisTable table(modes, 10);
  std::mt19937_64 gen(2024);
  std::normal_distribution<Real> nd;
  Real iso_dev = 0;
  for (int member = 0; member < 20; ++member) {
    SpinorField f;
    for (const auto& idx : modes)
      f.emplace(idx, bump(g2, 1.5 + 0.3 * nd(gen), 0.7, {nd(gen), nd(gen)}, {nd(gen), nd(gen)}));
    for (const auto& warp : {hyperbolic_warp(), conical_warp()}) {
      const PointwiseField euclid = field_values(f, Measure::Euclidean, warp, g2, table);
      const VectorXr r2 = radial_measure(Measure::Euclidean, warp, g2);
      const VectorXr phi2 = radial_measure(Measure::Manifold, warp, g2);
      for (Real q : {2.0, 4.0, 6.0, 12.0}) {
        PointwiseField on_m = euclid;
        for (int i = 0; i < g2.size(); ++i) on_m.values.row(i) *= std::pow(sigma_weight(warp, g2.node(i)).sigma, 2 / q);
        const Real lhs = lq_norm(on_m, q, phi2, table.quadrature());
        const Real rhs = lq_norm(euclid, q, r2, table.quadrature());
        iso_dev = std::max(iso_dev, std::abs(lhs / rhs - 1));
      }
    }
  }
  o.require(iso_dev <= kC3Isometry, "(b) isometry");

  // (c) conjugation residual over three refinements.
  Real min_order = kInfinity;
  Real prev = 0;
  for (int n : {200, 400, 800, 1600}) {
    const RadialGrid gr(n, 10.0 / n);
    RadialSpinor g = RadialSpinor::zero(gr.size());
    for (int i = 0; i < gr.size(); ++i) {
      const Real x = (gr.node(i) - 5.0) / 0.8;
      g.plus[i] = std::exp(-x * x);
      g.minus[i] = Complex(0.2, 0.6) * x * std::exp(-x * x);
    }
    const Real res = conjugation_residual(PartialWaveIndex::make(5, -1, -3), 1.0, hyperbolic_warp(), gr, g);
    if (prev > 0) min_order = std::min(min_order, std::log2(prev / res));
    prev = res;
  }
  o.require(min_order >= kC3Order, "(c) order");
  o.detail << "(a) max deviation " << exact_dev << "; (b) max relative " << iso_dev << "; (c) min order " << min_order;
}

// 4 --------------------------------------------------------------------------
void c4(Outcome& o) {
  const int degree = 9 + 4;  // 2 J_max + 4 with J_max = 9/2
  Real worst = 0;
  int count = 0;
  for (int j2 = 1; j2 <= 9; j2 += 2)
    for (int m2 = -j2; m2 <= j2; m2 += 2)
      for (int branch : {-1, 1}) {
        worst = std::max(worst, angular_dirac_eigencheck(j2, m2, branch, degree));
        ++count;
      }
  o.require(worst <= kC4Residual, "residual");
  o.detail << count << " eigenpairs, max residual " << worst;
}

// 5 --------------------------------------------------------------------------
void c5(Outcome& o) {
  for (const auto& warp : {hyperbolic_warp(), conical_warp()}) {
    ExperimentSpec s;
    s.name = "c5";
    s.kind = ExperimentKind::PotentialBound;
    s.warp = warp;
    s.grid = RadialGrid(800, 0.025);
    s.potential.n_max = 16;
    const auto rep = run_potential_bound(s);
    int mismatched = 0;
    for (const auto& row : rep.modes) mismatched += row.norm != row.predicted;
    const Real c_phi = std::sqrt(2.0) * rep.sup_difference;
    Real worst = 0;
    for (std::size_t n = 0; n < rep.block_norms.size(); ++n)
      worst = std::max(worst, rep.block_norms[n] / (c_phi * std::sqrt(1.0 + Real(n * n))));
    o.require(mismatched == 0, warp.name + " exact mode norms");
    o.require(worst <= 1 + 1e-12, warp.name + " block bound");
    o.detail << warp.name << ": C_phi " << c_phi << ", max block/(C_phi<n>) " << worst << ", mismatches " << mismatched
             << "; ";
  }
}

// 6 --------------------------------------------------------------------------
void c6(Outcome& o) {
  const auto t0 = Clock::now();
  for (const auto& warp : {hyperbolic_warp(), conical_warp()}) {
    ExperimentSpec s;
    s.name = "c6-" + warp.name;
    s.kind = ExperimentKind::StrichartzRatio;
    s.warp = warp;
    s.grid = RadialGrid(550, 0.02);
    s.evolution = {0.01, 2.0, 1, Scheme::CrankNicolson};
    s.seed = 6;
    s.tolerance = kC6Refinement;
    auto& p = s.strichartz;
    p.pairs = {{4, 4, Family::Massless}, {8, 8.0 / 3.0, Family::Massless}, {2, 6, Family::Massive}, {4, 3, Family::Massive}};
    p.n_min = 1;
    p.n_max = 8;
    p.ensemble = kC6Ensemble;
    p.refine = true;
    p.exponent_bound = kC6Exponent;
    ExperimentResult res;
    run_experiment(s, res);
    o.require(res.passed(), warp.name + describe_checks(res));
    o.detail << warp.name << ":";
    for (const auto& c : res.checks)
      if (c.name.find("refinement") != std::string::npos || c.name.find("exponent") != std::string::npos)
        o.detail << " " << c.name << " " << c.value << ";";
    o.detail << " " << res.table.rows.size() << " records; ";
  }
  const Real t = seconds_since(t0);
  o.require(t <= kC6RuntimeS, "runtime");
  o.detail << t << " s";
}

// 7 --------------------------------------------------------------------------
void c7(Outcome& o) {
  ExperimentSpec s;
  s.name = "c7";
  s.kind = ExperimentKind::Duhamel;
  s.warp = hyperbolic_warp();
  s.grid = RadialGrid(300, 0.025);
  s.evolution = {1e-3, 1.0, 1, Scheme::Spectral};
  s.duhamel.refinements = 2;
  const auto rows = run_duhamel(s);
  Real min_order = kInfinity;
  for (std::size_t i = 1; i < rows.size(); ++i)
    min_order = std::min(min_order, std::log2(rows[i - 1].residual / rows[i].residual));
  o.require(rows.front().residual <= kC7Residual, "residual");
  o.require(min_order >= kC7Order, "order");
  o.detail << "residual " << rows.front().residual << " at dt " << rows.front().dt << ", min order " << min_order;
}

// 8 --------------------------------------------------------------------------
void c8(Outcome& o) {
  ExperimentSpec s;
  s.name = "c8";
  s.kind = ExperimentKind::Invariance;
  s.warp = hyperbolic_warp();
  s.grid = RadialGrid(200, 0.05);
  s.evolution = {0.01, 2.0, 1, Scheme::CrankNicolson};
  s.invariance.powers = {1, 2, 3};
  s.invariance.densities = {DensityKind::Mass, DensityKind::Charge};
  s.invariance.counterexample = true;
  Real worst = 0, counter = 0;
  int runs = 0;
  for (const auto& series : run_invariance(s)) {
    if (series.counterexample) {
      counter = series.max_relative;
    } else if (series.power > 0) {
      worst = std::max(worst, series.max_relative);
      ++runs;
    }
  }
  o.require(runs == 6, "six nonlinear runs");
  o.require(worst <= kC8Leakage, "j = 1/2 leakage");
  o.require(counter > kC8Counterexample, "j = 3/2 counterexample");
  o.detail << "max j=1/2 leakage " << worst << " over " << runs << " runs, j=3/2 leakage " << counter;
}

// 9 --------------------------------------------------------------------------
void c9(Outcome& o) {
  ExperimentSpec s;
  s.name = "c9";
  s.kind = ExperimentKind::Contraction;
  s.warp = hyperbolic_warp();
  s.grid = RadialGrid(200, 0.05);
  s.evolution = {0.02, 2.0, 1, Scheme::CrankNicolson};
  s.contraction.radii = {20, 40, 80, 160};
  s.contraction.T_cap = 2.0;
  s.contraction.agreement_floor = kC9AgreementFloor;
  const auto rep = run_contraction(s);
  int increases = 0;
  for (std::size_t i = 1; i < rep.points.size(); ++i) increases += rep.points[i].t_star > rep.points[i - 1].t_star;
  const Real bound = std::max(kC9AgreementFloor, 5 * s.evolution.dt * s.evolution.dt * rep.agreement_T);
  o.require(rep.points.size() == 4, "four radii");
  o.require(rep.small_data_max_ratio <= kC9Ratio, "small-data ratio");
  o.require(increases == 0, "T* non-increasing");
  o.require(rep.agreement <= bound, "Picard vs Strang");
  o.detail << "T* =";
  for (const auto& p : rep.points) o.detail << " " << p.t_star << "(R=" << p.radius << ")";
  o.detail << "; small-data ratio " << rep.small_data_max_ratio << "; agreement " << rep.agreement << " <= " << bound;
}

// 10 -------------------------------------------------------------------------
void c10(Outcome& o) {
  const char* text = R"(
seed: 1234
warp: hyperbolic
grid: {N: 240, dr: 0.05}
evolution: {dt: 0.02, T: 1}
experiments:
  - {name: s, kind: strichartz_ratio, params: {n_max: 2, ensemble: 4, pairs: [{p: 4, q: 4}, {p: 4, q: 3, family: massive}]}}
  - {name: sig, kind: sigma_continuity, params: {ensemble: 6}}
  - {name: inv, kind: invariance, evolution: {dt: 0.02, T: 0.4}, params: {powers: [2]}}
  - {name: con, kind: contraction, grid: {N: 120, dr: 0.1}, evolution: {dt: 0.05, T: 1}, params: {radii: [10, 40], T_cap: 1, bisection_steps: 3}}
)";
  const RunConfig cfg = parse_config(text);
  std::vector<std::string> first;
  int differing = 0;
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
      ExperimentResult res;
      run_experiment(cfg.experiments[i], res);
      const std::string csv = to_csv(res.table);
      if (pass == 0) first.push_back(csv);
      else differing += csv != first[i];
    }
  std::size_t bytes = 0;
  for (const auto& s : first) bytes += s.size();
  o.require(differing == 0, "byte-identical CSV");
  o.detail << cfg.experiments.size() << " experiments, " << bytes << " CSV bytes, " << differing << " differing";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"algebraic exactness", c1},  {"unitarity", c2},          {"sigma pipeline", c3},
      {"angular spectrum", c4},     {"potential bound", c5},    {"Strichartz ratios", c6},
      {"Duhamel identity", c7},     {"nonlinear invariance", c8}, {"contraction", c9},
      {"determinism", c10}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %2d %s (%.2f s): %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}
