#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dwarp/evolve.hpp"

namespace dwarp {

enum class ExperimentKind { StrichartzRatio, PotentialBound, SigmaContinuity, Duhamel, Invariance, Contraction };

std::string to_string(ExperimentKind k);
/// "strichartz_ratio", "potential_bound", "sigma_continuity", "duhamel",
/// "invariance", "contraction"; throws ConfigurationError.
ExperimentKind experiment_kind_from_string(const std::string& s);

struct NormPair {
  Real p = 4;
  Real q = 4;
  Family family = Family::Massless;
};

struct StrichartzParams {
  std::vector<NormPair> pairs{{4, 4, Family::Massless}};
  int n_min = 0;
  int n_max = 8;
  int ensemble = 50;      // members per n
  Real mass = 1.0;        // massive pairs; massless pairs run with m = 0
  Real theta = 1.0;       // ratio = functional / (<n>^theta |u0|_{H^s})
  Real r0_min = 2.5, r0_max = 4.0;
  Real width_min = 0.4, width_max = 0.8;
  Real margin = 1.0;
  bool refine = true;     // companion run with dr/2, dt/2
  int sample_stride = 2;  // time samples for the L^p_t quadrature
  int n_theta = 24;
  int fit_n_min = 1;
  Real exponent_bound = 1.3;
};

struct PotentialParams {
  int n_max = 16;
};

struct SigmaParams {
  int ensemble = 20;
};

struct DuhamelParams {
  int k = 1;
  Real mass = 1.0;
  Real center = 5.0;
  Real width = 1.5;
  int refinements = 3;  // number of dt halvings after the first run
  Real min_order = 1.8;
};

struct InvarianceParams {
  int m2 = 1;
  int k = 1;
  Real mass = 1.0;
  std::vector<Real> powers{1, 2, 3};
  std::vector<DensityKind> densities{DensityKind::Mass, DensityKind::Charge};
  int j2max = 5;
  Real amplitude = 2.0;
  bool counterexample = true;
  Real counterexample_bound = 1e-4;  // relative leakage the j = 3/2 run must exceed
};

struct ContractionParams {
  std::vector<Real> radii{20, 40, 80, 160};
  Real T_cap = 2.0;
  int bisection_steps = 6;
  Real tol = 1e-10;
  Real power = 2.0;
  DensityKind density = DensityKind::Charge;
  NormPair metric{4, 4, Family::Massless};
  Real mass = 1.0;
  Real a = 1.0, b = 1.0;  // data size in H^{a,b}
  Real agreement_floor = 1e-6;
};

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::PotentialBound;
  WarpFunction warp = flat_warp();
  RadialGrid grid{400, 0.025};
  EvolutionConfig evolution;
  std::uint64_t seed = 0;
  Real tolerance = 0;  // 0: the kind's default
  bool waive_assumptions = false;

  StrichartzParams strichartz;
  PotentialParams potential;
  SigmaParams sigma;
  DuhamelParams duhamel;
  InvarianceParams invariance;
  ContractionParams contraction;

  Real effective_tolerance() const;
};

/// Default declared tolerance per kind.
Real default_tolerance(ExperimentKind k);

using Cell = std::variant<long long, Real, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Check {
  std::string name;
  Real value = 0;
  Real bound = 0;
  bool upper = true;  // value <= bound, else value >= bound
  bool passed = false;
};

struct ExperimentResult {
  std::string name;
  ExperimentKind kind = ExperimentKind::PotentialBound;
  Table table;
  std::vector<Check> checks;
  std::map<std::string, Real> headline;

  bool passed() const;
  void check(std::string label, Real value, Real bound, bool upper = true);
};

inline constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

struct RatioRecord {
  int n = 0;
  int member = 0;
  PartialWaveIndex mode;
  NormPair pair;
  Real mass = 0;
  Real T = 0;
  Real theta = 1;
  Real s = 0;                       // Sobolev index of the data norm
  Real functional = 0;
  Real data_norm = 0;
  Real ratio = 0;                   // functional / (<n>^theta data_norm)
  Real raw_ratio = 0;               // functional / data_norm
  Real unweighted_ratio = 0;        // same without (phi/r)^{1-2/q}
  Real refined_ratio = kNaN;
  std::string grid_tag;
  std::uint64_t seed = 0;
};

/// Linear evolution of random bumps on modes of P_n; see StrichartzParams.
/// Rows are appended to `sink` as they are produced.
std::vector<RatioRecord> run_strichartz_ratio(const ExperimentSpec& spec, Table* sink = nullptr);

struct GrowthFit {
  Real exponent = 0;
  Real intercept = 0;
};

/// Least squares of log(value) against log <n>.
GrowthFit fit_growth(const std::vector<int>& n, const std::vector<Real>& values);

struct PotentialRow {
  int n = 0;
  PartialWaveIndex mode;
  Real norm = 0;       // max |V| on the grid (operator norm of the diagonal)
  Real predicted = 0;  // |k| sup |1/phi - 1/r|
};

struct PotentialReport {
  std::vector<PotentialRow> modes;
  std::vector<Real> block_norms;  // max over P_n
  Real sup_difference = 0;        // sup |1/phi - 1/r| on the grid
  Real c_phi = 0;                 // max_n block_norm / <n>
};

PotentialReport run_potential_bound(const ExperimentSpec& spec, Table* sink = nullptr);

struct SigmaConstants {
  Real c0 = 0;            // sup |sigma f|_{L^2(M)} / |f|_{L^2(R^3)}
  Real c0_min = 0;
  Real c1 = 0;            // sup |sigma f|_{H^1(M)} / |f|_{H^1(R^3)}
  Real sup_logderiv = 0;  // sup |sigma'/sigma|
  Real bound = 0;         // 1 + sup_logderiv
};

SigmaConstants run_sigma_continuity(const ExperimentSpec& spec, Table* sink = nullptr);

struct DuhamelRow {
  Real dt = 0;
  Real residual = 0;
};

/// Flat block H0 plus the warp's potential V; exact-in-time evolution of
/// H0 + V, then the Duhamel residual at dt and its halvings.
std::vector<DuhamelRow> run_duhamel(const ExperimentSpec& spec, Table* sink = nullptr);

struct LeakageSeries {
  std::string label;
  PartialWaveIndex mode;
  DensityKind density = DensityKind::Charge;
  Real power = 0;   // 0: linear run
  bool counterexample = false;
  std::vector<Real> times;
  std::vector<Real> relative;  // leakage / |u0|
  Real max_relative = 0;
};

std::vector<LeakageSeries> run_invariance(const ExperimentSpec& spec, Table* sink = nullptr);

struct ContractionPoint {
  Real radius = 0;
  Real amplitude = 0;
  Real t_star = 0;
  bool capped = false;
  Real first_ratio_T = kNaN;   // first contraction ratio at T_cap / 2
  Real first_ratio_half = kNaN;  // and at T_cap / 4
};

struct ContractionReport {
  std::vector<ContractionPoint> points;
  Real small_data_max_ratio = kNaN;  // smallest R at its T*
  Real agreement = kNaN;             // Picard vs Strang at that T*
  Real agreement_bound = kNaN;
  Real agreement_T = 0;
};

ContractionReport run_contraction(const ExperimentSpec& spec, Table* sink = nullptr);

/// Runs one experiment, filling table, checks and headline numbers.
/// Rows produced before an error stay in `out`.
void run_experiment(const ExperimentSpec& spec, ExperimentResult& out);

}  // namespace dwarp
