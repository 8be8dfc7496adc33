#include "dwarp/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace dwarp {
namespace {

using json = nlohmann::json;

// YAML scalars become JSON numbers, booleans or null when they look like
// one; quoted scalars stay strings.
json from_yaml(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(from_yaml(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = from_yaml(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (node.Tag() == "!") return s;
      static const std::regex integer(R"([-+]?[0-9]+)");
      static const std::regex real(R"([-+]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][-+]?[0-9]+)?)");
      if (std::regex_match(s, integer)) {
        try {
          if (s[0] == '-') return std::stoll(s);
          return std::stoull(s);
        } catch (const std::out_of_range&) {
          return s;
        }
      }
      if (std::regex_match(s, real)) return std::stod(s);
      if (s == ".inf" || s == ".Inf" || s == "+.inf") return std::numeric_limits<double>::infinity();
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      if (s == "~" || s == "null") return nullptr;
      return s;
    }
  }
  return nullptr;
}

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      fail(path, "expected a mapping");
      return false;
    }
    for (const auto& [k, v] : j.items())
      if (!allowed.count(k)) fail(join(path, k), "unknown key");
    return true;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  // Reads j[key] into out when present. Returns false on a type error.
  bool real(const json& j, const std::string& path, const char* key, Real& out) {
    if (!j.contains(key)) return true;
    const json& v = j[key];
    const std::string p = join(path, key);
    if (v.is_number()) {
      out = v.get<Real>();
      return true;
    }
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity" || s == "Infinity") {
        out = kInfinity;
        return true;
      }
    }
    fail(p, "expected a number");
    return false;
  }

  bool integer(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) return true;
    const json& v = j[key];
    if (v.is_number_integer() || (v.is_number_float() && std::floor(v.get<Real>()) == v.get<Real>())) {
      const long long x = v.is_number_integer() ? v.get<long long>() : static_cast<long long>(v.get<Real>());
      if (x < -(1LL << 30) || x > (1LL << 30)) {
        fail(join(path, key), "integer out of range");
        return false;
      }
      out = static_cast<int>(x);
      return true;
    }
    fail(join(path, key), "expected an integer");
    return false;
  }

  bool boolean(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return true;
    if (!j[key].is_boolean()) {
      fail(join(path, key), "expected true or false");
      return false;
    }
    out = j[key].get<bool>();
    return true;
  }

  bool string(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return true;
    if (!j[key].is_string()) {
      fail(join(path, key), "expected a string");
      return false;
    }
    out = j[key].get<std::string>();
    return true;
  }

  bool seed(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
    if (!j.contains(key)) return true;
    const json& v = j[key];
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
      return true;
    }
    if (v.is_number_integer() && v.get<long long>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<long long>());
      return true;
    }
    fail(join(path, key), "expected a non-negative 64-bit integer");
    return false;
  }

  void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) fail(path, msg);
  }

  std::vector<Real> reals(const json& j, const std::string& path, const char* key, std::vector<Real> def) {
    if (!j.contains(key)) return def;
    const json& v = j[key];
    const std::string p = join(path, key);
    if (!v.is_array()) {
      fail(p, "expected a list of numbers");
      return def;
    }
    std::vector<Real> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(p + "[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      out.push_back(v[i].get<Real>());
    }
    return out;
  }
};

std::optional<Family> family_from(const std::string& s) {
  if (s == "massless") return Family::Massless;
  if (s == "massive") return Family::Massive;
  return std::nullopt;
}

std::optional<DensityKind> density_from(const std::string& s) {
  if (s == "mass") return DensityKind::Mass;
  if (s == "charge") return DensityKind::Charge;
  return std::nullopt;
}

std::optional<WarpFunction> read_warp(Reader& rd, const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return warp_by_name(j.get<std::string>());
    } catch (const ConfigurationError& e) {
      rd.fail(path, e.what());
      return std::nullopt;
    }
  }
  if (!rd.object(j, path, {"name", "odd_coefficients"})) return std::nullopt;
  std::string name = "custom";
  rd.string(j, path, "name", name);
  if (!j.contains("odd_coefficients")) {
    rd.fail(Reader::join(path, "odd_coefficients"), "required for a custom warp");
    return std::nullopt;
  }
  const auto c = rd.reals(j, path, "odd_coefficients", {});
  if (c.empty()) {
    rd.fail(Reader::join(path, "odd_coefficients"), "needs at least one coefficient");
    return std::nullopt;
  }
  if (c[0] != 1.0) rd.fail(Reader::join(path, "odd_coefficients[0]"), "phi'(0) = 1 requires the first coefficient 1");
  return polynomial_warp(name, c);
}

std::optional<RadialGrid> read_grid(Reader& rd, const json& j, const std::string& path, const RadialGrid& base) {
  if (!rd.object(j, path, {"N", "dr"})) return std::nullopt;
  int n = base.size();
  Real dr = base.dr();
  bool ok = rd.integer(j, path, "N", n) & rd.real(j, path, "dr", dr);
  if (n < 8) {
    rd.fail(Reader::join(path, "N"), "must be at least 8");
    ok = false;
  }
  if (!(dr > 0) || !std::isfinite(dr)) {
    rd.fail(Reader::join(path, "dr"), "must be positive");
    ok = false;
  }
  if (!ok) return std::nullopt;
  return RadialGrid(n, dr);
}

void read_evolution(Reader& rd, const json& j, const std::string& path, EvolutionConfig& e) {
  if (!rd.object(j, path, {"dt", "T", "stride", "scheme"})) return;
  rd.real(j, path, "dt", e.dt);
  rd.real(j, path, "T", e.T);
  rd.integer(j, path, "stride", e.stride);
  std::string scheme = to_string(e.scheme);
  if (rd.string(j, path, "scheme", scheme)) {
    try {
      e.scheme = scheme_from_string(scheme);
    } catch (const ConfigurationError& err) {
      rd.fail(Reader::join(path, "scheme"), err.what());
    }
  }
}

void validate_evolution(Reader& rd, const EvolutionConfig& e, const std::string& path) {
  if (!(e.dt > 0)) rd.fail(Reader::join(path, "dt"), "must be positive");
  else if (!(e.T >= e.dt)) rd.fail(Reader::join(path, "T"), "must be at least dt");
  else {
    try {
      e.validate();
    } catch (const ConfigurationError& err) {
      rd.fail(path, err.what());
    }
  }
  if (e.stride < 1) rd.fail(Reader::join(path, "stride"), "must be at least 1");
}

std::optional<NormPair> read_pair(Reader& rd, const json& j, const std::string& path, Real T) {
  if (!rd.object(j, path, {"p", "q", "family"})) return std::nullopt;
  NormPair pr;
  bool ok = true;
  if (!j.contains("p") || !j.contains("q")) {
    rd.fail(path, "p and q are required");
    return std::nullopt;
  }
  ok &= rd.real(j, path, "p", pr.p);
  ok &= rd.real(j, path, "q", pr.q);
  std::string fam = "massless";
  rd.string(j, path, "family", fam);
  const auto f = family_from(fam);
  if (!f) {
    rd.fail(Reader::join(path, "family"), "expected massless or massive");
    return std::nullopt;
  }
  pr.family = *f;
  if (!ok) return std::nullopt;
  const auto adm = validate_admissible(pr.p, pr.q, pr.family);
  if (!adm) {
    rd.fail(path, adm.reason);
    return std::nullopt;
  }
  (void)T;
  return pr;
}

void read_range(Reader& rd, const json& j, const std::string& path, const char* key, Real& lo, Real& hi) {
  if (!j.contains(key)) return;
  const auto v = rd.reals(j, path, key, {});
  if (v.size() != 2 || !(v[0] > 0) || v[1] < v[0]) {
    rd.fail(Reader::join(path, key), "expected [min, max] with 0 < min <= max");
    return;
  }
  lo = v[0];
  hi = v[1];
}

void read_params(Reader& rd, const json& j, const std::string& path, ExperimentSpec& s) {
  switch (s.kind) {
    case ExperimentKind::StrichartzRatio: {
      auto& p = s.strichartz;
      if (!rd.object(j, path, {"pairs", "n_min", "n_max", "ensemble", "mass", "theta", "r0", "width", "margin", "refine",
                               "sample_stride", "n_theta", "fit_n_min", "exponent_bound"}))
        return;
      if (j.contains("pairs")) {
        const std::string pp = Reader::join(path, "pairs");
        if (!j["pairs"].is_array() || j["pairs"].empty()) {
          rd.fail(pp, "expected a non-empty list");
        } else {
          p.pairs.clear();
          for (std::size_t i = 0; i < j["pairs"].size(); ++i)
            if (auto pr = read_pair(rd, j["pairs"][i], pp + "[" + std::to_string(i) + "]", s.evolution.T))
              p.pairs.push_back(*pr);
        }
      }
      rd.integer(j, path, "n_min", p.n_min);
      rd.integer(j, path, "n_max", p.n_max);
      rd.integer(j, path, "ensemble", p.ensemble);
      rd.real(j, path, "mass", p.mass);
      rd.real(j, path, "theta", p.theta);
      read_range(rd, j, path, "r0", p.r0_min, p.r0_max);
      read_range(rd, j, path, "width", p.width_min, p.width_max);
      rd.real(j, path, "margin", p.margin);
      rd.boolean(j, path, "refine", p.refine);
      rd.integer(j, path, "sample_stride", p.sample_stride);
      rd.integer(j, path, "n_theta", p.n_theta);
      rd.integer(j, path, "fit_n_min", p.fit_n_min);
      rd.real(j, path, "exponent_bound", p.exponent_bound);
      rd.require(p.n_min >= 0 && p.n_max >= p.n_min, Reader::join(path, "n_max"), "need 0 <= n_min <= n_max");
      rd.require(p.ensemble >= 1, Reader::join(path, "ensemble"), "must be at least 1");
      rd.require(p.mass >= 0, Reader::join(path, "mass"), "must be non-negative");
      rd.require(p.margin >= 0, Reader::join(path, "margin"), "must be non-negative");
      rd.require(p.sample_stride >= 1, Reader::join(path, "sample_stride"), "must be at least 1");
      rd.require(p.n_theta >= 2, Reader::join(path, "n_theta"), "must be at least 2");
      const Real reach = p.r0_max + 4 * p.width_max + s.evolution.T + p.margin;
      rd.require(reach <= s.grid.rmax(), path,
                 "support + T + margin = " + std::to_string(reach) + " exceeds R_max = " + std::to_string(s.grid.rmax()));
      break;
    }
    case ExperimentKind::PotentialBound:
      if (!rd.object(j, path, {"n_max"})) return;
      rd.integer(j, path, "n_max", s.potential.n_max);
      rd.require(s.potential.n_max >= 0, Reader::join(path, "n_max"), "must be non-negative");
      break;
    case ExperimentKind::SigmaContinuity:
      if (!rd.object(j, path, {"ensemble"})) return;
      rd.integer(j, path, "ensemble", s.sigma.ensemble);
      rd.require(s.sigma.ensemble >= 1, Reader::join(path, "ensemble"), "must be at least 1");
      break;
    case ExperimentKind::Duhamel: {
      auto& p = s.duhamel;
      if (!rd.object(j, path, {"k", "mass", "center", "width", "refinements", "min_order"})) return;
      rd.integer(j, path, "k", p.k);
      rd.real(j, path, "mass", p.mass);
      rd.real(j, path, "center", p.center);
      rd.real(j, path, "width", p.width);
      rd.integer(j, path, "refinements", p.refinements);
      rd.real(j, path, "min_order", p.min_order);
      rd.require(p.k != 0, Reader::join(path, "k"), "must be nonzero");
      rd.require(p.width > 0, Reader::join(path, "width"), "must be positive");
      rd.require(p.refinements >= 1, Reader::join(path, "refinements"), "must be at least 1");
      break;
    }
    case ExperimentKind::Invariance: {
      auto& p = s.invariance;
      if (!rd.object(j, path, {"m2", "k", "mass", "powers", "densities", "j2max", "amplitude", "counterexample",
                               "counterexample_bound"}))
        return;
      rd.integer(j, path, "m2", p.m2);
      rd.integer(j, path, "k", p.k);
      rd.real(j, path, "mass", p.mass);
      p.powers = rd.reals(j, path, "powers", p.powers);
      if (j.contains("densities")) {
        const std::string dp = Reader::join(path, "densities");
        if (!j["densities"].is_array()) {
          rd.fail(dp, "expected a list");
        } else {
          p.densities.clear();
          for (std::size_t i = 0; i < j["densities"].size(); ++i) {
            const json& d = j["densities"][i];
            const auto kind = d.is_string() ? density_from(d.get<std::string>()) : std::nullopt;
            if (!kind) rd.fail(dp + "[" + std::to_string(i) + "]", "expected mass or charge");
            else p.densities.push_back(*kind);
          }
        }
      }
      rd.integer(j, path, "j2max", p.j2max);
      rd.real(j, path, "amplitude", p.amplitude);
      rd.boolean(j, path, "counterexample", p.counterexample);
      rd.real(j, path, "counterexample_bound", p.counterexample_bound);
      rd.require((p.m2 == 1 || p.m2 == -1), Reader::join(path, "m2"), "j = 1/2 data needs m2 = +-1");
      rd.require((p.k == 1 || p.k == -1), Reader::join(path, "k"), "j = 1/2 data needs k = +-1");
      rd.require(p.j2max >= 3 && p.j2max % 2 == 1, Reader::join(path, "j2max"), "must be odd and at least 3");
      for (Real r : p.powers) rd.require(r > 0, Reader::join(path, "powers"), "exponents must be positive");
      break;
    }
    case ExperimentKind::Contraction: {
      auto& p = s.contraction;
      if (!rd.object(j, path, {"radii", "T_cap", "bisection_steps", "tol", "power", "density", "metric", "mass", "a",
                               "b", "agreement_floor"}))
        return;
      p.radii = rd.reals(j, path, "radii", p.radii);
      rd.real(j, path, "T_cap", p.T_cap);
      rd.integer(j, path, "bisection_steps", p.bisection_steps);
      rd.real(j, path, "tol", p.tol);
      rd.real(j, path, "power", p.power);
      std::string dens = to_string(p.density);
      if (rd.string(j, path, "density", dens)) {
        if (auto d = density_from(dens)) p.density = *d;
        else rd.fail(Reader::join(path, "density"), "expected mass or charge");
      }
      if (j.contains("metric"))
        if (auto pr = read_pair(rd, j["metric"], Reader::join(path, "metric"), p.T_cap)) p.metric = *pr;
      rd.real(j, path, "mass", p.mass);
      rd.real(j, path, "a", p.a);
      rd.real(j, path, "b", p.b);
      rd.real(j, path, "agreement_floor", p.agreement_floor);
      rd.require(!p.radii.empty(), Reader::join(path, "radii"), "needs at least one radius");
      for (Real r : p.radii) rd.require(r > 0, Reader::join(path, "radii"), "radii must be positive");
      rd.require(p.tol > 0, Reader::join(path, "tol"), "must be positive");
      rd.require(p.bisection_steps >= 1, Reader::join(path, "bisection_steps"), "must be at least 1");
      const Real steps = p.T_cap / s.evolution.dt;
      rd.require(p.T_cap > 0 && std::abs(steps - std::round(steps)) <= 1e-9 * steps && std::round(steps) >= 4,
                 Reader::join(path, "T_cap"), "must be a multiple of dt with at least 4 steps");
      break;
    }
  }
}

bool safe_name(const std::string& s) {
  static const std::regex ok(R"([A-Za-z0-9._-]+)");
  return std::regex_match(s, ok) && s != "summary";
}

RunConfig build(const json& root) {
  Reader rd;
  RunConfig cfg;
  if (!rd.object(root, "", {"seed", "output_dir", "warp", "grid", "evolution", "waive_assumptions", "experiments"}))
    throw ConfigError(rd.issues);
  rd.seed(root, "", "seed", cfg.seed);
  rd.string(root, "", "output_dir", cfg.output_dir);

  WarpFunction warp = flat_warp();
  if (root.contains("warp"))
    if (auto w = read_warp(rd, root["warp"], "warp")) warp = *w;
  RadialGrid grid(400, 0.025);
  if (root.contains("grid"))
    if (auto g = read_grid(rd, root["grid"], "grid", grid)) grid = *g;
  EvolutionConfig evo;
  if (root.contains("evolution")) read_evolution(rd, root["evolution"], "evolution", evo);
  validate_evolution(rd, evo, "evolution");
  bool waive = false;
  rd.boolean(root, "", "waive_assumptions", waive);

  std::set<std::string> names;
  if (root.contains("experiments")) {
    const json& list = root["experiments"];
    if (!list.is_array() && !list.is_null()) rd.fail("experiments", "expected a list");
    for (std::size_t i = 0; list.is_array() && i < list.size(); ++i) {
      const std::string path = "experiments[" + std::to_string(i) + "]";
      const json& e = list[i];
      if (!rd.object(e, path, {"name", "kind", "warp", "grid", "evolution", "seed", "tolerance", "waive_assumptions",
                               "params"}))
        continue;
      ExperimentSpec s;
      std::string kind;
      if (!e.contains("kind")) {
        rd.fail(path + ".kind", "required");
        continue;
      }
      if (!rd.string(e, path, "kind", kind)) continue;
      try {
        s.kind = experiment_kind_from_string(kind);
      } catch (const ConfigurationError& err) {
        rd.fail(path + ".kind", err.what());
        continue;
      }
      s.name = kind + "-" + std::to_string(i);
      rd.string(e, path, "name", s.name);
      if (!safe_name(s.name)) rd.fail(path + ".name", "use letters, digits, '.', '_' or '-' (and not 'summary')");
      if (!names.insert(s.name).second) rd.fail(path + ".name", "duplicate experiment name '" + s.name + "'");
      s.warp = warp;
      if (e.contains("warp"))
        if (auto w = read_warp(rd, e["warp"], path + ".warp")) s.warp = *w;
      s.grid = grid;
      if (e.contains("grid"))
        if (auto g = read_grid(rd, e["grid"], path + ".grid", grid)) s.grid = *g;
      s.evolution = evo;
      if (e.contains("evolution")) {
        read_evolution(rd, e["evolution"], path + ".evolution", s.evolution);
        validate_evolution(rd, s.evolution, path + ".evolution");
      }
      s.seed = cfg.seed;
      rd.seed(e, path, "seed", s.seed);
      rd.real(e, path, "tolerance", s.tolerance);
      if (s.tolerance < 0) rd.fail(path + ".tolerance", "must be non-negative");
      s.waive_assumptions = waive;
      rd.boolean(e, path, "waive_assumptions", s.waive_assumptions);
      if (e.contains("params")) read_params(rd, e["params"], path + ".params", s);
      else read_params(rd, json::object(), path + ".params", s);
      if (!s.waive_assumptions) {
        try {
          const auto rep = check_assumptions(s.warp, s.grid);
          if (!rep.passed) {
            std::string msg = "warp '" + s.warp.name + "' fails the standing assumptions (set waive_assumptions)";
            for (const auto& d : rep.diagnostics) msg += "; " + d;
            rd.fail(path + ".warp", msg);
          }
        } catch (const Error& err) {
          rd.fail(path + ".warp", err.what());
        }
      }
      cfg.experiments.push_back(std::move(s));
    }
  }
  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  cfg.echo = root.dump();
  return cfg;
}

std::string describe(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << issues.size() << " configuration error" << (issues.size() == 1 ? "" : "s");
  for (const auto& i : issues) os << "\n  " << (i.path.empty() ? "<root>" : i.path) << ": " << i.message;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> list) : ConfigurationError(describe(list)), issues(std::move(list)) {}

RunConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  json root;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError({{"", std::string("JSON syntax error: ") + e.what()}});
    }
  } else {
    try {
      root = from_yaml(YAML::Load(text));
    } catch (const YAML::Exception& e) {
      throw ConfigError({{"", "YAML syntax error at line " + std::to_string(e.mark.line + 1) + ", column " +
                                  std::to_string(e.mark.column + 1) + ": " + e.msg}});
    }
  }
  if (root.is_null()) root = json::object();
  return build(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{"", "cannot read " + path.string()}});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

void override_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  for (auto& e : cfg.experiments) e.seed = seed;
}

}  // namespace dwarp
