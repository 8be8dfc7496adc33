#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwarp/runner.hpp"
#include "json.hpp"

using namespace dwarp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dirac_warp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int cli(const std::string& args) {
  const std::string cmd = std::string(DIRAC_WARP_EXE) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kInvariance = R"(
seed: 21
warp: flat
grid: {N: 100, dr: 0.1}
evolution: {dt: 0.02, T: 0.5}
experiments:
  - name: inv
    kind: invariance
    params: {powers: [2], densities: [charge]}
)";

const char* kCoarse = R"(
warp: hyperbolic
grid: {N: 60, dr: 0.2}
evolution: {dt: 0.05, T: 0.5, scheme: spectral}
experiments:
  - name: coarse
    kind: duhamel
    tolerance: 1e-12
    params: {refinements: 1}
)";

const char* kStrichartz = R"(
seed: 3
warp: hyperbolic
grid: {N: 240, dr: 0.05}
evolution: {dt: 0.02, T: 1}
experiments:
  - name: s44
    kind: strichartz_ratio
    params: {n_max: 1, ensemble: 3, refine: false}
  - name: pot
    kind: potential_bound
    params: {n_max: 3}
)";

}  // namespace

TEST_CASE("empty experiment list: exit 0, empty summary") {
  const auto dir = scratch("empty");
  spit(dir / "c.yaml", "seed: 1\nexperiments: []\n");
  CHECK(cli("run " + (dir / "c.yaml").string() + " --output-dir " + (dir / "out").string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["experiments"].empty());
  CHECK(doc["all_passed"] == true);
  CHECK(doc["config"]["seed"] == 1);
}

TEST_CASE("invariance on the flat warp passes") {
  const auto dir = scratch("inv");
  const auto cfg = parse_config(kInvariance);
  const auto sum = run_config(cfg, dir);
  REQUIRE(sum.experiments.size() == 1);
  CHECK(sum.experiments[0].status == Status::Pass);
  CHECK(sum.all_passed);
  CHECK(fs::exists(dir / "inv.csv"));
  CHECK_FALSE(fs::exists(dir / "inv.csv.partial"));
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc["experiments"][0]["status"] == "pass");
  CHECK(doc["experiments"][0]["checks"].size() == 3);
  CHECK(doc["experiments"][0]["wall_time_s"].is_number());
}

TEST_CASE("coarse grid with a tight tolerance: failure recorded, nonzero exit") {
  const auto dir = scratch("coarse");
  spit(dir / "c.yaml", kCoarse);
  CHECK(cli("run " + (dir / "c.yaml").string() + " --output-dir " + (dir / "out").string()) == 1);
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(doc["experiments"][0]["status"] == "fail");
  CHECK(doc["all_passed"] == false);
  CHECK(fs::exists(dir / "out" / "coarse.csv"));
}

TEST_CASE("an experiment error keeps the partial CSV") {
  const auto dir = scratch("partial");
  RunConfig cfg;
  ExperimentSpec s;
  s.name = "broken";
  s.kind = ExperimentKind::StrichartzRatio;
  s.grid = RadialGrid(50, 0.05);  // too short for the data support
  cfg.experiments.push_back(s);
  const auto sum = run_config(cfg, dir);
  CHECK_FALSE(sum.all_passed);
  CHECK(sum.experiments[0].status == Status::Error);
  CHECK(sum.experiments[0].error.find("R_max") != std::string::npos);
  CHECK(fs::exists(dir / "broken.csv.partial"));
  CHECK_FALSE(fs::exists(dir / "broken.csv"));
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc["experiments"][0]["status"] == "error");
  CHECK(doc["experiments"][0]["csv"] == "broken.csv.partial");
}

TEST_CASE("check, list-warps, version and config errors") {
  const auto dir = scratch("check");
  spit(dir / "good.yaml", kInvariance);
  spit(dir / "bad.yaml", "evolution: {dt: -1, T: 1}\nexperiments: [{kind: strichartz_ratio, params: {pairs: [{p: 3, q: 3}]}}]\n");
  CHECK(cli("check " + (dir / "good.yaml").string()) == 0);
  CHECK(cli("check " + (dir / "bad.yaml").string()) == 2);
  CHECK(cli("run " + (dir / "bad.yaml").string() + " --output-dir " + (dir / "out").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK(cli("check " + (dir / "missing.yaml").string()) == 2);
  CHECK(cli("list-warps") == 0);
  CHECK(cli("version") == 0);
  CHECK(cli("") != 0);
}

TEST_CASE("same config and seed give byte-identical CSV, for any thread count") {
  const auto dir = scratch("determinism");
  spit(dir / "c.yaml", kStrichartz);
  const std::string cfg = (dir / "c.yaml").string();
  REQUIRE(cli("run " + cfg + " --threads 1 --output-dir " + (dir / "a").string()) == 0);
  REQUIRE(cli("run " + cfg + " --threads 1 --output-dir " + (dir / "b").string()) == 0);
  REQUIRE(cli("run " + cfg + " --threads 2 --output-dir " + (dir / "c").string()) == 0);
  REQUIRE(cli("run " + cfg + " --threads 1 --seed 4 --output-dir " + (dir / "d").string()) == 0);
  for (const char* f : {"s44.csv", "pot.csv"}) {
    const auto a = slurp(dir / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / f));
    CHECK(a == slurp(dir / "c" / f));
  }
  CHECK(slurp(dir / "a" / "s44.csv") != slurp(dir / "d" / "s44.csv"));
  CHECK(slurp(dir / "a" / "pot.csv") == slurp(dir / "d" / "pot.csv"));
  const auto doc = nlohmann::json::parse(slurp(dir / "d" / "summary.json"));
  CHECK(doc["seed"] == 4);
}
