#include <cstdint>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dwarp/runner.hpp"

namespace {

int print_config_error(const dwarp::ConfigError& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac evolution on warped products: numerical experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Validate a config, run its experiments, write CSV and summary.json");
  run->add_option("config", config_path, "YAML or JSON config")->required();
  run->add_option("--output-dir", output_dir, "Output directory (overrides the config)");
  run->add_option("--threads", threads, "Worker threads over experiments")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed for every experiment (overrides the config)");

  auto* check = app.add_subcommand("check", "Parse and validate a config without running it");
  check->add_option("config", config_path, "YAML or JSON config")->required();

  auto* list = app.add_subcommand("list-warps", "List built-in warp functions");
  auto* version = app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  if (*version) {
    std::cout << "dirac-warp " << dwarp::kVersion << "\n";
    return 0;
  }
  if (*list) {
    const dwarp::RadialGrid grid(400, 0.025);
    for (const auto& w : dwarp::builtin_warps()) {
      std::cout << w.name;
      try {
        const auto rep = dwarp::check_assumptions(w, grid);
        std::cout << "\tassumptions " << (rep.passed ? "ok" : "fail") << "\tinf phi/r " << rep.inf_phi_over_r;
      } catch (const dwarp::Error& e) {
        std::cout << "\tassumptions fail\t" << e.what();
      }
      std::cout << "\n";
    }
    return 0;
  }

  dwarp::RunConfig cfg;
  try {
    cfg = dwarp::load_config(config_path);
  } catch (const dwarp::ConfigError& e) {
    return print_config_error(e);
  }

  if (*check) {
    std::cout << config_path << ": ok, " << cfg.experiments.size() << " experiment(s)\n";
    for (const auto& e : cfg.experiments)
      std::cout << "  " << e.name << "\t" << dwarp::to_string(e.kind) << "\twarp " << e.warp.name << "\tN "
                << e.grid.size() << "\tdr " << e.grid.dr() << "\n";
    return 0;
  }

  if (seed) dwarp::override_seed(cfg, *seed);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  try {
    const auto summary = dwarp::run_config(cfg, cfg.output_dir, threads, &std::cerr);
    std::cout << "summary: " << summary.summary_path.string() << "\n";
    for (const auto& o : summary.experiments)
      std::cout << dwarp::to_string(o.status) << "\t" << o.name << "\n";
    return summary.all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
