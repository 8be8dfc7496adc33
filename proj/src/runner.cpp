#include "dwarp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "dwarp/csv.hpp"
#include "json.hpp"

namespace dwarp {
namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

ojson number(Real x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ExperimentOutcome run_one(const ExperimentSpec& spec, const std::filesystem::path& dir) {
  ExperimentOutcome o;
  o.name = spec.name;
  o.kind = spec.kind;
  const auto t0 = Clock::now();
  ExperimentResult res;
  bool ok = true;
  try {
    run_experiment(spec, res);
  } catch (const std::exception& e) {
    ok = false;
    o.error = e.what();
  }
  o.checks = res.checks;
  o.headline = res.headline;
  o.status = !ok ? Status::Error : res.passed() ? Status::Pass : Status::Fail;
  try {
    o.csv = write_text(dir / (spec.name + ".csv"), to_csv(res.table), ok);
  } catch (const std::exception& e) {
    o.status = Status::Error;
    o.error += (o.error.empty() ? "" : "; ") + std::string(e.what());
  }
  o.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return o;
}

ojson to_json(const ExperimentOutcome& o) {
  ojson j;
  j["name"] = o.name;
  j["kind"] = to_string(o.kind);
  j["status"] = to_string(o.status);
  j["error"] = o.error.empty() ? ojson(nullptr) : ojson(o.error);
  j["csv"] = o.csv.filename().string();
  ojson checks = ojson::array();
  for (const auto& c : o.checks)
    checks.push_back({{"name", c.name},
                      {"value", number(c.value)},
                      {"bound", number(c.bound)},
                      {"relation", c.upper ? "<=" : ">="},
                      {"passed", c.passed}});
  j["checks"] = checks;
  ojson head = ojson::object();
  for (const auto& [k, v] : o.headline) head[k] = number(v);
  j["headline"] = head;
  j["wall_time_s"] = o.wall_time_s;
  return j;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
  }
  return "error";
}

RunSummary run_config(const RunConfig& cfg, const std::filesystem::path& output_dir, int threads, std::ostream* log) {
  const auto t0 = Clock::now();
  std::filesystem::create_directories(output_dir);
  RunSummary summary;
  const std::size_t n = cfg.experiments.size();
  summary.experiments.resize(n);
  const int workers = static_cast<int>(std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(n, 1)));

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& spec = cfg.experiments[i];
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << "[" << i + 1 << "/" << n << "] " << spec.name << " (" << to_string(spec.kind) << ")\n" << std::flush;
      }
      summary.experiments[i] = run_one(spec, output_dir);
      if (log) {
        std::lock_guard lock(log_mutex);
        const auto& o = summary.experiments[i];
        *log << "  " << spec.name << ": " << to_string(o.status);
        if (!o.error.empty()) *log << " (" << o.error << ")";
        *log << ", " << o.wall_time_s << " s\n" << std::flush;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (const auto& o : summary.experiments) summary.all_passed = summary.all_passed && o.status == Status::Pass;
  summary.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();

  ojson doc;
  doc["schema_version"] = kSummarySchemaVersion;
  doc["version"] = kVersion;
  doc["seed"] = cfg.seed;
  doc["threads"] = workers;
  doc["config"] = cfg.echo.empty() ? ojson::object() : ojson::parse(cfg.echo);
  ojson list = ojson::array();
  for (const auto& o : summary.experiments) list.push_back(to_json(o));
  doc["experiments"] = list;
  doc["all_passed"] = summary.all_passed;
  doc["wall_time_s"] = summary.wall_time_s;
  summary.summary_path = write_text(output_dir / "summary.json", doc.dump(2) + "\n");
  return summary;
}

}  // namespace dwarp
