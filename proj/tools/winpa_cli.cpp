// Copyright 2026 The winpa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, compare, sweep, oracle, validate.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "winpa/winpa.hpp"

namespace fs = std::filesystem;
using namespace winpa;

namespace {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kInvariant = 2, kTooLarge = 3 };

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::deadlock:
    case Errc::policy_violation:
      return kInvariant;
    case Errc::instance_too_large:
      return kTooLarge;
    default:
      return kInvalidInput;
  }
}

SimConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  SimConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

// "joint", "decoupled", another registered bundle, or "<comm>:<compute>".
Bundle resolve_bundle(const std::string& name, const SimConfig& cfg) {
  if (name.empty()) return {cfg.comm_policy, cfg.compute_policy};
  if (const auto colon = name.find(':'); colon != std::string::npos) {
    return {name.substr(0, colon), name.substr(colon + 1)};
  }
  return PolicyRegistry::instance().bundle(name);
}

void print_violations(const std::vector<Violation>& vs) {
  for (const auto& v : vs) fmt::print(std::cerr, "violation {}: {}\n", v.kind, v.detail);
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& bundle,
            const fs::path& out, const std::string& format) {
  const SimConfig cfg = load(config, seed);
  const Bundle b = resolve_bundle(bundle, cfg);
  const TaskGraph graph = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  const Schedule sched = run(cfg, graph, grid, b.comm, b.compute);
  const auto violations = validate_schedule(cfg, graph, grid, sched);
  if (!violations.empty()) {
    print_violations(violations);
    return kInvariant;
  }
  fs::create_directories(out);
  if (format == "json") {
    export_json(schedule_to_json(sched), out / "schedule.json");
    export_json(workload_to_json(graph), out / "workload.json");
    export_json(metrics_to_json(compute_metrics(sched, cfg)), out / "metrics.json");
  } else if (format == "csv") {
    export_schedule_csv(sched, out);
  } else {
    export_gantt_svg(sched, graph, cfg.n_cus, cfg.slot_ms, out / "gantt.svg");
  }
  const auto m = compute_metrics(sched, cfg);
  fmt::print("seed {} comm={} compute={}\n", cfg.seed, b.comm, b.compute);
  fmt::print("t_total_ms {:.4f}  last_tx_finish_ms {:.4f}  horizon_exceeded {}\n", m.t_total_ms,
             m.last_tx_finish_ms, m.horizon_exceeded);
  fmt::print("cu_utilization {:.3f}\n", fmt::join(m.cu_utilization, " "));
  return kOk;
}

void print_summary(const MonteCarloSummary& s) {
  for (const auto& b : s.bundles) {
    fmt::print("{:<10} n={} mean={:.3f} sd={:.3f} min={:.3f} max={:.3f}\n", b.bundle, b.n, b.mean, b.stddev, b.min,
               b.max);
  }
  fmt::print("{} - {}: mean={:.3f} ci95=[{:.3f}, {:.3f}]\n", s.diff.first, s.diff.second, s.diff.mean, s.diff.ci_lo,
             s.diff.ci_hi);
}

int cmd_compare(const std::string& config, std::size_t seeds, const fs::path& out) {
  const SimConfig cfg = load(config, std::nullopt);
  const auto summary = run_compare(cfg, seed_range(cfg.seed, seeds));
  fs::create_directories(out);
  export_json(summary_to_json(summary), out / "summary.json");
  write_text(out / "seeds.csv", seeds_csv(summary));
  print_summary(summary);
  return kOk;
}

int cmd_sweep(const std::string& config, const std::string& grid_path, const fs::path& out) {
  const SimConfig cfg = load(config, std::nullopt);
  const SweepGrid grid = sweep_grid_from_json(import_json(grid_path), cfg.seed);
  const auto rows = run_sweep(cfg, grid);
  fs::create_directories(out);
  export_json(sweep_to_json(rows), out / "sweep.json");
  write_text(out / "sweep.csv", sweep_csv(rows));
  for (const auto& row : rows) {
    fmt::print("point {}: n_cus={} n_freq={} rate=[{}, {}]\n", row.point.index, row.point.cfg.n_cus,
               row.point.cfg.n_freq, row.point.cfg.rate_min_kbps, row.point.cfg.rate_max_kbps);
    print_summary(row.summary);
  }
  return kOk;
}

int cmd_oracle(const std::string& config, std::optional<std::uint64_t> seed, std::uint64_t slot_cap) {
  const SimConfig cfg = load(config, seed);
  const TaskGraph graph = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  OracleLimits lim;
  lim.slot_cap = slot_cap;
  const auto result = brute_force_oracle(cfg, graph, grid, lim);
  fmt::print("oracle t_total_ms {:.6f} ({} schedules evaluated)\n", result.t_total_ms, result.runs);
  for (const auto& name : PolicyRegistry::instance().bundle_names()) {
    const double t = run_bundle(cfg, graph, grid, name).t_total_ms;
    fmt::print("{:<10} t_total_ms {:.6f} gap {:.6f}\n", name, t, t - result.t_total_ms);
  }
  return kOk;
}

int cmd_validate(const std::string& schedule_path, const std::string& config, std::optional<std::uint64_t> seed,
                 const std::string& workload_path) {
  const SimConfig cfg = load(config, seed);
  const TaskGraph graph =
      workload_path.empty() ? generate_workload(cfg) : workload_from_json(import_json(workload_path));
  const ChannelGrid grid(cfg);
  const Schedule sched = fs::is_directory(schedule_path) ? import_schedule_csv(schedule_path)
                                                         : schedule_from_json(import_json(schedule_path));
  const auto violations = validate_schedule(cfg, graph, grid, sched);
  if (!violations.empty()) {
    print_violations(violations);
    fmt::print("INVALID ({} violations)\n", violations.size());
    return kInvariant;
  }
  fmt::print("OK\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless-accelerated edge inference scheduling simulator"};
  app.require_subcommand(1);

  std::string config, bundle, out = ".", format = "json", grid_path, schedule_path, workload_path;
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 200;
  std::uint64_t slot_cap = OracleLimits{}.slot_cap;

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and export its schedule");
  run_cmd->add_option("--config", config, "Config JSON")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--bundle", bundle, "joint | decoupled | <comm>:<compute>");
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--format", format, "Export format")->check(CLI::IsMember({"json", "csv", "svg"}));

  auto* compare_cmd = app.add_subcommand("compare", "Paired Monte Carlo comparison of joint vs decoupled");
  compare_cmd->add_option("--config", config, "Config JSON")->required();
  compare_cmd->add_option("--seeds", seeds, "Number of seeds, starting at the config seed")->required();
  compare_cmd->add_option("--out", out, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over a grid file");
  sweep_cmd->add_option("--config", config, "Base config JSON")->required();
  sweep_cmd->add_option("--grid", grid_path, "Sweep grid JSON")->required();
  sweep_cmd->add_option("--out", out, "Output directory");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum for tiny instances");
  oracle_cmd->add_option("--config", config, "Config JSON")->required();
  oracle_cmd->add_option("--seed", seed, "Override the config seed");
  oracle_cmd->add_option("--slot-cap", slot_cap, "Communication slots the search may branch over");

  auto* validate_cmd = app.add_subcommand("validate", "Audit a schedule (JSON file or CSV directory)");
  validate_cmd->add_option("--schedule", schedule_path, "schedule.json or a CSV export directory")->required();
  validate_cmd->add_option("--config", config, "Config JSON")->required();
  validate_cmd->add_option("--seed", seed, "Override the config seed");
  validate_cmd->add_option("--workload", workload_path, "Workload JSON (default: regenerate from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*run_cmd) return cmd_run(config, seed, bundle, out, format);
    if (*compare_cmd) return cmd_compare(config, seeds, out);
    if (*sweep_cmd) return cmd_sweep(config, grid_path, out);
    if (*oracle_cmd) return cmd_oracle(config, seed, slot_cap);
    if (*validate_cmd) return cmd_validate(schedule_path, config, seed, workload_path);
  } catch (const Error& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kInvalidInput;
  }
  return kInvalidInput;
}
