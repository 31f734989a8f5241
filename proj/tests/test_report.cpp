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

#include <cmath>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "winpa/winpa.hpp"

namespace winpa {
namespace {

using testing::constant_channel_config;
using testing::timing;

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("winpa_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Metrics, UtilizationOfSingleTask) {
  const auto cfg = constant_channel_config(1, 2, 1, {1.0}, 2000);
  const auto g = testing::isolated_nodes({0}, {timing(10, 2, 5)});
  const ChannelGrid grid(cfg);
  const auto m = compute_metrics(run_bundle(cfg, g, grid, "joint"), cfg);
  EXPECT_NEAR(m.t_total_ms, 21.0, 1e-12);
  EXPECT_NEAR(m.cu_utilization[0], 17.0 / 21.0, 1e-12);
  EXPECT_EQ(m.cu_utilization[1], 0.0);
  EXPECT_EQ(m.last_tx_finish_ms, 4.0);
  EXPECT_EQ(m.compute_finish_ms, 21.0);
  EXPECT_EQ(metrics_to_json(m)["cu_utilization"].size(), 2u);
}

TEST(Compare, SingleSeedCollapsesInterval) {
  const auto s = run_compare(validate_config({}), {3});
  ASSERT_EQ(s.records.size(), 2u);
  EXPECT_EQ(s.diff.n, 1u);
  EXPECT_EQ(s.diff.ci_lo, s.diff.mean);
  EXPECT_EQ(s.diff.ci_hi, s.diff.mean);
  EXPECT_DOUBLE_EQ(s.diff.mean, s.records[0].t_total_ms - s.records[1].t_total_ms);
}

TEST(Compare, IndependentOfThreadCount) {
  const auto cfg = validate_config({});
  const auto seeds = seed_range(10, 12);
  const auto a = run_compare(cfg, seeds, {"joint", "decoupled"}, 1);
  const auto b = run_compare(cfg, seeds, {"joint", "decoupled"}, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(summary_to_json(a).dump(), summary_to_json(b).dump());
}

TEST(Compare, IntervalMatchesHandComputation) {
  // Differences 1, 2, 3: mean 2, sd 1, t(0.975, 2) = 4.302653.
  std::vector<SeedRecord> recs;
  for (std::uint64_t i = 0; i < 3; ++i) {
    recs.push_back({i, "a", 10.0 + static_cast<double>(i + 1), 0, false});
    recs.push_back({i, "b", 10.0, 0, false});
  }
  const auto s = summarize(recs, {"a", "b"});
  EXPECT_DOUBLE_EQ(s.diff.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.diff.stddev, 1.0);
  EXPECT_NEAR(s.diff.ci_hi, 2.0 + 4.302653 / std::sqrt(3.0), 1e-5);
  EXPECT_NEAR(t_critical_95(1000), 1.962339, 1e-5);
}

TEST(Compare, SeedsCsvRecomputesSummary) {
  const auto s = run_compare(validate_config({}), seed_range(0, 15));
  const auto back = summarize(parse_seeds_csv(seeds_csv(s)), {"joint", "decoupled"});
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(back.bundles[i].mean, s.bundles[i].mean, 1e-9 * std::abs(s.bundles[i].mean));
    EXPECT_NEAR(back.bundles[i].stddev, s.bundles[i].stddev, 1e-9 * std::abs(s.bundles[i].stddev));
  }
  EXPECT_NEAR(back.diff.ci_lo, s.diff.ci_lo, 1e-9 * std::abs(s.diff.ci_lo));
  EXPECT_NEAR(back.diff.ci_hi, s.diff.ci_hi, 1e-9 * std::abs(s.diff.ci_hi));
}

TEST(Compare, UnknownBundleAndEmptySeeds) {
  const auto cfg = validate_config({});
  EXPECT_THROW(run_compare(cfg, {}), Error);
  try {
    run_compare(cfg, {0}, {"joint", "nope"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_policy);
  }
}

TEST(Sweep, ExpansionOrder) {
  SweepGrid grid;
  grid.n_cus = {2, 4};
  grid.n_freq = {4, 8};
  grid.rate_bounds = {{20, 2000}, {200, 2000}};
  const auto pts = expand_grid(validate_config({}), grid);
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_EQ(pts[0].cfg.n_cus, 2u);
  EXPECT_EQ(pts[0].cfg.n_freq, 4u);
  EXPECT_EQ(pts[0].cfg.rate_min_kbps, 20.0);
  EXPECT_EQ(pts[1].cfg.rate_min_kbps, 200.0);
  EXPECT_EQ(pts[2].cfg.n_freq, 8u);
  EXPECT_EQ(pts[4].cfg.n_cus, 4u);
  EXPECT_EQ(pts[7].index, 7u);
  EXPECT_EQ(pts[0].cfg.cu_speed_factors.size(), 2u);
}

TEST(Sweep, InvalidPointNamesIndexAndField) {
  SweepGrid grid;
  grid.n_cus = {2, 4};
  grid.cu_speed_factors = {{1.0, 0.5}};
  try {
    expand_grid(validate_config({}), grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_grid_point);
    EXPECT_NE(std::string(e.what()).find("point 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("cu_speed_factors"), std::string::npos);
  }
  SweepGrid bad_rates;
  bad_rates.rate_bounds = {{500, 100}};
  EXPECT_THROW(expand_grid(validate_config({}), bad_rates), Error);
}

TEST(Sweep, GridJson) {
  const auto g = sweep_grid_from_json(nlohmann::json::parse(R"({"n_cus":[2,3],"seeds":3})"), 7);
  EXPECT_EQ(g.n_cus, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(g.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(sweep_grid_from_json(nlohmann::json::object(), 0).seeds.size(), 20u);
  EXPECT_THROW(sweep_grid_from_json(nlohmann::json::parse(R"({"bogus":1})"), 0), Error);
}

TEST(Sweep, RunsEveryPoint) {
  SweepGrid grid;
  grid.n_cus = {2, 4};
  grid.seeds = {0, 1, 2};
  const auto rows = run_sweep(validate_config({}), grid);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].summary.records.size(), 6u);
  // Fewer CUs cannot help the FIFO baseline on average here.
  EXPECT_GE(rows[0].summary.bundles[1].mean, rows[1].summary.bundles[1].mean);
  const auto csv = sweep_csv(rows);
  EXPECT_EQ(count(csv, "\n"), 1u + 2u * 2u);
  EXPECT_EQ(sweep_to_json(rows).size(), 2u);
}

TEST(Sweep, SinglePointEqualsCompare) {
  SweepGrid grid;
  grid.seeds = seed_range(0, 4);
  const auto base = validate_config({});
  const auto rows = run_sweep(base, grid);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].summary, run_compare(base, grid.seeds));
}

TEST(Compare, BundlesSeeTheSameWorkload) {
  SimConfig cfg;
  cfg.seed = 17;
  cfg = validate_config(cfg);
  const auto g = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  const auto before = workload_to_json(g).dump();
  run_bundle(cfg, g, grid, "joint");
  EXPECT_EQ(workload_to_json(generate_workload(cfg)).dump(), before);
  run_bundle(cfg, g, grid, "decoupled");
  EXPECT_EQ(workload_to_json(g).dump(), before);
}

TEST(Export, CsvAndJsonRoundTripReaudit) {
  TempDir tmp("roundtrip");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg = validate_config(cfg);
    const auto g = generate_workload(cfg);
    const ChannelGrid grid(cfg);
    const auto s = run_bundle(cfg, g, grid, seed % 2 ? "joint" : "decoupled");
    export_schedule_csv(s, tmp.path);
    const auto from_csv = import_schedule_csv(tmp.path);
    EXPECT_EQ(from_csv, s);
    EXPECT_TRUE(validate_schedule(cfg, g, grid, from_csv).empty());
    export_json(schedule_to_json(s), tmp.path / "schedule.json");
    const auto from_json = schedule_from_json(import_json(tmp.path / "schedule.json"));
    EXPECT_EQ(from_json, s);
    export_json(workload_to_json(g), tmp.path / "workload.json");
    EXPECT_EQ(workload_from_json(import_json(tmp.path / "workload.json")), g);
  }
}

TEST(Export, MalformedInputs) {
  TempDir tmp("malformed");
  EXPECT_THROW(import_json(tmp.path / "missing.json"), Error);
  write_text(tmp.path / "bad.json", "{ nope");
  EXPECT_THROW(import_json(tmp.path / "bad.json"), Error);
  EXPECT_THROW(parse_seeds_csv("wrong,header\n1,2\n"), Error);
}

TEST(Export, SvgHasOneGroupAndThreeSegmentsPerTask) {
  SimConfig cfg;
  cfg.seed = 2;
  cfg = validate_config(cfg);
  const auto g = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  const auto s = run_bundle(cfg, g, grid, "joint");
  const auto svg = gantt_svg(s, g, cfg.n_cus, cfg.slot_ms);
  EXPECT_EQ(count(svg, "<g class=\"task\""), g.size());
  EXPECT_EQ(count(svg, "<rect class=\"comp\""), g.size());
  EXPECT_EQ(count(svg, "<rect class=\"read\""), g.size());
  EXPECT_EQ(count(svg, "<rect class=\"write\""), g.size());
  EXPECT_GE(count(svg, "<rect class=\"tx\""), cfg.n_slices);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Export, MinimalSvg) {
  const auto cfg = constant_channel_config(1, 1, 1, {0.0}, 2000);
  const auto g = testing::isolated_nodes({0}, {timing(1, 1, 1)});
  const auto s = run_bundle(cfg, g, ChannelGrid(cfg), "joint");
  const auto svg = gantt_svg(s, g, 1, 1.0);
  EXPECT_EQ(count(svg, "<g class=\"task\""), 1u);
  EXPECT_EQ(count(svg, "class=\"tx\""), 0u);
}

}  // namespace
}  // namespace winpa
