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

#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "winpa/winpa.hpp"

namespace winpa {
namespace {

using testing::constant_channel_config;
using testing::StateFixture;
using testing::timing;

std::vector<std::optional<std::size_t>> slices(std::initializer_list<std::size_t> xs) {
  return {xs.begin(), xs.end()};
}

TaskGraph one_node_per_slice(std::size_t n, TimingParams t = timing(0, 0, 0, 0, 0)) {
  std::vector<int> owners;
  for (std::size_t s = 0; s < n; ++s) owners.push_back(static_cast<int>(s));
  return testing::isolated_nodes(owners, std::vector<TimingParams>(n, t));
}

// --- comm_greedy -------------------------------------------------------------

TEST(CommGreedy, LargestRemainingWithInSlotUpdate) {
  StateFixture fx(constant_channel_config(3, 1, 2, {10, 1, 5}, 2000), one_node_per_slice(3));
  CommGreedy p;
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({0, 0}));
  // 0.2 - 0.25 < 0, second RB moves to the next largest.
  fx.set_remaining({0.2, 0.1, 0.0});
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({0, 1}));
}

TEST(CommGreedy, TiesToLowestIndexAndSkipsDelivered) {
  StateFixture fx(constant_channel_config(3, 1, 1, {4, 4, 4}, 2000), one_node_per_slice(3));
  CommGreedy p;
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({0}));
  fx.set_remaining({0, 4, 4});
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({1}));
}

// --- joint_greedy ------------------------------------------------------------

TEST(JointGreedy, ScoreUsesMeanRbTransfer) {
  auto cfg = constant_channel_config(2, 1, 1, {10, 1}, 2000);
  cfg.rate_min_kbps = 20;
  cfg.rate_max_kbps = 2000;
  StateFixture fx(validate_config(cfg), one_node_per_slice(2));
  const auto st = fx.state();
  EXPECT_NEAR(st.expected_rb_kb, 0.12625, 1e-12);
  EXPECT_NEAR(JointGreedy::joint_score(st, 0, 0), 79.2079, 1e-3);
  EXPECT_NEAR(JointGreedy::joint_score(st, 1, 0), 7.92079, 1e-4);
  EXPECT_NEAR(JointGreedy::joint_score(st, 0, 1), 79.2079 / 2, 1e-3);
  JointGreedy p;
  EXPECT_EQ(p.decide(st).slice_of_freq, slices({0}));
}

TEST(JointGreedy, ComputeAwareness) {
  auto cfg = constant_channel_config(2, 1, 1, {1, 50}, 2000);
  cfg.rate_min_kbps = 20;
  cfg.rate_max_kbps = 2000;
  StateFixture fx(validate_config(cfg), one_node_per_slice(2));
  fx.analysis.cp_ms = {500.0, 0.0};
  JointGreedy joint;
  CommGreedy comm;
  EXPECT_EQ(joint.decide(fx.state()).slice_of_freq, slices({0}));
  EXPECT_EQ(comm.decide(fx.state()).slice_of_freq, slices({1}));
}

TEST(JointGreedy, SplitsRbsAsGrantsAccumulate) {
  // 2 kB vs 1 kB at 0.25 kB/RB: scores 8, 4 -> after one grant 4 vs 4 (tie -> 0),
  // then 8/3 vs 4 -> slice 1.
  StateFixture fx(constant_channel_config(2, 1, 3, {2, 1}, 2000), one_node_per_slice(2));
  JointGreedy p;
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({0, 0, 1}));
}

TEST(JointGreedy, DeliveredSlicesNeverScored) {
  StateFixture fx(constant_channel_config(2, 1, 2, {0, 1}, 2000), one_node_per_slice(2));
  fx.analysis.cp_ms = {1e6, 0.0};
  JointGreedy p;
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({1, 1}));
  fx.set_remaining({0, 0});
  const auto d = p.decide(fx.state()).slice_of_freq;
  EXPECT_TRUE(std::all_of(d.begin(), d.end(), [](const auto& x) { return !x.has_value(); }));
}

// --- rb_round_robin ----------------------------------------------------------

TEST(RbRoundRobin, PigeonholeBalance) {
  StateFixture fx(constant_channel_config(3, 1, 2, {100, 100, 100}, 2000), one_node_per_slice(3));
  RbRoundRobin p;
  std::vector<int> counts(3, 0);
  for (int slot = 0; slot < 11; ++slot) {
    for (const auto& s : p.decide(fx.state()).slice_of_freq) ++counts[*s];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LE(*hi - *lo, 1);
  }
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 22);
}

TEST(RbRoundRobin, CursorSkipsDelivered) {
  StateFixture fx(constant_channel_config(3, 1, 4, {0, 5, 5}, 2000), one_node_per_slice(3));
  RbRoundRobin p;
  EXPECT_EQ(p.decide(fx.state()).slice_of_freq, slices({1, 2, 1, 2}));
}

// --- dispatchers -------------------------------------------------------------

TEST(DispatchFifo, ReadyOrderOntoEarliestIdleCu) {
  StateFixture fx(constant_channel_config(1, 3, 1, {0}, 2000),
                  testing::isolated_nodes({0, 0, 0, 0, 0}, std::vector<TimingParams>(5, timing(1, 1, 1))));
  fx.ready = {{1, 3.0}, {4, 3.0}, {2, 5.0}};
  fx.cus[0].busy_until_ms = 2.0;
  fx.cus[1].busy_until_ms = 1.0;
  fx.cus[2].busy_until_ms = 1.0;
  DispatchFifo p;
  const std::vector<DispatchAssignment> want{{1, 1}, {4, 2}, {2, 0}};
  EXPECT_EQ(p.dispatch(fx.state()), want);
}

TEST(DispatchFifo, LimitedByIdleCount) {
  StateFixture fx(constant_channel_config(1, 2, 1, {0}, 2000),
                  testing::isolated_nodes({0, 0, 0}, std::vector<TimingParams>(3, timing(1, 1, 1))));
  fx.ready = {{0, 0.0}, {1, 0.0}, {2, 0.0}};
  fx.cus[0].idle = false;
  DispatchFifo p;
  const std::vector<DispatchAssignment> want{{0, 1}};
  EXPECT_EQ(p.dispatch(fx.state()), want);
}

TEST(DispatchCpPriority, LongestTailTakesFastestCu) {
  auto cfg = constant_channel_config(1, 2, 1, {0}, 2000);
  cfg.cu_speed_factors = {2.0, 1.0};
  TaskGraph g;
  const auto t = timing(10, 1, 1);
  g.nodes = {testing::node(0, 0, t), testing::node(1, 0, t), testing::node(2, 0, t)};
  g.edges = {{1, 2}};
  StateFixture fx(validate_config(cfg), g);
  fx.ready = {{0, 0.0}, {1, 0.0}};
  DispatchCpPriority p;
  // Node 1 has the downstream chain.
  const std::vector<DispatchAssignment> want{{1, 1}, {0, 0}};
  EXPECT_EQ(p.dispatch(fx.state()), want);
}

TEST(DispatchCpPriority, PrefersOnChipCu) {
  auto cfg = constant_channel_config(1, 2, 1, {0}, 2000);
  TaskGraph g;
  const auto t = timing(10, 4, 1, 0.5, 0.5);
  g.nodes = {testing::node(0, 0, t), testing::node(1, 0, t)};
  g.edges = {{0, 1}};
  StateFixture fx(cfg, g);
  fx.placement[0] = 1;
  fx.ready = {{1, 0.0}};
  DispatchCpPriority p;
  EXPECT_EQ(p.dispatch(fx.state()), (std::vector<DispatchAssignment>{{1, 1}}));
  // The projection on CU 0 pays the off-chip read.
  EXPECT_DOUBLE_EQ(DispatchCpPriority::projected_finish(fx.state(), 1, fx.cus[0]), 4 + 10 + 1);
  EXPECT_DOUBLE_EQ(DispatchCpPriority::projected_finish(fx.state(), 1, fx.cus[1]), 0.5 + 10 + 1);
}

TEST(DispatchCpPriority, TiesByIdAndCu) {
  StateFixture fx(constant_channel_config(1, 2, 1, {0}, 2000),
                  testing::isolated_nodes({0, 0}, std::vector<TimingParams>(2, timing(3, 1, 1))));
  fx.ready = {{1, 0.0}, {0, 0.0}};
  DispatchCpPriority p;
  EXPECT_EQ(p.dispatch(fx.state()), (std::vector<DispatchAssignment>{{0, 0}, {1, 1}}));
}

// --- registry ----------------------------------------------------------------

class AlwaysLast final : public CommPolicy {
 public:
  CommDecision decide(const PolicyState& st) override {
    CommDecision d;
    d.slice_of_freq.assign(st.cfg.n_freq, std::nullopt);
    for (std::size_t s = st.remaining_kb.size(); s-- > 0;) {
      if (!st.delivered[s]) {
        for (auto& x : d.slice_of_freq) x = s;
        break;
      }
    }
    return d;
  }
};

TEST(PolicyRegistry, BuiltinsAndPlugins) {
  auto& reg = PolicyRegistry::instance();
  for (const char* n : {"comm_greedy", "joint_greedy", "rb_round_robin"}) EXPECT_TRUE(reg.has_comm(n));
  for (const char* n : {"dispatch_fifo", "dispatch_cp_priority"}) EXPECT_TRUE(reg.has_compute(n));
  EXPECT_EQ(reg.bundle("joint").comm, "joint_greedy");
  EXPECT_EQ(reg.bundle("joint").compute, "dispatch_cp_priority");
  EXPECT_EQ(reg.bundle("decoupled").comm, "comm_greedy");
  EXPECT_EQ(reg.bundle("decoupled").compute, "dispatch_fifo");

  reg.add_comm("always_last", [](const PolicyContext&) { return std::make_unique<AlwaysLast>(); });
  const auto cfg = validate_config({});
  const auto g = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  const auto s = run(cfg, g, grid, "always_last", "dispatch_fifo");
  EXPECT_TRUE(validate_schedule(cfg, g, grid, s).empty());
  EXPECT_EQ(s.rb_assignments.front().slice, cfg.n_slices - 1);

  try {
    reg.make_compute("missing", PolicyContext{cfg, g, analyze_graph(g, cfg.n_slices)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_policy);
  }
}

TEST(Policies, JointBeatsDecoupledOnAverage) {
  double joint = 0, decoupled = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg = validate_config(cfg);
    const auto g = generate_workload(cfg);
    const ChannelGrid grid(cfg);
    joint += run_bundle(cfg, g, grid, "joint").t_total_ms;
    decoupled += run_bundle(cfg, g, grid, "decoupled").t_total_ms;
  }
  EXPECT_LT(joint, decoupled);
}

}  // namespace
}  // namespace winpa
