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

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "winpa/winpa.hpp"

namespace winpa {
namespace {

using testing::constant_channel_config;
using testing::timing;

TEST(Oracle, OnePointInstanceMatchesJoint) {
  const auto cfg = constant_channel_config(1, 1, 1, {1.0}, 2000);
  const auto g = testing::isolated_nodes({0}, {timing(10, 2, 5)});
  const ChannelGrid grid(cfg);
  const auto o = brute_force_oracle(cfg, g, grid);
  EXPECT_EQ(o.runs, 1u);
  EXPECT_NEAR(o.t_total_ms, 21.0, 1e-9);
  EXPECT_NEAR(run_bundle(cfg, g, grid, "joint").t_total_ms, o.t_total_ms, 1e-9);
}

TEST(Oracle, HandEnumeratedTwoSlices) {
  // One RB, 0.25 kB per slot. Slice 0: 0.25 kB then a 10 ms task; slice 1:
  // 0.5 kB then a 2 ms task. Orders: 0,1,1 -> 11; 1,0,1 -> 12; 1,1,0 -> 13.
  const auto cfg = constant_channel_config(2, 2, 1, {0.25, 0.5}, 2000);
  const auto g = testing::isolated_nodes({0, 1}, {timing(8, 1, 1), timing(1, 0.5, 0.5)});
  const ChannelGrid grid(cfg);
  const auto o = brute_force_oracle(cfg, g, grid);
  EXPECT_NEAR(o.t_total_ms, 11.0, 1e-9);
  EXPECT_GE(o.runs, 3u);
  EXPECT_TRUE(validate_schedule(cfg, g, grid, o.best).empty());
  EXPECT_NEAR(run_bundle(cfg, g, grid, "joint").t_total_ms, 11.0, 1e-9);
  // Largest-remaining goes to slice 1 first, then the 0.25 tie goes to slice 0.
  EXPECT_NEAR(run_bundle(cfg, g, grid, "decoupled").t_total_ms, 12.0, 1e-9);
}

TEST(Oracle, ContentionOnOneCu) {
  // Both tasks ready at 0 on one CU: the search must try both orders even
  // though each achieves the same makespan here.
  const auto cfg = constant_channel_config(2, 1, 1, {0.0, 0.0}, 2000);
  const auto g = testing::isolated_nodes({0, 1}, {timing(3, 1, 1), timing(1, 1, 1)});
  const ChannelGrid grid(cfg);
  const auto o = brute_force_oracle(cfg, g, grid);
  EXPECT_EQ(o.runs, 2u);
  EXPECT_NEAR(o.t_total_ms, 8.0, 1e-9);
}

TEST(Oracle, DominatesHeuristicsOnTinyInstances) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto cfg = testing::tiny_config(seed);
    const auto g = generate_workload(cfg);
    const ChannelGrid grid(cfg);
    const auto o = brute_force_oracle(cfg, g, grid);
    ASSERT_TRUE(validate_schedule(cfg, g, grid, o.best).empty()) << "seed " << seed;
    for (const char* b : {"joint", "decoupled"}) {
      EXPECT_LE(o.t_total_ms, run_bundle(cfg, g, grid, b).t_total_ms + 1e-9) << "seed " << seed << " " << b;
    }
    EXPECT_LE(o.t_total_ms, run(cfg, g, grid, "rb_round_robin", "dispatch_fifo").t_total_ms + 1e-9);
  }
}

TEST(Oracle, RefusesLargeInstances) {
  const auto cfg = validate_config({});
  const auto g = generate_workload(cfg);
  const ChannelGrid grid(cfg);
  try {
    brute_force_oracle(cfg, g, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::instance_too_large);
  }
  // Small graph but long transmission.
  const auto big = constant_channel_config(1, 1, 1, {50.0}, 2000);
  const auto one = testing::isolated_nodes({0}, {timing(1, 1, 1)});
  EXPECT_THROW(brute_force_oracle(big, one, ChannelGrid(big)), Error);
  OracleLimits lim;
  lim.slot_cap = 1000;
  EXPECT_NEAR(brute_force_oracle(big, one, ChannelGrid(big), lim).t_total_ms, 203.0, 1e-9);
}

}  // namespace
}  // namespace winpa
