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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/topology.hpp"
#include "winpa/workload.hpp"

namespace winpa {

struct CuView {
  std::size_t cu_id = 0;
  double speed = 1.0;
  // Finish time of the running task, or the time the CU last became idle.
  double busy_until_ms = 0.0;
  bool idle = true;
};

struct ReadyTask {
  NodeId node = 0;
  double ready_ms = 0.0;
};

/// Read-only snapshot of engine state handed to policies at a decision point.
struct PolicyState {
  double now_ms = 0.0;
  // Slot being decided (communication) or the slot containing now_ms.
  std::uint64_t slot = 0;
  const SimConfig& cfg;
  const TaskGraph& graph;
  const GraphAnalysis& analysis;
  const ChannelGrid& grid;
  // Per slice: payload still undelivered at the start of this slot.
  std::span<const double> remaining_kb;
  std::span<const bool> delivered;
  std::span<const CuView> cus;
  // Ordered by (ready_ms, node).
  std::span<const ReadyTask> ready;
  // CU each node was dispatched to, if any.
  std::span<const std::optional<std::size_t>> placement;
  // Mean kilobytes per RB per slot: mean_rate * slot_ms / 8000.
  double expected_rb_kb = 0.0;
};

/// For one slot: the slice (if any) granted each frequency, indexed by f.
struct CommDecision {
  std::vector<std::optional<std::size_t>> slice_of_freq;
};

struct DispatchAssignment {
  NodeId node = 0;
  std::size_t cu = 0;
  bool operator==(const DispatchAssignment&) const = default;
};

class CommPolicy {
 public:
  virtual ~CommPolicy() = default;
  virtual CommDecision decide(const PolicyState& state) = 0;
};

class ComputePolicy {
 public:
  virtual ~ComputePolicy() = default;
  virtual std::vector<DispatchAssignment> dispatch(const PolicyState& state) = 0;
};

/// Static inputs available when a policy instance is created for one run.
struct PolicyContext {
  const SimConfig& cfg;
  const TaskGraph& graph;
  const GraphAnalysis& analysis;
};

/// Read mode for placing `node` on `cu` given where its predecessors ran:
/// on-chip iff it has predecessors and they all ran on `cu`. Entry nodes read
/// off-chip because delivered payloads land in shared memory.
inline MemoryMode read_mode_for(const GraphAnalysis& a, std::span<const std::optional<std::size_t>> placement,
                                NodeId node, std::size_t cu) {
  const auto& preds = a.preds[node];
  if (preds.empty()) return MemoryMode::off_chip;
  for (NodeId p : preds) {
    if (!placement[p] || *placement[p] != cu) return MemoryMode::off_chip;
  }
  return MemoryMode::on_chip;
}

struct MemoryModes {
  MemoryMode read;
  MemoryMode write;
};

inline MemoryModes memory_mode(const GraphAnalysis& a, std::span<const std::optional<std::size_t>> placement,
                               NodeId node, std::size_t cu) {
  return {read_mode_for(a, placement, node, cu), a.write_mode[node]};
}

}  // namespace winpa
