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

#include <algorithm>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "winpa/errors.hpp"
#include "winpa/workload.hpp"

namespace winpa {

enum class MemoryMode { on_chip, off_chip };

constexpr std::string_view to_string(MemoryMode m) { return m == MemoryMode::on_chip ? "on_chip" : "off_chip"; }

inline MemoryMode memory_mode_from(std::string_view s) {
  if (s == "on_chip") return MemoryMode::on_chip;
  if (s == "off_chip") return MemoryMode::off_chip;
  throw Error(Errc::parse_error, "memory mode must be on_chip or off_chip");
}

inline double read_delay(const TimingParams& t, MemoryMode m) {
  return m == MemoryMode::on_chip ? t.t_read_on_ms : t.t_read_off_ms;
}

inline double write_delay(const TimingParams& t, MemoryMode m) {
  return m == MemoryMode::on_chip ? t.t_write_on_ms : t.t_write_off_ms;
}

/// Static facts about a task graph that the engine and policies share:
/// adjacency, a topological order, boundary-rule write modes, slice entry
/// nodes and downstream critical-path lengths.
struct GraphAnalysis {
  std::vector<std::vector<NodeId>> preds;
  std::vector<std::vector<NodeId>> succs;
  std::vector<NodeId> topo_order;
  std::vector<MemoryMode> write_mode;
  // Slice-owned nodes without predecessors; gated by their slice's delivery.
  std::vector<bool> is_entry;
  std::vector<std::vector<NodeId>> slice_entries;
  // Longest path from the node to a sink, weighting each node by
  // t_comp + t_read_off + boundary-rule write delay (speed 1.0).
  std::vector<double> cp_ms;

  /// Critical-path tail of a slice: the largest cp over its entry nodes.
  double cp_tail(std::size_t slice) const {
    double best = 0.0;
    for (NodeId v : slice_entries.at(slice)) best = std::max(best, cp_ms[v]);
    return best;
  }
};

/// Write goes off-chip when the output crosses an owner boundary or leaves
/// the graph; otherwise it stays on-chip.
inline MemoryMode boundary_write_mode(const TaskGraph& g, std::span<const NodeId> succs, NodeId v) {
  if (succs.empty()) return MemoryMode::off_chip;
  for (NodeId w : succs) {
    if (g.nodes[w].owner != g.nodes[v].owner) return MemoryMode::off_chip;
  }
  return MemoryMode::on_chip;
}

inline GraphAnalysis analyze_graph(const TaskGraph& g, std::size_t n_slices) {
  const std::size_t n = g.nodes.size();
  GraphAnalysis a;
  a.preds.resize(n);
  a.succs.resize(n);
  for (const auto& e : g.edges) {
    if (e.pred >= n || e.succ >= n) throw Error(Errc::parse_error, "edge endpoint out of range");
    a.succs[e.pred].push_back(e.succ);
    a.preds[e.succ].push_back(e.pred);
  }
  for (auto& v : a.succs) std::sort(v.begin(), v.end());
  for (auto& v : a.preds) std::sort(v.begin(), v.end());

  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.nodes[v].node_id != v) throw Error(Errc::parse_error, "node ids must be dense and ordered");
    indeg[v] = a.preds[v].size();
  }
  // Smallest-id-first Kahn order keeps the result deterministic.
  std::vector<NodeId> frontier;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) frontier.push_back(v);
  std::make_heap(frontier.begin(), frontier.end(), std::greater<>{});
  while (!frontier.empty()) {
    std::pop_heap(frontier.begin(), frontier.end(), std::greater<>{});
    const NodeId u = frontier.back();
    frontier.pop_back();
    a.topo_order.push_back(u);
    for (NodeId w : a.succs[u]) {
      if (--indeg[w] == 0) {
        frontier.push_back(w);
        std::push_heap(frontier.begin(), frontier.end(), std::greater<>{});
      }
    }
  }
  if (a.topo_order.size() != n) throw Error(Errc::parse_error, "task graph is cyclic");

  a.write_mode.resize(n);
  a.is_entry.assign(n, false);
  a.slice_entries.assign(n_slices, {});
  for (std::size_t v = 0; v < n; ++v) {
    a.write_mode[v] = boundary_write_mode(g, a.succs[v], v);
    const int owner = g.nodes[v].owner;
    if (owner >= 0) {
      if (static_cast<std::size_t>(owner) >= n_slices) {
        throw Error(Errc::parse_error, "node owner exceeds slice count");
      }
      if (a.preds[v].empty()) {
        a.is_entry[v] = true;
        a.slice_entries[static_cast<std::size_t>(owner)].push_back(v);
      }
    }
  }

  a.cp_ms.assign(n, 0.0);
  for (auto it = a.topo_order.rbegin(); it != a.topo_order.rend(); ++it) {
    const NodeId v = *it;
    const auto& t = g.nodes[v].timing;
    double tail = 0.0;
    for (NodeId w : a.succs[v]) tail = std::max(tail, a.cp_ms[w]);
    a.cp_ms[v] = t.t_comp_ms + t.t_read_off_ms + write_delay(t, a.write_mode[v]) + tail;
  }
  return a;
}

}  // namespace winpa
