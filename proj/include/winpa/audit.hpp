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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/schedule.hpp"
#include "winpa/workload.hpp"

namespace winpa {

struct Violation {
  std::string kind;
  std::string detail;
};

/// Independent feasibility audit of a schedule against its inputs. Rebuilds
/// everything it needs from the raw graph, grid and schedule records; it
/// shares no state with the engine. Returns an empty list when feasible.
///
/// Kinds: rb_range, rb_exclusivity, rb_after_delivery, delivery, horizon_flag,
/// coverage, cu_range, cu_overlap, phase_accounting, memory_mode, precedence,
/// tx_gating, metric.
inline std::vector<Violation> validate_schedule(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid,
                                                const Schedule& sched) {
  std::vector<Violation> out;
  auto add = [&](const char* kind, std::string detail) { out.push_back({kind, std::move(detail)}); };
  const std::size_t n = graph.nodes.size();

  // --- Communication -------------------------------------------------------
  if (sched.tx_finish_ms.size() != cfg.n_slices) {
    add("delivery", "tx_finish_ms has wrong length");
    return out;
  }
  std::map<std::pair<std::uint64_t, std::size_t>, std::size_t> owner_of_rb;
  bool past_horizon = false;
  for (const auto& a : sched.rb_assignments) {
    if (a.f >= cfg.n_freq || a.slice >= cfg.n_slices) {
      add("rb_range", fmt::format("RB ({}, {}) -> slice {} out of range", a.t, a.f, a.slice));
      continue;
    }
    if (!owner_of_rb.emplace(std::make_pair(a.t, a.f), a.slice).second) {
      add("rb_exclusivity", fmt::format("RB ({}, {}) assigned more than once", a.t, a.f));
    }
    past_horizon = past_horizon || a.t >= cfg.horizon_slots;
  }
  if (past_horizon != sched.horizon_exceeded) add("horizon_flag", "horizon_exceeded flag disagrees with RB map");

  std::vector<std::map<std::uint64_t, std::vector<std::size_t>>> slots_of(cfg.n_slices);
  for (const auto& [tf, s] : owner_of_rb) slots_of[s][tf.first].push_back(tf.second);
  for (std::size_t s = 0; s < cfg.n_slices; ++s) {
    const double payload = cfg.payloads_kb[s];
    const double tx = sched.tx_finish_ms[s];
    if (payload <= 0.0) {
      if (tx != 0.0) add("delivery", fmt::format("slice {} has zero payload but tx_finish {}", s, tx));
      if (!slots_of[s].empty()) add("rb_after_delivery", fmt::format("slice {} has zero payload but holds RBs", s));
      continue;
    }
    double cum = 0.0;
    std::optional<double> reached;
    for (auto& [t, freqs] : slots_of[s]) {
      if (reached) {
        add("rb_after_delivery", fmt::format("slice {} granted RBs in slot {} after delivery", s, t));
        break;
      }
      std::sort(freqs.begin(), freqs.end());
      for (std::size_t f : freqs) cum += kb_per_slot(grid.rate_at(t, f, s), cfg.slot_ms);
      if (cum >= payload) reached = static_cast<double>(t + 1) * cfg.slot_ms;
    }
    if (!reached) {
      add("delivery", fmt::format("slice {} never receives its {} kB payload", s, payload));
    } else if (*reached != tx) {
      add("delivery", fmt::format("slice {} reaches its payload at {} ms but tx_finish is {}", s, *reached, tx));
    }
  }

  // --- Computation ---------------------------------------------------------
  std::vector<const GanttEntry*> entry_of(n, nullptr);
  for (const auto& e : sched.gantt) {
    if (e.node_id >= n) {
      add("coverage", fmt::format("gantt entry for unknown node {}", e.node_id));
      continue;
    }
    if (entry_of[e.node_id]) add("coverage", fmt::format("node {} scheduled more than once", e.node_id));
    entry_of[e.node_id] = &e;
    if (e.cu_id >= cfg.n_cus) add("cu_range", fmt::format("node {} on unknown CU {}", e.node_id, e.cu_id));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!entry_of[v]) add("coverage", fmt::format("node {} never scheduled", v));
  }

  std::vector<std::vector<NodeId>> preds(n), succs(n);
  for (const auto& edge : graph.edges) {
    if (edge.pred >= n || edge.succ >= n) {
      add("coverage", "graph edge references an unknown node");
      continue;
    }
    preds[edge.succ].push_back(edge.pred);
    succs[edge.pred].push_back(edge.succ);
  }

  for (const auto* ep : entry_of) {
    if (!ep || ep->cu_id >= cfg.n_cus) continue;
    const auto& e = *ep;
    const auto& node = graph.nodes[e.node_id];
    const auto& t = node.timing;

    if (e.start_ms < 0.0) add("phase_accounting", fmt::format("node {} starts before 0", e.node_id));
    if (phase_sum(e.start_ms, e.read_ms, e.comp_ms, e.write_ms) != e.finish_ms) {
      add("phase_accounting", fmt::format("node {} finish != start + read + comp + write", e.node_id));
    }
    if (e.comp_ms != t.t_comp_ms * cfg.cu_speed_factors[e.cu_id]) {
      add("phase_accounting", fmt::format("node {} comp not scaled by CU {} speed", e.node_id, e.cu_id));
    }
    const double want_read = e.read_mode == MemoryMode::on_chip ? t.t_read_on_ms : t.t_read_off_ms;
    const double want_write = e.write_mode == MemoryMode::on_chip ? t.t_write_on_ms : t.t_write_off_ms;
    if (e.read_ms != want_read || e.write_ms != want_write) {
      add("phase_accounting", fmt::format("node {} read/write delay disagrees with its mode", e.node_id));
    }

    bool local = !preds[e.node_id].empty();
    for (NodeId p : preds[e.node_id]) {
      if (!entry_of[p] || entry_of[p]->cu_id != e.cu_id) local = false;
    }
    bool boundary = succs[e.node_id].empty();
    for (NodeId w : succs[e.node_id]) {
      if (graph.nodes[w].owner != node.owner) boundary = true;
    }
    const auto read_rule = local ? MemoryMode::on_chip : MemoryMode::off_chip;
    const auto write_rule = boundary ? MemoryMode::off_chip : MemoryMode::on_chip;
    if (e.read_mode != read_rule || e.write_mode != write_rule) {
      add("memory_mode", fmt::format("node {} memory modes violate the locality/boundary rule", e.node_id));
    }

    for (NodeId p : preds[e.node_id]) {
      if (entry_of[p] && e.start_ms < entry_of[p]->finish_ms) {
        add("precedence", fmt::format("node {} starts at {} before predecessor {} finishes at {}", e.node_id,
                                      e.start_ms, p, entry_of[p]->finish_ms));
      }
    }
    if (node.owner >= 0 && preds[e.node_id].empty()) {
      const auto s = static_cast<std::size_t>(node.owner);
      if (s < cfg.n_slices && e.start_ms < sched.tx_finish_ms[s]) {
        add("tx_gating", fmt::format("entry node {} starts before slice {} is delivered", e.node_id, s));
      }
    }
  }

  std::vector<std::vector<const GanttEntry*>> per_cu(cfg.n_cus);
  for (const auto& e : sched.gantt)
    if (e.cu_id < cfg.n_cus) per_cu[e.cu_id].push_back(&e);
  for (std::size_t c = 0; c < cfg.n_cus; ++c) {
    auto& lane = per_cu[c];
    std::sort(lane.begin(), lane.end(), [](const GanttEntry* a, const GanttEntry* b) {
      return a->start_ms != b->start_ms ? a->start_ms < b->start_ms : a->finish_ms < b->finish_ms;
    });
    for (std::size_t i = 1; i < lane.size(); ++i) {
      if (lane[i]->start_ms < lane[i - 1]->finish_ms) {
        add("cu_overlap",
            fmt::format("CU {}: node {} overlaps node {}", c, lane[i]->node_id, lane[i - 1]->node_id));
      }
    }
  }

  double max_finish = 0.0;
  for (const auto& e : sched.gantt) max_finish = std::max(max_finish, e.finish_ms);
  if (max_finish != sched.t_total_ms) {
    add("metric", fmt::format("t_total {} differs from max finish {}", sched.t_total_ms, max_finish));
  }
  return out;
}

}  // namespace winpa
