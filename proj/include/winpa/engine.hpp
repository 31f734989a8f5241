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
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/errors.hpp"
#include "winpa/policy.hpp"
#include "winpa/schedule.hpp"
#include "winpa/topology.hpp"
#include "winpa/workload.hpp"

namespace winpa {

namespace engine_detail {

// Same-time ordering: slot boundaries, then task finishes, then by id.
enum class EventKind : int { slot_boundary = 0, task_finish = 1 };

struct Event {
  double time;
  EventKind kind;
  std::uint64_t id;  // slot index or node id

  friend bool operator>(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.id > b.id;
  }
};

struct PendingCredit {
  std::size_t slice;
  double kb;
};

class Simulation {
 public:
  Simulation(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid, CommPolicy& comm,
             ComputePolicy& compute)
      : cfg_(cfg),
        graph_(graph),
        grid_(grid),
        comm_(comm),
        compute_(compute),
        analysis_(analyze_graph(graph, cfg.n_slices)) {
    if (grid.n_freq() != cfg.n_freq || grid.n_slices() != cfg.n_slices) {
      throw Error(Errc::invalid_config, "channel grid dimensions do not match config");
    }
    if (cfg.cu_speed_factors.size() != cfg.n_cus || cfg.payloads_kb.size() != cfg.n_slices) {
      throw Error(Errc::invalid_config, "config not validated");
    }
  }

  Schedule run() {
    init();
    double now = 0.0;
    for (;;) {
      while (!events_.empty() && events_.top().time == now) {
        const Event ev = events_.top();
        events_.pop();
        if (ev.kind == EventKind::slot_boundary) {
          on_slot_boundary(ev.id, now);
        } else {
          on_task_finish(static_cast<NodeId>(ev.id), now);
        }
      }
      dispatch(now);
      if (finished_count_ == graph_.size() && all_delivered()) break;
      if (events_.empty()) {
        throw Error(Errc::deadlock, fmt::format("no pending events at t={} ms with {} of {} tasks finished", now,
                                                finished_count_, graph_.size()));
      }
      now = events_.top().time;
    }
    double t_total = 0.0;
    for (const auto& e : sched_.gantt) t_total = std::max(t_total, e.finish_ms);
    sched_.t_total_ms = t_total;
    return std::move(sched_);
  }

 private:
  void init() {
    const std::size_t n = graph_.size();
    const std::size_t s_count = cfg_.n_slices;
    remaining_.assign(cfg_.payloads_kb.begin(), cfg_.payloads_kb.end());
    cumulative_.assign(s_count, 0.0);
    delivered_ = std::make_unique<bool[]>(s_count);
    sched_.tx_finish_ms.assign(s_count, 0.0);
    preds_left_.resize(n);
    placement_.assign(n, std::nullopt);
    finished_.assign(n, false);
    cus_.resize(cfg_.n_cus);
    for (std::size_t c = 0; c < cfg_.n_cus; ++c) cus_[c] = {c, cfg_.cu_speed_factors[c], 0.0, true};
    expected_rb_kb_ = kb_per_slot(cfg_.mean_rate_kbps(), cfg_.slot_ms);

    bool any_pending = false;
    for (std::size_t s = 0; s < s_count; ++s) {
      delivered_[s] = cfg_.payloads_kb[s] <= 0.0;
      any_pending = any_pending || !delivered_[s];
    }
    for (NodeId v = 0; v < n; ++v) {
      preds_left_[v] = analysis_.preds[v].size();
      if (preds_left_[v] == 0 && gate_open(v)) make_ready(v, 0.0);
    }
    if (any_pending) events_.push({0.0, EventKind::slot_boundary, 0});
  }

  bool all_delivered() const {
    for (std::size_t s = 0; s < cfg_.n_slices; ++s)
      if (!delivered_[s]) return false;
    return true;
  }

  bool gate_open(NodeId v) const {
    if (!analysis_.is_entry[v]) return true;
    return delivered_[static_cast<std::size_t>(graph_.nodes[v].owner)];
  }

  void make_ready(NodeId v, double t) {
    const ReadyTask rt{v, t};
    const auto pos = std::upper_bound(ready_.begin(), ready_.end(), rt, [](const ReadyTask& a, const ReadyTask& b) {
      return a.ready_ms != b.ready_ms ? a.ready_ms < b.ready_ms : a.node < b.node;
    });
    ready_.insert(pos, rt);
  }

  PolicyState state(double now, std::uint64_t slot) const {
    return PolicyState{now,
                       slot,
                       cfg_,
                       graph_,
                       analysis_,
                       grid_,
                       remaining_,
                       std::span<const bool>(delivered_.get(), cfg_.n_slices),
                       cus_,
                       ready_,
                       placement_,
                       expected_rb_kb_};
  }

  void on_slot_boundary(std::uint64_t k, double now) {
    if (k > 0) {
      for (const auto& c : pending_) cumulative_[c.slice] += c.kb;
      pending_.clear();
      for (std::size_t s = 0; s < cfg_.n_slices; ++s) {
        if (delivered_[s]) continue;
        const double payload = cfg_.payloads_kb[s];
        remaining_[s] = std::max(0.0, payload - cumulative_[s]);
        if (cumulative_[s] >= payload) {
          delivered_[s] = true;
          remaining_[s] = 0.0;
          sched_.tx_finish_ms[s] = now;
          for (NodeId v : analysis_.slice_entries[s]) {
            if (preds_left_[v] == 0) make_ready(v, now);
          }
        }
      }
    }
    if (all_delivered()) return;

    const CommDecision decision = comm_.decide(state(now, k));
    if (decision.slice_of_freq.size() != cfg_.n_freq) {
      throw Error(Errc::policy_violation, "communication decision must cover every frequency");
    }
    bool granted = false;
    for (std::size_t f = 0; f < cfg_.n_freq; ++f) {
      const auto& s = decision.slice_of_freq[f];
      if (!s) continue;
      if (*s >= cfg_.n_slices || delivered_[*s]) {
        throw Error(Errc::policy_violation, fmt::format("RB ({}, {}) granted to ineligible slice {}", k, f, *s));
      }
      sched_.rb_assignments.push_back({k, f, *s});
      pending_.push_back({*s, grid_.transfer_kb(k, f, *s)});
      granted = true;
    }
    if (granted && k >= cfg_.horizon_slots) sched_.horizon_exceeded = true;
    idle_slots_ = granted ? 0 : idle_slots_ + 1;
    if (idle_slots_ > 10 * cfg_.horizon_slots + 1000) {
      throw Error(Errc::deadlock, "communication policy stopped granting RBs with payload outstanding");
    }
    events_.push({static_cast<double>(k + 1) * cfg_.slot_ms, EventKind::slot_boundary, k + 1});
  }

  void on_task_finish(NodeId v, double now) {
    finished_[v] = true;
    ++finished_count_;
    auto& cu = cus_[*placement_[v]];
    cu.idle = true;
    cu.busy_until_ms = now;
    for (NodeId w : analysis_.succs[v]) {
      if (--preds_left_[w] == 0 && gate_open(w)) make_ready(w, now);
    }
  }

  void dispatch(double now) {
    if (ready_.empty()) return;
    if (std::none_of(cus_.begin(), cus_.end(), [](const CuView& c) { return c.idle; })) return;

    const auto slot = static_cast<std::uint64_t>(std::floor(now / cfg_.slot_ms));
    const auto assignments = compute_.dispatch(state(now, slot));
    for (const auto& a : assignments) {
      const auto it = std::find_if(ready_.begin(), ready_.end(), [&](const ReadyTask& r) { return r.node == a.node; });
      if (it == ready_.end()) {
        throw Error(Errc::policy_violation, fmt::format("dispatched node {} is not ready", a.node));
      }
      if (a.cu >= cus_.size() || !cus_[a.cu].idle) {
        throw Error(Errc::policy_violation, fmt::format("CU {} is not idle", a.cu));
      }
      ready_.erase(it);

      const auto modes = memory_mode(analysis_, placement_, a.node, a.cu);
      const auto& timing = graph_.nodes[a.node].timing;
      GanttEntry e;
      e.node_id = a.node;
      e.cu_id = a.cu;
      e.start_ms = now;
      e.read_mode = modes.read;
      e.write_mode = modes.write;
      e.read_ms = read_delay(timing, modes.read);
      e.comp_ms = timing.t_comp_ms * cus_[a.cu].speed;
      e.write_ms = write_delay(timing, modes.write);
      e.finish_ms = phase_sum(e.start_ms, e.read_ms, e.comp_ms, e.write_ms);
      sched_.gantt.push_back(e);

      placement_[a.node] = a.cu;
      cus_[a.cu].idle = false;
      cus_[a.cu].busy_until_ms = e.finish_ms;
      events_.push({e.finish_ms, EventKind::task_finish, a.node});
    }
  }

  const SimConfig& cfg_;
  const TaskGraph& graph_;
  const ChannelGrid& grid_;
  CommPolicy& comm_;
  ComputePolicy& compute_;
  GraphAnalysis analysis_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<double> remaining_;
  std::vector<double> cumulative_;
  std::unique_ptr<bool[]> delivered_;
  std::vector<PendingCredit> pending_;
  std::vector<std::size_t> preds_left_;
  std::vector<std::optional<std::size_t>> placement_;
  std::vector<bool> finished_;
  std::size_t finished_count_ = 0;
  std::vector<CuView> cus_;
  std::vector<ReadyTask> ready_;
  double expected_rb_kb_ = 0.0;
  std::uint64_t idle_slots_ = 0;
  Schedule sched_;
};

}  // namespace engine_detail

/// Runs one scenario to completion and returns the auditable schedule.
///
/// Communication is slot-quantized: at each boundary k*slot_ms the comm
/// policy assigns the F RBs of slot k, and deliveries are credited at the end
/// of the slot. A slice's tx_finish is the end of the first slot in which its
/// cumulative delivery reaches its payload; any excess is dropped. Tasks run
/// non-preemptively for read + comp + write at continuous times. After all
/// events at one instant are applied, the compute policy is offered the idle
/// CUs and ready tasks once.
inline Schedule simulate(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid, CommPolicy& comm,
                         ComputePolicy& compute) {
  return engine_detail::Simulation(cfg, graph, grid, comm, compute).run();
}

}  // namespace winpa
