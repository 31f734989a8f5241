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
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "winpa/channel.hpp"
#include "winpa/engine.hpp"
#include "winpa/errors.hpp"
#include "winpa/policy.hpp"

namespace winpa {

// ---------------------------------------------------------------------------
// Communication policies

/// Decoupled baseline: each RB, in ascending f, goes to the slice with the
/// largest remaining payload. Remaining amounts are reduced inside the slot by
/// the actual sampled transfer of RBs already granted. Ties go to the lowest
/// slice index.
class CommGreedy final : public CommPolicy {
 public:
  CommDecision decide(const PolicyState& st) override {
    std::vector<double> rem(st.remaining_kb.begin(), st.remaining_kb.end());
    CommDecision d;
    d.slice_of_freq.assign(st.cfg.n_freq, std::nullopt);
    for (std::size_t f = 0; f < st.cfg.n_freq; ++f) {
      std::optional<std::size_t> best;
      for (std::size_t s = 0; s < rem.size(); ++s) {
        if (st.delivered[s] || rem[s] <= 0.0) continue;
        if (!best || rem[s] > rem[*best]) best = s;
      }
      if (!best) break;
      d.slice_of_freq[f] = best;
      rem[*best] -= st.grid.transfer_kb(st.slot, f, *best);
    }
    return d;
  }
};

/// Joint greedy: each RB goes to the slice whose projected completion
///   now + remaining / ((granted + 1) * E) + cp_tail
/// is largest, i.e. the current makespan bottleneck. E is the mean per-RB
/// transfer and cp_tail the slice's static critical-path tail to the sink.
class JointGreedy final : public CommPolicy {
 public:
  CommDecision decide(const PolicyState& st) override {
    const std::size_t n = st.remaining_kb.size();
    std::vector<std::size_t> granted(n, 0);
    CommDecision d;
    d.slice_of_freq.assign(st.cfg.n_freq, std::nullopt);
    for (std::size_t f = 0; f < st.cfg.n_freq; ++f) {
      std::optional<std::size_t> best;
      double best_score = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        if (st.delivered[s]) continue;
        const double score = joint_score(st, s, granted[s]);
        if (!best || score > best_score) {
          best = s;
          best_score = score;
        }
      }
      if (!best) break;
      d.slice_of_freq[f] = best;
      ++granted[*best];
    }
    return d;
  }

  static double joint_score(const PolicyState& st, std::size_t s, std::size_t granted) {
    return st.now_ms + st.remaining_kb[s] / (static_cast<double>(granted + 1) * st.expected_rb_kb) +
           st.analysis.cp_tail(s);
  }
};

/// Cycles RBs over undelivered slices in index order; the cursor carries over
/// between slots.
class RbRoundRobin final : public CommPolicy {
 public:
  CommDecision decide(const PolicyState& st) override {
    const std::size_t n = st.remaining_kb.size();
    CommDecision d;
    d.slice_of_freq.assign(st.cfg.n_freq, std::nullopt);
    for (std::size_t f = 0; f < st.cfg.n_freq; ++f) {
      for (std::size_t step = 0; step < n; ++step) {
        const std::size_t s = (cursor_ + step) % n;
        if (!st.delivered[s]) {
          d.slice_of_freq[f] = s;
          cursor_ = (s + 1) % n;
          break;
        }
      }
    }
    return d;
  }

 private:
  std::size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Compute dispatchers

namespace policy_detail {

inline std::vector<CuView> idle_cus(const PolicyState& st) {
  std::vector<CuView> out;
  for (const auto& c : st.cus)
    if (c.idle) out.push_back(c);
  return out;
}

}  // namespace policy_detail

/// Topological greedy: ready tasks by (ready time, id), each to the idle CU
/// with smallest (busy_until, cu_id). Speed-oblivious.
class DispatchFifo final : public ComputePolicy {
 public:
  std::vector<DispatchAssignment> dispatch(const PolicyState& st) override {
    std::vector<ReadyTask> ready(st.ready.begin(), st.ready.end());
    std::sort(ready.begin(), ready.end(), [](const ReadyTask& a, const ReadyTask& b) {
      return a.ready_ms != b.ready_ms ? a.ready_ms < b.ready_ms : a.node < b.node;
    });
    auto idle = policy_detail::idle_cus(st);
    std::sort(idle.begin(), idle.end(), [](const CuView& a, const CuView& b) {
      return a.busy_until_ms != b.busy_until_ms ? a.busy_until_ms < b.busy_until_ms : a.cu_id < b.cu_id;
    });
    std::vector<DispatchAssignment> out;
    for (std::size_t i = 0; i < std::min(ready.size(), idle.size()); ++i) out.push_back({ready[i].node, idle[i].cu_id});
    return out;
  }
};

/// Critical-path priority: ready tasks by descending downstream cp (ties by
/// id), each to the idle CU that minimizes its projected finish under the
/// memory-mode rule (ties by cu_id).
class DispatchCpPriority final : public ComputePolicy {
 public:
  std::vector<DispatchAssignment> dispatch(const PolicyState& st) override {
    std::vector<NodeId> ready;
    for (const auto& r : st.ready) ready.push_back(r.node);
    const auto& cp = st.analysis.cp_ms;
    std::sort(ready.begin(), ready.end(), [&](NodeId a, NodeId b) { return cp[a] != cp[b] ? cp[a] > cp[b] : a < b; });
    auto idle = policy_detail::idle_cus(st);
    std::vector<DispatchAssignment> out;
    for (NodeId v : ready) {
      if (idle.empty()) break;
      std::size_t best = 0;
      double best_finish = 0.0;
      for (std::size_t i = 0; i < idle.size(); ++i) {
        const double f = projected_finish(st, v, idle[i]);
        if (i == 0 || f < best_finish || (f == best_finish && idle[i].cu_id < idle[best].cu_id)) {
          best = i;
          best_finish = f;
        }
      }
      out.push_back({v, idle[best].cu_id});
      idle.erase(idle.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return out;
  }

  static double projected_finish(const PolicyState& st, NodeId v, const CuView& cu) {
    const auto& t = st.graph.nodes[v].timing;
    const auto modes = memory_mode(st.analysis, st.placement, v, cu.cu_id);
    const double start = std::max(cu.busy_until_ms, st.now_ms);
    return start + read_delay(t, modes.read) + t.t_comp_ms * cu.speed + write_delay(t, modes.write);
  }
};

// ---------------------------------------------------------------------------
// Registry

using CommFactory = std::function<std::unique_ptr<CommPolicy>(const PolicyContext&)>;
using ComputeFactory = std::function<std::unique_ptr<ComputePolicy>(const PolicyContext&)>;

struct Bundle {
  std::string comm;
  std::string compute;
};

/// Process-wide name -> factory table. Built-ins are registered on first use;
/// add_* lets callers plug in further (e.g. learned) policies.
class PolicyRegistry {
 public:
  static PolicyRegistry& instance() {
    static PolicyRegistry reg;
    return reg;
  }

  void add_comm(const std::string& name, CommFactory f) {
    std::lock_guard lock(mu_);
    comm_[name] = std::move(f);
  }
  void add_compute(const std::string& name, ComputeFactory f) {
    std::lock_guard lock(mu_);
    compute_[name] = std::move(f);
  }
  void add_bundle(const std::string& name, Bundle b) {
    std::lock_guard lock(mu_);
    bundles_[name] = std::move(b);
  }

  std::unique_ptr<CommPolicy> make_comm(const std::string& name, const PolicyContext& ctx) const {
    std::lock_guard lock(mu_);
    const auto it = comm_.find(name);
    if (it == comm_.end()) throw Error(Errc::unknown_policy, "communication policy '" + name + "'");
    return it->second(ctx);
  }
  std::unique_ptr<ComputePolicy> make_compute(const std::string& name, const PolicyContext& ctx) const {
    std::lock_guard lock(mu_);
    const auto it = compute_.find(name);
    if (it == compute_.end()) throw Error(Errc::unknown_policy, "compute policy '" + name + "'");
    return it->second(ctx);
  }
  Bundle bundle(const std::string& name) const {
    std::lock_guard lock(mu_);
    const auto it = bundles_.find(name);
    if (it == bundles_.end()) throw Error(Errc::unknown_policy, "bundle '" + name + "'");
    return it->second;
  }
  bool has_comm(const std::string& name) const {
    std::lock_guard lock(mu_);
    return comm_.contains(name);
  }
  bool has_compute(const std::string& name) const {
    std::lock_guard lock(mu_);
    return compute_.contains(name);
  }

  std::vector<std::string> bundle_names() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, _] : bundles_) out.push_back(k);
    return out;
  }

 private:
  PolicyRegistry() {
    comm_["comm_greedy"] = [](const PolicyContext&) { return std::make_unique<CommGreedy>(); };
    comm_["joint_greedy"] = [](const PolicyContext&) { return std::make_unique<JointGreedy>(); };
    comm_["rb_round_robin"] = [](const PolicyContext&) { return std::make_unique<RbRoundRobin>(); };
    compute_["dispatch_fifo"] = [](const PolicyContext&) { return std::make_unique<DispatchFifo>(); };
    compute_["dispatch_cp_priority"] = [](const PolicyContext&) { return std::make_unique<DispatchCpPriority>(); };
    bundles_["joint"] = {"joint_greedy", "dispatch_cp_priority"};
    bundles_["decoupled"] = {"comm_greedy", "dispatch_fifo"};
  }

  mutable std::mutex mu_;
  std::map<std::string, CommFactory> comm_;
  std::map<std::string, ComputeFactory> compute_;
  std::map<std::string, Bundle> bundles_;
};

/// Runs the scenario with registered policies looked up by name.
inline Schedule run(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid,
                    const std::string& comm_name, const std::string& compute_name) {
  const auto analysis = analyze_graph(graph, cfg.n_slices);
  const PolicyContext ctx{cfg, graph, analysis};
  auto& reg = PolicyRegistry::instance();
  auto comm = reg.make_comm(comm_name, ctx);
  auto compute = reg.make_compute(compute_name, ctx);
  return simulate(cfg, graph, grid, *comm, *compute);
}

/// Runs with the policies named in the config.
inline Schedule run(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid) {
  return run(cfg, graph, grid, cfg.comm_policy, cfg.compute_policy);
}

inline Schedule run_bundle(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid,
                           const std::string& bundle) {
  const Bundle b = PolicyRegistry::instance().bundle(bundle);
  return run(cfg, graph, grid, b.comm, b.compute);
}

}  // namespace winpa
