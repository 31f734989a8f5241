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

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/engine.hpp"
#include "winpa/errors.hpp"
#include "winpa/policy.hpp"
#include "winpa/schedule.hpp"
#include "winpa/workload.hpp"

namespace winpa {

struct OracleLimits {
  std::size_t max_slices = 2;
  std::size_t max_nodes = 6;
  std::size_t max_cus = 2;
  std::size_t max_freq = 2;
  // Communication slots the search may branch over.
  std::uint64_t slot_cap = 12;
  // Engine evaluations before the search gives up.
  std::uint64_t max_runs = 5'000'000;
};

struct OracleResult {
  double t_total_ms = 0.0;
  Schedule best;
  std::uint64_t runs = 0;
};

namespace oracle_detail {

/// Replayable sequence of decisions. Each run replays the recorded prefix and
/// extends it with choice 0; advance() moves to the next leaf depth-first.
class ChoiceTape {
 public:
  std::size_t choose(std::size_t arity) {
    if (arity <= 1) return 0;
    if (pos_ < tape_.size()) {
      if (tape_[pos_].second != arity) throw Error(Errc::policy_violation, "non-deterministic replay");
      return tape_[pos_++].first;
    }
    tape_.emplace_back(0, arity);
    ++pos_;
    return 0;
  }

  bool advance() {
    pos_ = 0;
    while (!tape_.empty()) {
      auto& [choice, arity] = tape_.back();
      if (choice + 1 < arity) {
        ++choice;
        return true;
      }
      tape_.pop_back();
    }
    return false;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> tape_;
  std::size_t pos_ = 0;
};

// Every RB goes to some slice that still has payload at the slot start.
// Leaving an RB empty never helps: delivery is monotone and excess is dropped.
class EnumeratedComm final : public CommPolicy {
 public:
  EnumeratedComm(ChoiceTape& tape, std::uint64_t slot_cap) : tape_(tape), slot_cap_(slot_cap) {}

  CommDecision decide(const PolicyState& st) override {
    if (st.slot >= slot_cap_) throw Error(Errc::instance_too_large, "communication exceeds the oracle slot cap");
    std::vector<std::size_t> eligible;
    for (std::size_t s = 0; s < st.remaining_kb.size(); ++s)
      if (!st.delivered[s]) eligible.push_back(s);
    const std::size_t f_count = st.cfg.n_freq;
    std::size_t arity = 1;
    for (std::size_t f = 0; f < f_count; ++f) arity *= eligible.size();
    std::size_t code = tape_.choose(arity);
    CommDecision d;
    d.slice_of_freq.assign(f_count, std::nullopt);
    for (std::size_t f = 0; f < f_count; ++f) {
      d.slice_of_freq[f] = eligible[code % eligible.size()];
      code /= eligible.size();
    }
    return d;
  }

 private:
  ChoiceTape& tape_;
  std::uint64_t slot_cap_;
};

// Every injective matching of min(#ready, #idle) ready tasks onto idle CUs.
class EnumeratedDispatch final : public ComputePolicy {
 public:
  explicit EnumeratedDispatch(ChoiceTape& tape) : tape_(tape) {}

  std::vector<DispatchAssignment> dispatch(const PolicyState& st) override {
    std::vector<NodeId> ready;
    for (const auto& r : st.ready) ready.push_back(r.node);
    std::vector<std::size_t> idle;
    for (const auto& c : st.cus)
      if (c.idle) idle.push_back(c.cu_id);

    std::vector<std::vector<DispatchAssignment>> options;
    std::vector<DispatchAssignment> cur;
    std::vector<bool> used;
    if (ready.size() >= idle.size()) {
      // Each idle CU takes a distinct ready task.
      used.assign(ready.size(), false);
      enumerate(idle.size(), [&](std::size_t depth, std::size_t pick) {
        return DispatchAssignment{ready[pick], idle[depth]};
      }, ready.size(), used, cur, options);
    } else {
      // Each ready task takes a distinct idle CU.
      used.assign(idle.size(), false);
      enumerate(ready.size(), [&](std::size_t depth, std::size_t pick) {
        return DispatchAssignment{ready[depth], idle[pick]};
      }, idle.size(), used, cur, options);
    }
    return options[tape_.choose(options.size())];
  }

 private:
  template <typename Make>
  static void enumerate(std::size_t depth_total, const Make& make, std::size_t pool, std::vector<bool>& used,
                        std::vector<DispatchAssignment>& cur, std::vector<std::vector<DispatchAssignment>>& out) {
    if (cur.size() == depth_total) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < pool; ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur.push_back(make(cur.size(), i));
      enumerate(depth_total, make, pool, used, cur, out);
      cur.pop_back();
      used[i] = false;
    }
  }

  ChoiceTape& tape_;
};

}  // namespace oracle_detail

/// Throws instance_too_large unless the instance fits the exhaustive search.
inline void check_oracle_size(const SimConfig& cfg, const TaskGraph& graph, const OracleLimits& lim) {
  auto refuse = [](const std::string& why) { throw Error(Errc::instance_too_large, why); };
  if (cfg.n_slices > lim.max_slices) refuse(fmt::format("n_slices {} > {}", cfg.n_slices, lim.max_slices));
  if (graph.size() > lim.max_nodes) refuse(fmt::format("{} nodes > {}", graph.size(), lim.max_nodes));
  if (cfg.n_cus > lim.max_cus) refuse(fmt::format("n_cus {} > {}", cfg.n_cus, lim.max_cus));
  if (cfg.n_freq > lim.max_freq) refuse(fmt::format("n_freq {} > {}", cfg.n_freq, lim.max_freq));
  // Every slot grants at least one RB (>= the minimum transfer) to an
  // undelivered slice, so this bounds the number of communication slots.
  const double min_kb = kb_per_slot(cfg.rate_min_kbps, cfg.slot_ms);
  double slot_bound = 0.0;
  for (double d : cfg.payloads_kb)
    if (d > 0.0) slot_bound += std::ceil(d / min_kb);
  if (slot_bound > static_cast<double>(lim.slot_cap)) {
    refuse(fmt::format("up to {} communication slots > slot cap {}", slot_bound, lim.slot_cap));
  }
}

/// Minimum t_total over every engine-consistent schedule: all per-slot RB
/// assignments times every non-idling task-to-CU matching at each dispatch
/// instant, each evaluated by the engine itself.
inline OracleResult brute_force_oracle(const SimConfig& cfg, const TaskGraph& graph, const ChannelGrid& grid,
                                       const OracleLimits& lim = {}) {
  check_oracle_size(cfg, graph, lim);
  oracle_detail::ChoiceTape tape;
  OracleResult best;
  best.t_total_ms = std::numeric_limits<double>::infinity();
  do {
    if (best.runs >= lim.max_runs) throw Error(Errc::instance_too_large, "oracle search budget exhausted");
    oracle_detail::EnumeratedComm comm(tape, lim.slot_cap);
    oracle_detail::EnumeratedDispatch compute(tape);
    Schedule s = simulate(cfg, graph, grid, comm, compute);
    ++best.runs;
    if (s.t_total_ms < best.t_total_ms) {
      best.t_total_ms = s.t_total_ms;
      best.best = std::move(s);
    }
  } while (tape.advance());
  return best;
}

}  // namespace winpa
