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
#include <vector>

#include <nlohmann/json.hpp>

#include "winpa/errors.hpp"
#include "winpa/topology.hpp"
#include "winpa/workload.hpp"

namespace winpa {

struct RbAssignment {
  std::uint64_t t = 0;
  std::size_t f = 0;
  std::size_t slice = 0;
  bool operator==(const RbAssignment&) const = default;
};

// One task execution. finish is computed as ((start + read) + comp) + write.
struct GanttEntry {
  NodeId node_id = 0;
  std::size_t cu_id = 0;
  double start_ms = 0.0;
  double read_ms = 0.0;
  double comp_ms = 0.0;
  double write_ms = 0.0;
  double finish_ms = 0.0;
  MemoryMode read_mode = MemoryMode::off_chip;
  MemoryMode write_mode = MemoryMode::off_chip;
  bool operator==(const GanttEntry&) const = default;
};

inline double phase_sum(double start, double read, double comp, double write) {
  return ((start + read) + comp) + write;
}

struct Schedule {
  // Sparse (t, f) -> slice map, ordered by (t, f). Absent pairs are unassigned.
  std::vector<RbAssignment> rb_assignments;
  std::vector<double> tx_finish_ms;
  // Dispatch order.
  std::vector<GanttEntry> gantt;
  double t_total_ms = 0.0;
  bool horizon_exceeded = false;

  double last_tx_finish_ms() const {
    double m = 0.0;
    for (double t : tx_finish_ms) m = std::max(m, t);
    return m;
  }

  bool operator==(const Schedule&) const = default;
};

inline nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json rb = nlohmann::json::array();
  for (const auto& a : s.rb_assignments) rb.push_back({a.t, a.f, a.slice});
  nlohmann::json gantt = nlohmann::json::array();
  for (const auto& e : s.gantt) {
    gantt.push_back({{"node_id", e.node_id},
                     {"cu_id", e.cu_id},
                     {"start", e.start_ms},
                     {"read", e.read_ms},
                     {"comp", e.comp_ms},
                     {"write", e.write_ms},
                     {"finish", e.finish_ms},
                     {"read_mode", to_string(e.read_mode)},
                     {"write_mode", to_string(e.write_mode)}});
  }
  return {{"t_total_ms", s.t_total_ms},
          {"horizon_exceeded", s.horizon_exceeded},
          {"tx_finish_ms", s.tx_finish_ms},
          {"rb_assignments", std::move(rb)},
          {"gantt", std::move(gantt)}};
}

inline Schedule schedule_from_json(const nlohmann::json& j) {
  try {
    Schedule s;
    s.t_total_ms = j.at("t_total_ms").get<double>();
    s.horizon_exceeded = j.at("horizon_exceeded").get<bool>();
    s.tx_finish_ms = j.at("tx_finish_ms").get<std::vector<double>>();
    for (const auto& a : j.at("rb_assignments")) {
      if (!a.is_array() || a.size() != 3) throw Error(Errc::parse_error, "rb assignment must be [t, f, s]");
      s.rb_assignments.push_back({a[0].get<std::uint64_t>(), a[1].get<std::size_t>(), a[2].get<std::size_t>()});
    }
    for (const auto& e : j.at("gantt")) {
      s.gantt.push_back({e.at("node_id").get<NodeId>(), e.at("cu_id").get<std::size_t>(),
                         e.at("start").get<double>(), e.at("read").get<double>(), e.at("comp").get<double>(),
                         e.at("write").get<double>(), e.at("finish").get<double>(),
                         memory_mode_from(e.at("read_mode").get<std::string>()),
                         memory_mode_from(e.at("write_mode").get<std::string>())});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("schedule: ") + e.what());
  }
}

}  // namespace winpa
