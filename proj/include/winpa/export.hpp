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
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "winpa/errors.hpp"
#include "winpa/metrics.hpp"
#include "winpa/schedule.hpp"
#include "winpa/workload.hpp"

// CSV schemas
//   gantt.csv           node_id,cu_id,start,read,comp,write,finish,read_mode,write_mode
//   rb_assignments.csv  t,f,s
//   slices.csv          slice,tx_finish_ms
//   run.csv             t_total_ms,horizon_exceeded
//   seeds.csv           seed,bundle,t_total,last_tx_finish,horizon_exceeded
// Reals are written in shortest round-trip form.

namespace winpa {

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void export_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  write_text(path, doc.dump(2) + "\n");
}

inline nlohmann::json import_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

namespace csv_detail {

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Data rows, after checking the header.
inline std::vector<std::vector<std::string>> rows(const std::string& text, std::string_view header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(Errc::parse_error, fmt::format("expected CSV header '{}'", header));
  }
  const auto width = split(header).size();
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != width) throw Error(Errc::parse_error, "CSV row has wrong column count: " + line);
    out.push_back(std::move(cells));
  }
  return out;
}

inline double real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(Errc::parse_error, "bad number '" + s + "'");
  return v;
}

inline std::uint64_t uint(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || *end != '\0') throw Error(Errc::parse_error, "bad integer '" + s + "'");
  return v;
}

inline bool boolean(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw Error(Errc::parse_error, "bad boolean '" + s + "'");
}

}  // namespace csv_detail

inline constexpr std::string_view kGanttHeader = "node_id,cu_id,start,read,comp,write,finish,read_mode,write_mode";
inline constexpr std::string_view kRbHeader = "t,f,s";
inline constexpr std::string_view kSlicesHeader = "slice,tx_finish_ms";
inline constexpr std::string_view kRunHeader = "t_total_ms,horizon_exceeded";
inline constexpr std::string_view kSeedsHeader = "seed,bundle,t_total,last_tx_finish,horizon_exceeded";

inline std::string gantt_csv(const Schedule& s) {
  std::string out = std::string(kGanttHeader) + "\n";
  for (const auto& e : s.gantt) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", e.node_id, e.cu_id, e.start_ms, e.read_ms, e.comp_ms,
                       e.write_ms, e.finish_ms, to_string(e.read_mode), to_string(e.write_mode));
  }
  return out;
}

/// Writes the four schedule CSV files into `dir`.
inline void export_schedule_csv(const Schedule& s, const std::filesystem::path& dir) {
  write_text(dir / "gantt.csv", gantt_csv(s));
  std::string rb = std::string(kRbHeader) + "\n";
  for (const auto& a : s.rb_assignments) rb += fmt::format("{},{},{}\n", a.t, a.f, a.slice);
  write_text(dir / "rb_assignments.csv", rb);
  std::string sl = std::string(kSlicesHeader) + "\n";
  for (std::size_t i = 0; i < s.tx_finish_ms.size(); ++i) sl += fmt::format("{},{}\n", i, s.tx_finish_ms[i]);
  write_text(dir / "slices.csv", sl);
  write_text(dir / "run.csv", fmt::format("{}\n{},{}\n", kRunHeader, s.t_total_ms, s.horizon_exceeded));
}

inline Schedule import_schedule_csv(const std::filesystem::path& dir) {
  using namespace csv_detail;
  Schedule s;
  for (const auto& r : rows(read_text(dir / "gantt.csv"), kGanttHeader)) {
    s.gantt.push_back({uint(r[0]), uint(r[1]), real(r[2]), real(r[3]), real(r[4]), real(r[5]), real(r[6]),
                       memory_mode_from(r[7]), memory_mode_from(r[8])});
  }
  for (const auto& r : rows(read_text(dir / "rb_assignments.csv"), kRbHeader)) {
    s.rb_assignments.push_back({uint(r[0]), uint(r[1]), uint(r[2])});
  }
  for (const auto& r : rows(read_text(dir / "slices.csv"), kSlicesHeader)) {
    if (uint(r[0]) != s.tx_finish_ms.size()) throw Error(Errc::parse_error, "slices.csv rows out of order");
    s.tx_finish_ms.push_back(real(r[1]));
  }
  const auto run = rows(read_text(dir / "run.csv"), kRunHeader);
  if (run.size() != 1) throw Error(Errc::parse_error, "run.csv must have one data row");
  s.t_total_ms = real(run[0][0]);
  s.horizon_exceeded = boolean(run[0][1]);
  return s;
}

inline std::string seeds_csv(const MonteCarloSummary& m) {
  std::string out = std::string(kSeedsHeader) + "\n";
  for (const auto& r : m.records) {
    out += fmt::format("{},{},{},{},{}\n", r.seed, r.bundle, r.t_total_ms, r.last_tx_finish_ms, r.horizon_exceeded);
  }
  return out;
}

inline std::vector<SeedRecord> parse_seeds_csv(const std::string& text) {
  using namespace csv_detail;
  std::vector<SeedRecord> out;
  for (const auto& r : rows(text, kSeedsHeader)) out.push_back({uint(r[0]), r[1], real(r[2]), real(r[3]), boolean(r[4])});
  return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "point,n_cus,n_freq,rate_min_kbps,rate_max_kbps,cu_speed_factors,bundle,n,mean,stddev,min,max,"
      "diff_mean,diff_ci95_lo,diff_ci95_hi\n";
  for (const auto& row : rows) {
    const auto& c = row.point.cfg;
    const auto& d = row.summary.diff;
    for (const auto& b : row.summary.bundles) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.point.index, c.n_cus, c.n_freq,
                         c.rate_min_kbps, c.rate_max_kbps, fmt::join(c.cu_speed_factors, ";"), b.bundle, b.n,
                         b.mean, b.stddev, b.min, b.max, d.mean, d.ci_lo, d.ci_hi);
    }
  }
  return out;
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    out.push_back({{"point", row.point.index},
                   {"config", config_to_json(row.point.cfg)},
                   {"summary", summary_to_json(row.summary)}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG Gantt chart

/// One lane per slice (transmission slots) above one lane per CU. Every task
/// is a <g class="task"> with read, comp and write segments.
inline std::string gantt_svg(const Schedule& s, const TaskGraph& graph, std::size_t n_cus, double slot_ms) {
  constexpr double kLeft = 70.0, kTop = 30.0, kLane = 22.0, kGap = 6.0, kWidth = 900.0;
  const double span = std::max({s.t_total_ms, s.last_tx_finish_ms(), 1.0});
  const double scale = kWidth / span;
  const std::size_t n_slices = s.tx_finish_ms.size();
  const std::size_t lanes = n_slices + n_cus;
  const double height = kTop + static_cast<double>(lanes) * (kLane + kGap) + 30.0;
  auto lane_y = [&](std::size_t lane) { return kTop + static_cast<double>(lane) * (kLane + kGap); };
  auto x_of = [&](double t) { return kLeft + t * scale; };
  static constexpr std::array<std::string_view, 8> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                            "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};
  auto owner_color = [&](int owner) {
    return owner < 0 ? std::string_view("#7f7f7f") : kPalette[static_cast<std::size_t>(owner) % kPalette.size()];
  };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      kLeft + kWidth + 20.0, height);
  out += fmt::format("<text x=\"{}\" y=\"16\">T_total = {:.3f} ms</text>\n", kLeft, s.t_total_ms);

  for (std::size_t sl = 0; sl < n_slices; ++sl) {
    const double y = lane_y(sl);
    out += fmt::format("<text x=\"4\" y=\"{}\">slice {}</text>\n", y + 15.0, sl);
    std::vector<std::uint64_t> slots;
    for (const auto& a : s.rb_assignments)
      if (a.slice == sl) slots.push_back(a.t);
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    for (std::size_t i = 0; i < slots.size();) {
      std::size_t j = i;
      while (j + 1 < slots.size() && slots[j + 1] == slots[j] + 1) ++j;
      const double t0 = static_cast<double>(slots[i]) * slot_ms;
      const double t1 = static_cast<double>(slots[j] + 1) * slot_ms;
      out += fmt::format("<rect class=\"tx\" x=\"{:.3f}\" y=\"{}\" width=\"{:.3f}\" height=\"{}\" fill=\"{}\" "
                         "opacity=\"0.5\"/>\n",
                         x_of(t0), y, (t1 - t0) * scale, kLane, owner_color(static_cast<int>(sl)));
      i = j + 1;
    }
  }

  for (std::size_t c = 0; c < n_cus; ++c) {
    out += fmt::format("<text x=\"4\" y=\"{}\">CU {}</text>\n", lane_y(n_slices + c) + 15.0, c);
  }
  for (const auto& e : s.gantt) {
    const double y = lane_y(n_slices + e.cu_id);
    const auto& node = graph.nodes.at(e.node_id);
    out += fmt::format("<g class=\"task\" data-node=\"{}\"><title>{} [{:.3f}, {:.3f}] ms</title>\n", e.node_id,
                       node.stage_label, e.start_ms, e.finish_ms);
    double t = e.start_ms;
    const std::array<std::pair<std::string_view, double>, 3> phases{
        {{"read", e.read_ms}, {"comp", e.comp_ms}, {"write", e.write_ms}}};
    for (const auto& [cls, dur] : phases) {
      out += fmt::format("  <rect class=\"{}\" x=\"{:.3f}\" y=\"{}\" width=\"{:.3f}\" height=\"{}\" fill=\"{}\" "
                         "opacity=\"{}\" stroke=\"#222\" stroke-width=\"0.3\"/>\n",
                         cls, x_of(t), y, dur * scale, kLane, owner_color(node.owner), cls == "comp" ? 1.0 : 0.55);
      t += dur;
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void export_gantt_svg(const Schedule& s, const TaskGraph& graph, std::size_t n_cus, double slot_ms,
                             const std::filesystem::path& path) {
  write_text(path, gantt_svg(s, graph, n_cus, slot_ms));
}

}  // namespace winpa
