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

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "winpa/errors.hpp"

// Units used throughout: 1 kB = 1000 bytes, 1 kb = 1000 bits, rates in kbps,
// times in milliseconds (double).

namespace winpa {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

struct CountRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool operator==(const CountRange&) const = default;
};

struct SimConfig {
  std::size_t n_slices = 6;
  std::size_t n_cus = 4;
  std::size_t n_freq = 8;
  std::size_t horizon_slots = 500;
  double slot_ms = 1.0;
  std::vector<double> payloads_kb{1.0, 7.5, 25.0, 10.0, 35.0, 50.0};
  double rate_min_kbps = 20.0;
  double rate_max_kbps = 2000.0;
  Interval comp_range_ms{5.0, 25.0};
  Interval read_on_range_ms{0.1, 0.6};
  Interval write_on_range_ms{0.1, 0.6};
  Interval read_off_range_ms{2.0, 8.0};
  Interval write_off_range_ms{2.0, 8.0};
  // Empty means "one 1.0 factor per CU"; validate_config fills it in.
  std::vector<double> cu_speed_factors;
  CountRange nodes_per_slice_range{5, 6};
  double intra_edge_prob = 0.4;
  // Number of leading slices whose sinks feed Align1; unset means ceil(n_slices / 2).
  std::optional<std::size_t> align1_slices;
  std::uint64_t seed = 0;
  std::string comm_policy = "joint_greedy";
  std::string compute_policy = "dispatch_cp_priority";

  std::size_t align1_count() const { return align1_slices.value_or((n_slices + 1) / 2); }
  double mean_rate_kbps() const { return 0.5 * (rate_min_kbps + rate_max_kbps); }

  bool operator==(const SimConfig&) const = default;
};

namespace config_detail {

inline void require(bool ok, const char* field, const char* reason) {
  if (!ok) throw InvalidConfig(field, reason);
}

inline void check_interval(const Interval& iv, const char* field) {
  require(std::isfinite(iv.lo) && std::isfinite(iv.hi), field, "non-finite bound");
  require(iv.lo >= 0.0, field, "lower bound < 0");
  require(iv.lo <= iv.hi, field, "lower > upper");
}

}  // namespace config_detail

/// Checks every SimConfig invariant in declaration order and returns the
/// normalized record. Throws InvalidConfig naming the first violation.
inline SimConfig validate_config(SimConfig cfg) {
  using config_detail::check_interval;
  using config_detail::require;

  require(cfg.n_slices >= 1, "n_slices", "must be >= 1");
  require(cfg.n_cus >= 1, "n_cus", "must be >= 1");
  require(cfg.n_freq >= 1, "n_freq", "must be >= 1");
  require(cfg.horizon_slots >= 1, "horizon_slots", "must be >= 1");
  require(std::isfinite(cfg.slot_ms) && cfg.slot_ms > 0.0, "slot_ms", "must be > 0");
  require(cfg.payloads_kb.size() == cfg.n_slices, "payloads_kb", "length mismatch");
  for (double d : cfg.payloads_kb) {
    require(std::isfinite(d) && d >= 0.0, "payloads_kb", "payload < 0");
  }
  require(std::isfinite(cfg.rate_min_kbps) && std::isfinite(cfg.rate_max_kbps), "rate_bounds",
          "non-finite bound");
  require(cfg.rate_min_kbps > 0.0 && cfg.rate_max_kbps > 0.0, "rate_bounds", "rates must be > 0");
  require(cfg.rate_min_kbps <= cfg.rate_max_kbps, "rate_bounds", "min > max");
  check_interval(cfg.comp_range_ms, "comp_range_ms");
  check_interval(cfg.read_on_range_ms, "read_on_range_ms");
  check_interval(cfg.write_on_range_ms, "write_on_range_ms");
  check_interval(cfg.read_off_range_ms, "read_off_range_ms");
  check_interval(cfg.write_off_range_ms, "write_off_range_ms");
  if (cfg.cu_speed_factors.empty()) cfg.cu_speed_factors.assign(cfg.n_cus, 1.0);
  require(cfg.cu_speed_factors.size() == cfg.n_cus, "cu_speed_factors", "length mismatch");
  for (double f : cfg.cu_speed_factors) {
    require(std::isfinite(f) && f > 0.0, "cu_speed_factors", "factor must be > 0");
  }
  require(cfg.nodes_per_slice_range.lo >= 1, "nodes_per_slice_range", "lower bound < 1");
  require(cfg.nodes_per_slice_range.lo <= cfg.nodes_per_slice_range.hi, "nodes_per_slice_range",
          "lower > upper");
  require(cfg.intra_edge_prob >= 0.0 && cfg.intra_edge_prob <= 1.0, "intra_edge_prob",
          "outside [0, 1]");
  if (cfg.align1_slices) {
    require(*cfg.align1_slices <= cfg.n_slices, "align1_slices", "exceeds n_slices");
  }
  require(!cfg.comm_policy.empty(), "comm_policy", "empty identifier");
  require(!cfg.compute_policy.empty(), "compute_policy", "empty identifier");
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON

namespace config_detail {

template <typename T>
T get_as(const nlohmann::json& j, const char* field) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidConfig(field, "wrong type");
  }
}

inline Interval interval_from(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidConfig(field, "expected [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::size_t count_from(const nlohmann::json& j, const char* field) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw InvalidConfig(field, "expected non-negative integer");
  }
  return j.get<std::size_t>();
}

inline double real_from(const nlohmann::json& j, const char* field) {
  if (!j.is_number()) throw InvalidConfig(field, "expected number");
  return j.get<double>();
}

inline std::vector<double> reals_from(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw InvalidConfig(field, "expected array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(real_from(v, field));
  return out;
}

}  // namespace config_detail

/// Reads a config document. Absent keys keep their defaults; unknown keys are
/// rejected. The result is not yet validated.
inline SimConfig config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  if (!j.is_object()) throw InvalidConfig("<root>", "expected JSON object");
  static const std::set<std::string> known{
      "n_slices",         "n_cus",            "n_freq",
      "horizon_slots",    "slot_ms",          "payloads_kb",
      "rate_min_kbps",    "rate_max_kbps",    "comp_range_ms",
      "read_on_range_ms", "write_on_range_ms", "read_off_range_ms",
      "write_off_range_ms", "cu_speed_factors", "nodes_per_slice_range",
      "intra_edge_prob",  "align1_slices",    "seed",
      "comm_policy",      "compute_policy"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InvalidConfig(key, "unknown key");
  }

  SimConfig cfg;
  auto has = [&](const char* k) { return j.contains(k); };
  if (has("n_slices")) cfg.n_slices = count_from(j["n_slices"], "n_slices");
  if (has("n_cus")) cfg.n_cus = count_from(j["n_cus"], "n_cus");
  if (has("n_freq")) cfg.n_freq = count_from(j["n_freq"], "n_freq");
  if (has("horizon_slots")) cfg.horizon_slots = count_from(j["horizon_slots"], "horizon_slots");
  if (has("slot_ms")) cfg.slot_ms = real_from(j["slot_ms"], "slot_ms");
  if (has("payloads_kb")) cfg.payloads_kb = reals_from(j["payloads_kb"], "payloads_kb");
  if (has("rate_min_kbps")) cfg.rate_min_kbps = real_from(j["rate_min_kbps"], "rate_min_kbps");
  if (has("rate_max_kbps")) cfg.rate_max_kbps = real_from(j["rate_max_kbps"], "rate_max_kbps");
  if (has("comp_range_ms")) cfg.comp_range_ms = interval_from(j["comp_range_ms"], "comp_range_ms");
  if (has("read_on_range_ms"))
    cfg.read_on_range_ms = interval_from(j["read_on_range_ms"], "read_on_range_ms");
  if (has("write_on_range_ms"))
    cfg.write_on_range_ms = interval_from(j["write_on_range_ms"], "write_on_range_ms");
  if (has("read_off_range_ms"))
    cfg.read_off_range_ms = interval_from(j["read_off_range_ms"], "read_off_range_ms");
  if (has("write_off_range_ms"))
    cfg.write_off_range_ms = interval_from(j["write_off_range_ms"], "write_off_range_ms");
  if (has("cu_speed_factors"))
    cfg.cu_speed_factors = reals_from(j["cu_speed_factors"], "cu_speed_factors");
  if (has("nodes_per_slice_range")) {
    const auto& r = j["nodes_per_slice_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw InvalidConfig("nodes_per_slice_range", "expected [lo, hi] integers");
    }
    cfg.nodes_per_slice_range = {r[0].get<std::int64_t>(), r[1].get<std::int64_t>()};
  }
  if (has("intra_edge_prob"))
    cfg.intra_edge_prob = real_from(j["intra_edge_prob"], "intra_edge_prob");
  if (has("align1_slices") && !j["align1_slices"].is_null())
    cfg.align1_slices = count_from(j["align1_slices"], "align1_slices");
  if (has("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"] >= 0)) {
      throw InvalidConfig("seed", "expected unsigned 64-bit integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (has("comm_policy")) cfg.comm_policy = get_as<std::string>(j["comm_policy"], "comm_policy");
  if (has("compute_policy"))
    cfg.compute_policy = get_as<std::string>(j["compute_policy"], "compute_policy");
  return cfg;
}

inline nlohmann::json config_to_json(const SimConfig& cfg) {
  auto iv = [](const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); };
  nlohmann::json j;
  j["n_slices"] = cfg.n_slices;
  j["n_cus"] = cfg.n_cus;
  j["n_freq"] = cfg.n_freq;
  j["horizon_slots"] = cfg.horizon_slots;
  j["slot_ms"] = cfg.slot_ms;
  j["payloads_kb"] = cfg.payloads_kb;
  j["rate_min_kbps"] = cfg.rate_min_kbps;
  j["rate_max_kbps"] = cfg.rate_max_kbps;
  j["comp_range_ms"] = iv(cfg.comp_range_ms);
  j["read_on_range_ms"] = iv(cfg.read_on_range_ms);
  j["write_on_range_ms"] = iv(cfg.write_on_range_ms);
  j["read_off_range_ms"] = iv(cfg.read_off_range_ms);
  j["write_off_range_ms"] = iv(cfg.write_off_range_ms);
  j["cu_speed_factors"] = cfg.cu_speed_factors;
  j["nodes_per_slice_range"] = {cfg.nodes_per_slice_range.lo, cfg.nodes_per_slice_range.hi};
  j["intra_edge_prob"] = cfg.intra_edge_prob;
  if (cfg.align1_slices) j["align1_slices"] = *cfg.align1_slices;
  j["seed"] = cfg.seed;
  j["comm_policy"] = cfg.comm_policy;
  j["compute_policy"] = cfg.compute_policy;
  return j;
}

/// WINPA_SEED, when set to an unsigned integer, replaces cfg.seed.
inline SimConfig apply_env_overrides(SimConfig cfg) {
  if (const char* env = std::getenv("WINPA_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || env[0] == '-') {
      throw InvalidConfig("WINPA_SEED", "not an unsigned integer");
    }
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  return cfg;
}

/// Reads, applies WINPA_SEED, and validates a config file.
inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
  return validate_config(apply_env_overrides(config_from_json(j)));
}

}  // namespace winpa
