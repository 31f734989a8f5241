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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/errors.hpp"
#include "winpa/policies.hpp"
#include "winpa/schedule.hpp"
#include "winpa/workload.hpp"

namespace winpa {

struct MetricsReport {
  double t_total_ms = 0.0;
  std::vector<double> tx_finish_ms;
  // Busy time / t_total per CU.
  std::vector<double> cu_utilization;
  double last_tx_finish_ms = 0.0;
  double compute_finish_ms = 0.0;
  bool horizon_exceeded = false;
};

inline MetricsReport compute_metrics(const Schedule& sched, const SimConfig& cfg) {
  MetricsReport m;
  m.t_total_ms = sched.t_total_ms;
  m.tx_finish_ms = sched.tx_finish_ms;
  m.last_tx_finish_ms = sched.last_tx_finish_ms();
  m.horizon_exceeded = sched.horizon_exceeded;
  std::vector<double> busy(cfg.n_cus, 0.0);
  for (const auto& e : sched.gantt) {
    busy.at(e.cu_id) += e.finish_ms - e.start_ms;
    m.compute_finish_ms = std::max(m.compute_finish_ms, e.finish_ms);
  }
  m.cu_utilization.resize(cfg.n_cus, 0.0);
  if (sched.t_total_ms > 0.0) {
    for (std::size_t c = 0; c < cfg.n_cus; ++c) m.cu_utilization[c] = std::min(1.0, busy[c] / sched.t_total_ms);
  }
  return m;
}

inline nlohmann::json metrics_to_json(const MetricsReport& m) {
  return {{"t_total_ms", m.t_total_ms},
          {"tx_finish_ms", m.tx_finish_ms},
          {"cu_utilization", m.cu_utilization},
          {"last_tx_finish_ms", m.last_tx_finish_ms},
          {"compute_finish_ms", m.compute_finish_ms},
          {"horizon_exceeded", m.horizon_exceeded}};
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct SeedRecord {
  std::uint64_t seed = 0;
  std::string bundle;
  double t_total_ms = 0.0;
  double last_tx_finish_ms = 0.0;
  bool horizon_exceeded = false;
  bool operator==(const SeedRecord&) const = default;
};

struct BundleStats {
  std::string bundle;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool operator==(const BundleStats&) const = default;
};

// Per-seed differences first_bundle - second_bundle with a two-sided
// Student-t 95% interval on their mean. With n < 2 the interval collapses to
// the mean.
struct PairedDiff {
  std::string first;
  std::string second;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool operator==(const PairedDiff&) const = default;
};

struct MonteCarloSummary {
  std::vector<BundleStats> bundles;
  PairedDiff diff;
  // Ordered by seed index, then bundle in request order.
  std::vector<SeedRecord> records;
  bool operator==(const MonteCarloSummary&) const = default;
};

namespace metrics_detail {

inline void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace metrics_detail

inline double t_critical_95(std::size_t dof) {
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, 0.025));
}

/// Recomputes every statistic from the per-seed table. The paired
/// difference is taken between the first two bundles in `order`.
inline MonteCarloSummary summarize(std::vector<SeedRecord> records, const std::vector<std::string>& order) {
  MonteCarloSummary out;
  for (const auto& name : order) {
    std::vector<double> xs;
    for (const auto& r : records)
      if (r.bundle == name) xs.push_back(r.t_total_ms);
    BundleStats b;
    b.bundle = name;
    b.n = xs.size();
    if (!xs.empty()) {
      metrics_detail::mean_sd(xs, b.mean, b.stddev);
      b.min = *std::min_element(xs.begin(), xs.end());
      b.max = *std::max_element(xs.begin(), xs.end());
    }
    out.bundles.push_back(b);
  }
  if (order.size() >= 2) {
    PairedDiff& d = out.diff;
    d.first = order[0];
    d.second = order[1];
    std::map<std::uint64_t, std::pair<std::optional<double>, std::optional<double>>> by_seed;
    std::vector<std::uint64_t> seed_order;
    for (const auto& r : records) {
      if (r.bundle != d.first && r.bundle != d.second) continue;
      auto [it, fresh] = by_seed.try_emplace(r.seed);
      if (fresh) seed_order.push_back(r.seed);
      (r.bundle == d.first ? it->second.first : it->second.second) = r.t_total_ms;
    }
    std::vector<double> diffs;
    for (auto seed : seed_order) {
      const auto& [a, b] = by_seed[seed];
      if (a && b) diffs.push_back(*a - *b);
    }
    d.n = diffs.size();
    if (!diffs.empty()) {
      metrics_detail::mean_sd(diffs, d.mean, d.stddev);
      const double half =
          d.n > 1 ? t_critical_95(d.n - 1) * d.stddev / std::sqrt(static_cast<double>(d.n)) : 0.0;
      d.ci_lo = d.mean - half;
      d.ci_hi = d.mean + half;
    }
  }
  out.records = std::move(records);
  return out;
}

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. The
/// exception of the lowest failing index, if any, is rethrown.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Seed i of a compare run is base_seed + i.
inline std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

/// Paired comparison: per seed, one workload and one channel realization are
/// generated and every bundle runs on them.
inline MonteCarloSummary run_compare(const SimConfig& base, const std::vector<std::uint64_t>& seeds,
                                     const std::vector<std::string>& bundles = {"joint", "decoupled"},
                                     unsigned threads = 0) {
  if (seeds.empty()) throw Error(Errc::invalid_config, "run_compare needs at least one seed");
  for (const auto& b : bundles) PolicyRegistry::instance().bundle(b);
  std::vector<SeedRecord> records(seeds.size() * bundles.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) {
        SimConfig cfg = base;
        cfg.seed = seeds[i];
        try {
          const TaskGraph graph = generate_workload(cfg);
          const ChannelGrid grid(cfg);
          for (std::size_t b = 0; b < bundles.size(); ++b) {
            const Schedule s = run_bundle(cfg, graph, grid, bundles[b]);
            records[i * bundles.size() + b] = {seeds[i], bundles[b], s.t_total_ms, s.last_tx_finish_ms(),
                                               s.horizon_exceeded};
          }
        } catch (const Error& e) {
          throw Error(e.code(), fmt::format("seed {}: {}", seeds[i], e.what()));
        }
      },
      threads);
  return summarize(std::move(records), bundles);
}

inline nlohmann::json summary_to_json(const MonteCarloSummary& s) {
  nlohmann::json bundles = nlohmann::json::array();
  for (const auto& b : s.bundles) {
    bundles.push_back(
        {{"bundle", b.bundle}, {"n", b.n}, {"mean", b.mean}, {"stddev", b.stddev}, {"min", b.min}, {"max", b.max}});
  }
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : s.records) {
    records.push_back({{"seed", r.seed},
                       {"bundle", r.bundle},
                       {"t_total", r.t_total_ms},
                       {"last_tx_finish", r.last_tx_finish_ms},
                       {"horizon_exceeded", r.horizon_exceeded}});
  }
  return {{"bundles", std::move(bundles)},
          {"paired_diff",
           {{"first", s.diff.first},
            {"second", s.diff.second},
            {"n", s.diff.n},
            {"mean", s.diff.mean},
            {"stddev", s.diff.stddev},
            {"ci95_lo", s.diff.ci_lo},
            {"ci95_hi", s.diff.ci_hi}}},
          {"records", std::move(records)}};
}

// ---------------------------------------------------------------------------
// Co-design sweep

/// Axes of a sweep. An empty axis keeps the base config's value.
struct SweepGrid {
  std::vector<std::size_t> n_cus;
  std::vector<std::size_t> n_freq;
  std::vector<Interval> rate_bounds;
  std::vector<std::vector<double>> cu_speed_factors;
  std::vector<std::uint64_t> seeds;
};

inline SweepGrid sweep_grid_from_json(const nlohmann::json& j, std::uint64_t base_seed) {
  if (!j.is_object()) throw Error(Errc::parse_error, "sweep grid must be a JSON object");
  static const std::set<std::string> known{"n_cus", "n_freq", "rate_bounds", "cu_speed_factors", "seeds"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(Errc::parse_error, "unknown sweep grid key '" + key + "'");
  }
  SweepGrid g;
  try {
    if (j.contains("n_cus")) g.n_cus = j["n_cus"].get<std::vector<std::size_t>>();
    if (j.contains("n_freq")) g.n_freq = j["n_freq"].get<std::vector<std::size_t>>();
    if (j.contains("rate_bounds")) {
      for (const auto& rb : j["rate_bounds"]) {
        if (!rb.is_array() || rb.size() != 2) throw Error(Errc::parse_error, "rate_bounds entries must be [min, max]");
        g.rate_bounds.push_back({rb[0].get<double>(), rb[1].get<double>()});
      }
    }
    if (j.contains("cu_speed_factors"))
      g.cu_speed_factors = j["cu_speed_factors"].get<std::vector<std::vector<double>>>();
    if (!j.contains("seeds")) {
      g.seeds = seed_range(base_seed, 20);
    } else if (j["seeds"].is_number_unsigned()) {
      g.seeds = seed_range(base_seed, j["seeds"].get<std::size_t>());
    } else {
      g.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("sweep grid: ") + e.what());
  }
  return g;
}

struct SweepPoint {
  std::size_t index = 0;
  SimConfig cfg;
};

/// Cartesian product in fixed order: n_cus (outermost), n_freq, rate_bounds,
/// cu_speed_factors (innermost). Each point is validated.
inline std::vector<SweepPoint> expand_grid(const SimConfig& base, const SweepGrid& grid) {
  const auto axis = [](const auto& v, const auto& fallback) {
    using T = std::decay_t<decltype(fallback)>;
    return v.empty() ? std::vector<T>{fallback} : std::vector<T>(v.begin(), v.end());
  };
  const auto cus = axis(grid.n_cus, base.n_cus);
  const auto freqs = axis(grid.n_freq, base.n_freq);
  const auto rates = axis(grid.rate_bounds, Interval{base.rate_min_kbps, base.rate_max_kbps});
  std::vector<SweepPoint> out;
  for (std::size_t c : cus)
    for (std::size_t f : freqs)
      for (const auto& r : rates) {
        std::vector<std::vector<double>> speeds = grid.cu_speed_factors;
        if (speeds.empty()) {
          speeds.push_back(c == base.n_cus ? base.cu_speed_factors : std::vector<double>{});
        }
        for (const auto& sp : speeds) {
          SimConfig cfg = base;
          cfg.n_cus = c;
          cfg.n_freq = f;
          cfg.rate_min_kbps = r.lo;
          cfg.rate_max_kbps = r.hi;
          cfg.cu_speed_factors = sp;
          const std::size_t index = out.size();
          try {
            out.push_back({index, validate_config(cfg)});
          } catch (const InvalidConfig& e) {
            throw Error(Errc::invalid_grid_point, fmt::format("point {}: {} ({})", index, e.field(), e.reason()));
          }
        }
      }
  if (out.empty()) throw Error(Errc::invalid_grid_point, "sweep grid is empty");
  return out;
}

struct SweepRow {
  SweepPoint point;
  MonteCarloSummary summary;
};

inline std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepGrid& grid,
                                       const std::vector<std::string>& bundles = {"joint", "decoupled"}) {
  if (grid.seeds.empty()) throw Error(Errc::invalid_grid_point, "sweep needs at least one seed");
  std::vector<SweepRow> rows;
  for (auto& point : expand_grid(base, grid)) {
    auto summary = run_compare(point.cfg, grid.seeds, bundles);
    rows.push_back({std::move(point), std::move(summary)});
  }
  return rows;
}

}  // namespace winpa
