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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "winpa/config.hpp"
#include "winpa/errors.hpp"
#include "winpa/rng.hpp"

namespace winpa {

using NodeId = std::size_t;

// Owner of a task: a slice index, or the cross-slice fusion stage.
inline constexpr int kFusionOwner = -1;

inline constexpr std::array<std::string_view, 4> kFusionLabels{"Align1", "Align2", "Fusion",
                                                               "Classifier"};

struct TimingParams {
  double t_comp_ms = 0.0;
  double t_read_on_ms = 0.0;
  double t_write_on_ms = 0.0;
  double t_read_off_ms = 0.0;
  double t_write_off_ms = 0.0;
  bool operator==(const TimingParams&) const = default;
};

struct TaskNode {
  NodeId node_id = 0;
  int owner = 0;
  std::string stage_label;
  TimingParams timing;

  bool is_fusion() const { return owner == kFusionOwner; }
  bool operator==(const TaskNode&) const = default;
};

struct Edge {
  NodeId pred = 0;
  NodeId succ = 0;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

struct TaskGraph {
  std::vector<TaskNode> nodes;
  std::vector<Edge> edges;

  std::size_t size() const { return nodes.size(); }

  std::optional<NodeId> find_label(std::string_view label) const {
    for (const auto& n : nodes) {
      if (n.is_fusion() && n.stage_label == label) return n.node_id;
    }
    return std::nullopt;
  }

  bool operator==(const TaskGraph&) const = default;
};

/// Draw order is fixed: comp, read_on, write_on, read_off, write_off.
inline TimingParams sample_timings(RngStream& stream, const SimConfig& cfg) {
  TimingParams t;
  t.t_comp_ms = uniform(stream, cfg.comp_range_ms.lo, cfg.comp_range_ms.hi);
  t.t_read_on_ms = uniform(stream, cfg.read_on_range_ms.lo, cfg.read_on_range_ms.hi);
  t.t_write_on_ms = uniform(stream, cfg.write_on_range_ms.lo, cfg.write_on_range_ms.hi);
  t.t_read_off_ms = uniform(stream, cfg.read_off_range_ms.lo, cfg.read_off_range_ms.hi);
  t.t_write_off_ms = uniform(stream, cfg.write_off_range_ms.lo, cfg.write_off_range_ms.hi);
  return t;
}

inline bool timings_in_range(const TimingParams& t, const SimConfig& cfg) {
  return cfg.comp_range_ms.contains(t.t_comp_ms) && cfg.read_on_range_ms.contains(t.t_read_on_ms) &&
         cfg.write_on_range_ms.contains(t.t_write_on_ms) &&
         cfg.read_off_range_ms.contains(t.t_read_off_ms) &&
         cfg.write_off_range_ms.contains(t.t_write_off_ms);
}

/// Structure of one slice's DAG with local ids 0..n-1 in topological order.
///
/// Node count is uniform over nodes_per_slice_range. Every node j >= 1 gets
/// one predecessor drawn uniformly from [0, j), and every other earlier node
/// i < j independently adds an edge i -> j with probability intra_edge_prob,
/// so node 0 is the only source. Draws happen in the order: count, then for
/// each j the parent followed by the Bernoulli trials in ascending i.
/// Timings are left zero; generate_workload fills them from separate streams.
inline TaskGraph generate_slice_dag(std::size_t slice, RngStream& stream, const SimConfig& cfg) {
  const auto n = static_cast<std::size_t>(
      uniform_int(stream, cfg.nodes_per_slice_range.lo, cfg.nodes_per_slice_range.hi));
  TaskGraph g;
  g.nodes.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.nodes.push_back({j, static_cast<int>(slice),
                       "s" + std::to_string(slice) + ".op" + std::to_string(j), {}});
  }
  for (std::size_t j = 1; j < n; ++j) {
    const auto parent = static_cast<std::size_t>(uniform_int(stream, 0, static_cast<std::int64_t>(j) - 1));
    for (std::size_t i = 0; i < j; ++i) {
      if (i == parent) {
        g.edges.push_back({i, j});
      } else if (bernoulli(stream, cfg.intra_edge_prob)) {
        g.edges.push_back({i, j});
      }
    }
  }
  return g;
}

/// Full cross-slice workload. Streams: "dag:<s>" and "timing:<s>" per slice,
/// "timing:fusion" for the four fusion-stage nodes. Slices are laid out in
/// index order with dense global ids, followed by Align1, Align2, Fusion,
/// Classifier. Sinks of the first align1_count() slices feed Align1, the rest
/// feed Align2.
inline TaskGraph generate_workload(const SimConfig& cfg) {
  TaskGraph g;
  std::vector<std::vector<NodeId>> sinks(cfg.n_slices);
  for (std::size_t s = 0; s < cfg.n_slices; ++s) {
    auto dag_stream = derive_stream(cfg.seed, "dag:" + std::to_string(s));
    auto timing_stream = derive_stream(cfg.seed, "timing:" + std::to_string(s));
    TaskGraph part = generate_slice_dag(s, dag_stream, cfg);
    const NodeId base = g.nodes.size();
    std::vector<bool> has_succ(part.size(), false);
    for (const auto& e : part.edges) has_succ[e.pred] = true;
    for (auto& node : part.nodes) {
      node.node_id += base;
      node.timing = sample_timings(timing_stream, cfg);
      g.nodes.push_back(std::move(node));
    }
    for (const auto& e : part.edges) g.edges.push_back({e.pred + base, e.succ + base});
    for (std::size_t j = 0; j < part.size(); ++j) {
      if (!has_succ[j]) sinks[s].push_back(base + j);
    }
  }

  auto fusion_stream = derive_stream(cfg.seed, "timing:fusion");
  std::array<NodeId, 4> fid{};
  for (std::size_t k = 0; k < kFusionLabels.size(); ++k) {
    fid[k] = g.nodes.size();
    g.nodes.push_back({fid[k], kFusionOwner, std::string(kFusionLabels[k]),
                       sample_timings(fusion_stream, cfg)});
  }
  const std::size_t split = cfg.align1_count();
  for (std::size_t s = 0; s < cfg.n_slices; ++s) {
    const NodeId align = s < split ? fid[0] : fid[1];
    for (NodeId v : sinks[s]) g.edges.push_back({v, align});
  }
  g.edges.push_back({fid[0], fid[2]});
  g.edges.push_back({fid[1], fid[2]});
  g.edges.push_back({fid[2], fid[3]});
  return g;
}

// ---------------------------------------------------------------------------
// Independent structural checker.

enum class GraphErrorKind { malformed, cyclic, multi_source, bad_fusion_wiring, unreachable, node_count };

constexpr std::string_view to_string(GraphErrorKind k) {
  switch (k) {
    case GraphErrorKind::malformed: return "malformed";
    case GraphErrorKind::cyclic: return "cyclic";
    case GraphErrorKind::multi_source: return "multi_source";
    case GraphErrorKind::bad_fusion_wiring: return "bad_fusion_wiring";
    case GraphErrorKind::unreachable: return "unreachable";
    case GraphErrorKind::node_count: return "node_count";
  }
  return "unknown";
}

struct GraphError {
  GraphErrorKind kind;
  // Slice index for multi_source/node_count, node id for unreachable.
  std::size_t subject = 0;
  std::string detail;
};

/// Returns nullopt when the graph satisfies every TaskGraph invariant.
inline std::optional<GraphError> validate_graph(const TaskGraph& g) {
  const std::size_t n = g.nodes.size();
  auto fail = [](GraphErrorKind k, std::size_t subject, std::string detail) {
    return std::optional<GraphError>(GraphError{k, subject, std::move(detail)});
  };

  int max_slice = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = g.nodes[i];
    if (node.node_id != i) return fail(GraphErrorKind::malformed, i, "ids not dense");
    if (node.owner < kFusionOwner) return fail(GraphErrorKind::malformed, i, "bad owner");
    max_slice = std::max(max_slice, node.owner);
  }
  std::vector<std::vector<NodeId>> succ(n), pred(n);
  for (const auto& e : g.edges) {
    if (e.pred >= n || e.succ >= n) return fail(GraphErrorKind::malformed, 0, "edge endpoint out of range");
    succ[e.pred].push_back(e.succ);
    pred[e.succ].push_back(e.pred);
  }

  // Kahn's algorithm.
  {
    std::vector<std::size_t> indeg(n);
    for (std::size_t v = 0; v < n; ++v) indeg[v] = pred[v].size();
    std::vector<NodeId> stack;
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] == 0) stack.push_back(v);
    std::size_t seen = 0;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      ++seen;
      for (NodeId w : succ[u])
        if (--indeg[w] == 0) stack.push_back(w);
    }
    if (seen != n) return fail(GraphErrorKind::cyclic, 0, "no topological order");
  }

  const auto n_slices = static_cast<std::size_t>(max_slice + 1);
  std::vector<std::size_t> sources(n_slices, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.nodes[v].owner >= 0 && pred[v].empty()) ++sources[static_cast<std::size_t>(g.nodes[v].owner)];
  }
  for (std::size_t s = 0; s < n_slices; ++s) {
    if (sources[s] != 1) {
      return fail(GraphErrorKind::multi_source, s,
                  "slice " + std::to_string(s) + " has " + std::to_string(sources[s]) + " sources");
    }
  }

  // Fusion wiring.
  std::array<std::optional<NodeId>, 4> fid{};
  std::size_t fusion_nodes = 0;
  for (const auto& node : g.nodes) {
    if (!node.is_fusion()) continue;
    ++fusion_nodes;
    const auto it = std::find(kFusionLabels.begin(), kFusionLabels.end(), node.stage_label);
    if (it == kFusionLabels.end()) return fail(GraphErrorKind::bad_fusion_wiring, node.node_id, "unknown fusion label");
    auto& slot = fid[static_cast<std::size_t>(it - kFusionLabels.begin())];
    if (slot) return fail(GraphErrorKind::bad_fusion_wiring, node.node_id, "duplicate fusion label");
    slot = node.node_id;
  }
  if (fusion_nodes != 4) return fail(GraphErrorKind::bad_fusion_wiring, 0, "expected four fusion nodes");
  const NodeId align1 = *fid[0], align2 = *fid[1], fusion = *fid[2], classifier = *fid[3];
  auto has_edge = [&](NodeId u, NodeId v) {
    return std::find(succ[u].begin(), succ[u].end(), v) != succ[u].end();
  };
  if (!has_edge(align1, fusion) || !has_edge(align2, fusion) || !has_edge(fusion, classifier)) {
    return fail(GraphErrorKind::bad_fusion_wiring, 0, "missing fusion-stage edge");
  }
  if (succ[align1].size() != 1 || succ[align2].size() != 1 || succ[fusion].size() != 1 ||
      !succ[classifier].empty() || pred[fusion].size() != 2 || pred[classifier].size() != 1) {
    return fail(GraphErrorKind::bad_fusion_wiring, 0, "extra fusion-stage edges");
  }
  std::vector<std::optional<NodeId>> slice_target(n_slices);
  for (const auto& e : g.edges) {
    const int po = g.nodes[e.pred].owner, so = g.nodes[e.succ].owner;
    if (po == kFusionOwner) continue;  // fusion-internal edges checked above
    if (so == kFusionOwner) {
      if (e.succ != align1 && e.succ != align2) {
        return fail(GraphErrorKind::bad_fusion_wiring, e.pred, "slice feeds a non-align node");
      }
      auto& tgt = slice_target[static_cast<std::size_t>(po)];
      if (tgt && *tgt != e.succ) return fail(GraphErrorKind::bad_fusion_wiring, e.pred, "slice feeds both align nodes");
      tgt = e.succ;
    } else if (po != so) {
      return fail(GraphErrorKind::bad_fusion_wiring, e.pred, "direct cross-slice edge");
    }
  }
  for (NodeId a : {align1, align2}) {
    for (NodeId p : pred[a]) {
      if (g.nodes[p].is_fusion()) return fail(GraphErrorKind::bad_fusion_wiring, p, "fusion node feeds align");
    }
  }

  // Reverse reachability from Classifier.
  std::vector<bool> reach(n, false);
  std::vector<NodeId> stack{classifier};
  reach[classifier] = true;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId p : pred[v]) {
      if (!reach[p]) {
        reach[p] = true;
        stack.push_back(p);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reach[v]) return fail(GraphErrorKind::unreachable, v, "node cannot reach Classifier");
  }
  return std::nullopt;
}

/// Structural check plus the config-dependent invariants (slice count, node
/// counts, timing ranges).
inline std::optional<GraphError> validate_graph(const TaskGraph& g, const SimConfig& cfg) {
  if (auto err = validate_graph(g)) return err;
  std::vector<std::int64_t> count(cfg.n_slices, 0);
  for (const auto& node : g.nodes) {
    if (!node.is_fusion()) {
      if (static_cast<std::size_t>(node.owner) >= cfg.n_slices) {
        return GraphError{GraphErrorKind::malformed, node.node_id, "owner exceeds n_slices"};
      }
      ++count[static_cast<std::size_t>(node.owner)];
    }
    if (!timings_in_range(node.timing, cfg)) {
      return GraphError{GraphErrorKind::malformed, node.node_id, "timing outside configured range"};
    }
  }
  for (std::size_t s = 0; s < cfg.n_slices; ++s) {
    if (count[s] < cfg.nodes_per_slice_range.lo || count[s] > cfg.nodes_per_slice_range.hi) {
      return GraphError{GraphErrorKind::node_count, s, "slice node count outside range"};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json workload_to_json(const TaskGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nlohmann::json jn;
    jn["id"] = n.node_id;
    if (n.is_fusion()) {
      jn["owner"] = "fusion";
    } else {
      jn["owner"] = n.owner;
    }
    jn["label"] = n.stage_label;
    jn["timing"] = {{"t_comp_ms", n.timing.t_comp_ms},
                    {"t_read_on_ms", n.timing.t_read_on_ms},
                    {"t_write_on_ms", n.timing.t_write_on_ms},
                    {"t_read_off_ms", n.timing.t_read_off_ms},
                    {"t_write_off_ms", n.timing.t_write_off_ms}};
    nodes.push_back(std::move(jn));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e.pred, e.succ});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline TaskGraph workload_from_json(const nlohmann::json& j) {
  try {
    TaskGraph g;
    for (const auto& jn : j.at("nodes")) {
      TaskNode n;
      n.node_id = jn.at("id").get<NodeId>();
      const auto& owner = jn.at("owner");
      if (owner.is_string()) {
        if (owner.get<std::string>() != "fusion") throw Error(Errc::parse_error, "owner must be an index or \"fusion\"");
        n.owner = kFusionOwner;
      } else {
        n.owner = owner.get<int>();
        if (n.owner < 0) throw Error(Errc::parse_error, "negative owner");
      }
      n.stage_label = jn.at("label").get<std::string>();
      const auto& t = jn.at("timing");
      n.timing = {t.at("t_comp_ms").get<double>(), t.at("t_read_on_ms").get<double>(),
                  t.at("t_write_on_ms").get<double>(), t.at("t_read_off_ms").get<double>(),
                  t.at("t_write_off_ms").get<double>()};
      g.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
      if (!je.is_array() || je.size() != 2) throw Error(Errc::parse_error, "edge must be [pred, succ]");
      g.edges.push_back({je[0].get<NodeId>(), je[1].get<NodeId>()});
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("workload: ") + e.what());
  }
}

}  // namespace winpa
