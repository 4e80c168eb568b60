// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmdp/roadnet.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "cmdp/csv.h"

namespace cmdp {

RoadGraph::RoadGraph(std::vector<Location> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Location& a, const Location& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw InvalidArgument("duplicate node id " +
                            std::to_string(nodes_[i].id));
    }
  }
  outgoing_.resize(nodes_.size());
  incoming_.resize(nodes_.size());
  for (const RoadEdge& e : edges_) {
    if (!std::isfinite(e.length_km) || e.length_km <= 0.0) {
      throw InvalidArgument("edge " + std::to_string(e.from) + "->" +
                            std::to_string(e.to) +
                            " has non-positive length");
    }
    for (LocationId end : {e.from, e.to}) {
      if (!HasNode(end)) {
        throw InvalidArgument("edge references unknown node " +
                              std::to_string(end));
      }
    }
    const std::size_t u = index_.at(e.from);
    const std::size_t v = index_.at(e.to);
    outgoing_[u].push_back(Arc{v, e.length_km});
    incoming_[v].push_back(Arc{u, e.length_km});
  }
}

std::vector<LocationId> RoadGraph::node_ids() const {
  std::vector<LocationId> ids;
  ids.reserve(nodes_.size());
  for (const Location& n : nodes_) ids.push_back(n.id);
  return ids;
}

std::size_t RoadGraph::IndexOf(LocationId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw InvalidArgument("unknown node id " + std::to_string(id));
  }
  return it->second;
}

RoadGraph ParseGraph(const std::string& nodes_text,
                     const std::string& edges_text,
                     const std::string& nodes_source,
                     const std::string& edges_source) {
  std::vector<Location> nodes = ParseLocations(nodes_text, nodes_source);
  const CsvTable table =
      CsvTable::Parse(edges_text, {"from", "to", "length_km"}, edges_source);
  std::vector<RoadEdge> edges;
  edges.reserve(table.rows().size());
  for (const CsvRow& row : table.rows()) {
    try {
      edges.push_back(RoadEdge{ParseInt(row.fields[0]),
                               ParseInt(row.fields[1]),
                               ParseDouble(row.fields[2])});
    } catch (const Error& e) {
      throw ParseError(Where(edges_source, row.line) + e.what());
    }
  }
  // Validate edge rows individually so errors carry a line number.
  std::unordered_map<LocationId, bool> known;
  for (const Location& n : nodes) known[n.id] = true;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const RoadEdge& e = edges[i];
    const std::size_t line = table.rows()[i].line;
    for (LocationId end : {e.from, e.to}) {
      if (!known.count(end)) {
        throw ParseError(Where(edges_source, line) +
                         "edge references unknown node " +
                         std::to_string(end));
      }
    }
    if (!std::isfinite(e.length_km) || e.length_km <= 0.0) {
      throw ParseError(Where(edges_source, line) +
                       "edge length must be positive and finite");
    }
  }
  return RoadGraph(std::move(nodes), std::move(edges));
}

RoadGraph ParseGraph(const std::string& nodes_text,
                     const std::string& edges_text) {
  return ParseGraph(nodes_text, edges_text, "<nodes>", "<edges>");
}

RoadGraph LoadGraph(const std::string& nodes_file,
                    const std::string& edges_file) {
  return ParseGraph(ReadTextFile(nodes_file), ReadTextFile(edges_file),
                    nodes_file, edges_file);
}

std::string FormatEdges(const std::vector<RoadEdge>& edges) {
  std::string out = "from,to,length_km\n";
  for (const RoadEdge& e : edges) {
    out += std::to_string(e.from) + ',' + std::to_string(e.to) + ',' +
           FormatDouble(e.length_km) + '\n';
  }
  return out;
}

std::optional<double> ShortestPathTree::DistanceFrom(const RoadGraph& graph,
                                                     LocationId node) const {
  const double d = dist_[graph.IndexOf(node)];
  if (std::isinf(d)) return std::nullopt;
  return d;
}

ShortestPathTree BuildShortestPathTree(const RoadGraph& graph,
                                       LocationId root) {
  const std::size_t source = graph.IndexOf(root);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.num_nodes(), inf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    // Reversed graph: relax arcs entering u.
    for (const RoadGraph::Arc& arc : graph.incoming(u)) {
      const double nd = d + arc.length_km;
      if (nd < dist[arc.node]) {
        dist[arc.node] = nd;
        heap.emplace(nd, arc.node);
      }
    }
  }
  return ShortestPathTree(root, std::move(dist));
}

LocationId SnapToNode(const GeoPoint& point, const RoadGraph& graph) {
  if (graph.num_nodes() == 0) {
    throw InvalidArgument("cannot snap to an empty graph");
  }
  // Nodes are sorted by id, so a strict comparison keeps the smallest id on
  // ties.
  LocationId best = graph.nodes().front().id;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Location& n : graph.nodes()) {
    const double d = HaversineKm(point, n.point);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

}  // namespace cmdp
