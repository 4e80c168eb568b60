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

// Weighted directed road graph and shortest-path trees towards a root.

#ifndef CMDP_ROADNET_H_
#define CMDP_ROADNET_H_

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"

namespace cmdp {

struct RoadEdge {
  LocationId from = 0;
  LocationId to = 0;
  double length_km = 0.0;
};

// Immutable after construction. Nodes are kept sorted by id; node indices
// used by the dense accessors refer to that order.
class RoadGraph {
 public:
  RoadGraph() = default;
  // Throws InvalidArgument on duplicate node ids, dangling edge endpoints and
  // non-positive or non-finite lengths.
  RoadGraph(std::vector<Location> nodes, std::vector<RoadEdge> edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<Location>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  std::vector<LocationId> node_ids() const;

  bool HasNode(LocationId id) const { return index_.count(id) > 0; }
  std::size_t IndexOf(LocationId id) const;

  struct Arc {
    std::size_t node = 0;  // index of the other endpoint
    double length_km = 0.0;
  };
  // Arcs entering node `index`; Arc::node is the tail.
  const std::vector<Arc>& incoming(std::size_t index) const {
    return incoming_[index];
  }
  const std::vector<Arc>& outgoing(std::size_t index) const {
    return outgoing_[index];
  }

 private:
  std::vector<Location> nodes_;
  std::vector<RoadEdge> edges_;
  std::unordered_map<LocationId, std::size_t> index_;
  std::vector<std::vector<Arc>> outgoing_;
  std::vector<std::vector<Arc>> incoming_;
};

// Reads `id,lat,lon` nodes and `from,to,length_km` edges. Errors name the
// file and line.
RoadGraph LoadGraph(const std::string& nodes_file,
                    const std::string& edges_file);
RoadGraph ParseGraph(const std::string& nodes_text,
                     const std::string& edges_text);
std::string FormatEdges(const std::vector<RoadEdge>& edges);

// Travel distances from every node to a root.
class ShortestPathTree {
 public:
  ShortestPathTree(LocationId root, std::vector<double> dist_by_index)
      : root_(root), dist_(std::move(dist_by_index)) {}

  LocationId root() const { return root_; }
  // Distance from node index `i` to the root; +inf when unreachable.
  double DistanceByIndex(std::size_t i) const { return dist_[i]; }
  // Absent when the node cannot reach the root.
  std::optional<double> DistanceFrom(const RoadGraph& graph,
                                     LocationId node) const;
  const std::vector<double>& distances() const { return dist_; }

 private:
  LocationId root_;
  std::vector<double> dist_;
};

// Dijkstra with a binary heap on the edge-reversed graph, so that the result
// holds path(v, root) for every v.
ShortestPathTree BuildShortestPathTree(const RoadGraph& graph, LocationId root);

// Nearest node by great-circle distance; ties go to the smallest id.
LocationId SnapToNode(const GeoPoint& point, const RoadGraph& graph);

}  // namespace cmdp

#endif  // CMDP_ROADNET_H_
