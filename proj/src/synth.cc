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

#include "cmdp/synth.h"

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "cmdp/rng.h"

namespace cmdp {
namespace {

// 2023-11-15T00:00:00Z.
constexpr double kBaseTimestamp = 1700006400.0;
constexpr double kKmPerDegree = 111.19508;

// Fixed per-node successor weights of the first-order process.
std::vector<std::vector<double>> FirstOrderWeights(const RoadGraph& graph,
                                                   std::uint64_t seed) {
  std::vector<std::vector<double>> w(graph.num_nodes());
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    SplitMix64 rng(DeriveSeed(seed, i));
    double total = 0.0;
    for (std::size_t k = 0; k < graph.outgoing(i).size(); ++k) {
      // Squared uniforms make some successors clearly preferred.
      const double u = rng.Uniform();
      w[i].push_back(0.05 + u * u);
      total += w[i].back();
    }
    for (double& v : w[i]) v /= total;
  }
  return w;
}

std::size_t Draw(const std::vector<double>& weights, SplitMix64& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return weights.size() - 1;
}

// Successor index continuing the heading prev -> cur, if one exists.
std::optional<std::size_t> Straight(const RoadGraph& graph, std::size_t prev,
                                    std::size_t cur) {
  const GeoPoint& a = graph.nodes()[prev].point;
  const GeoPoint& b = graph.nodes()[cur].point;
  const double c = std::cos(b.lat() * std::numbers::pi / 180.0);
  const double hx = (b.lon() - a.lon()) * c, hy = b.lat() - a.lat();
  const double hn = std::hypot(hx, hy);
  if (hn == 0.0) return std::nullopt;
  const auto& out = graph.outgoing(cur);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const GeoPoint& n = graph.nodes()[out[k].node].point;
    const double sx = (n.lon() - b.lon()) * c, sy = n.lat() - b.lat();
    const double sn = std::hypot(sx, sy);
    if (sn > 0.0 && (hx * sx + hy * sy) / (hn * sn) > 0.95) return k;
  }
  return std::nullopt;
}

std::vector<std::size_t> Walk(const RoadGraph& graph,
                              const std::vector<std::vector<double>>& weights,
                              int order, int length, double persistence,
                              SplitMix64& rng) {
  std::vector<std::size_t> path;
  path.push_back(static_cast<std::size_t>(rng.Below(graph.num_nodes())));
  while (static_cast<int>(path.size()) < length) {
    const std::size_t cur = path.back();
    const auto& out = graph.outgoing(cur);
    if (out.empty()) {
      throw InvalidArgument("synthetic walk reached a node without exits");
    }
    std::size_t k;
    if (order == 1) {
      k = Draw(weights[cur], rng);
    } else if (path.size() < 2) {
      k = static_cast<std::size_t>(rng.Below(out.size()));
    } else {
      const std::optional<std::size_t> s =
          Straight(graph, path[path.size() - 2], cur);
      if (s && rng.Uniform() < persistence) {
        k = *s;
      } else {
        k = static_cast<std::size_t>(rng.Below(out.size()));
      }
    }
    path.push_back(out[k].node);
  }
  return path;
}

void CheckOrder(int order) {
  if (order != 1 && order != 2) {
    throw InvalidArgument("synthetic process order must be 1 or 2");
  }
}

}  // namespace

std::vector<std::vector<LocationId>> SynthesizeSequences(
    const RoadGraph& graph, int order, int count, int length,
    double persistence, std::uint64_t seed) {
  CheckOrder(order);
  if (count < 1 || length < 1) {
    throw InvalidArgument("count and length must be >= 1");
  }
  if (graph.num_nodes() == 0) throw InvalidArgument("graph is empty");
  const auto weights = FirstOrderWeights(graph, DeriveSeed(seed, 0));
  std::vector<std::vector<LocationId>> out;
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng(DeriveSeed(seed, 1 + static_cast<std::uint64_t>(i)));
    std::vector<LocationId> seq;
    for (std::size_t idx :
         Walk(graph, weights, order, length, persistence, rng)) {
      seq.push_back(graph.nodes()[idx].id);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

SynthData Synthesize(const SynthOptions& o) {
  if (o.rows < 1 || o.cols < 1 || o.rows * o.cols < 2) {
    throw InvalidArgument("grid needs at least two nodes");
  }
  if (!(o.spacing_km > 0.0)) throw InvalidArgument("spacing must be > 0");
  if (o.count < 1) throw InvalidArgument("trajectory count must be >= 1");
  if (o.length < 2) throw InvalidArgument("trajectory length must be >= 2");
  if (o.vehicles < 1) throw InvalidArgument("vehicle count must be >= 1");
  if (!(o.persistence >= 0.0 && o.persistence <= 1.0)) {
    throw InvalidArgument("persistence must lie in [0, 1]");
  }
  if (o.speeds_mph.empty() || o.start_hours.empty()) {
    throw InvalidArgument("speeds and start hours must be non-empty");
  }
  for (double s : o.speeds_mph) {
    if (!(s > 0.0)) throw InvalidArgument("speeds must be > 0");
  }
  for (int h : o.start_hours) {
    if (h < 0 || h > 23) throw InvalidArgument("start hours must be 0..23");
  }
  if (!o.heterogeneous) CheckOrder(o.order);

  SynthData data;
  const double dlat = o.spacing_km / kKmPerDegree;
  const double dlon =
      dlat / std::cos(o.origin_lat * std::numbers::pi / 180.0);
  for (int r = 0; r < o.rows; ++r) {
    for (int c = 0; c < o.cols; ++c) {
      data.nodes.push_back({static_cast<LocationId>(r * o.cols + c + 1),
                            GeoPoint(o.origin_lat + r * dlat,
                                     o.origin_lon + c * dlon)});
    }
  }
  auto link = [&data](std::size_t a, std::size_t b) {
    const double km = HaversineKm(data.nodes[a].point, data.nodes[b].point);
    data.edges.push_back({data.nodes[a].id, data.nodes[b].id, km});
    data.edges.push_back({data.nodes[b].id, data.nodes[a].id, km});
  };
  for (int r = 0; r < o.rows; ++r) {
    for (int c = 0; c < o.cols; ++c) {
      const auto i = static_cast<std::size_t>(r * o.cols + c);
      if (c + 1 < o.cols) link(i, i + 1);
      if (r + 1 < o.rows) link(i, i + static_cast<std::size_t>(o.cols));
    }
  }
  const RoadGraph graph = data.Graph();
  const auto weights = FirstOrderWeights(graph, DeriveSeed(o.seed, 0));
  for (int i = 0; i < o.count; ++i) {
    SplitMix64 rng(DeriveSeed(o.seed, 1 + static_cast<std::uint64_t>(i)));
    const double mph = o.speeds_mph[rng.Below(o.speeds_mph.size())];
    const int hour = o.start_hours[rng.Below(o.start_hours.size())];
    const int order = o.heterogeneous ? (mph >= o.fast_mph ? 2 : 1) : o.order;
    const auto path = Walk(graph, weights, order, o.length, o.persistence, rng);
    Trajectory t;
    t.vehicle_id = "v" + std::to_string(i % o.vehicles);
    t.trajectory_id = "t" + std::to_string(i);
    // Whole seconds keep the text form short and exact.
    double ts = kBaseTimestamp + hour * 3600.0 +
                std::floor(rng.Uniform() * 600.0);
    const double kmh = mph * 1.609344;
    for (std::size_t s = 0; s < path.size(); ++s) {
      if (s > 0) {
        ts += HaversineKm(graph.nodes()[path[s - 1]].point,
                          graph.nodes()[path[s]].point) /
              kmh * 3600.0;
      }
      t.records.push_back({ts, graph.nodes()[path[s]].point});
    }
    data.log.trajectories.push_back(std::move(t));
  }
  return data;
}

}  // namespace cmdp
