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

// Locations, the great-circle base metric, the context-augmented metric over
// secret keys, and neighbor enumeration under a distance threshold.

#ifndef CMDP_GEO_H_
#define CMDP_GEO_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmdp/common.h"

namespace cmdp {

// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

inline constexpr double kInfiniteEta = std::numeric_limits<double>::infinity();

// Latitude/longitude in decimal degrees. The constructor validates ranges and
// rejects non-finite values.
class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  bool operator==(const GeoPoint&) const = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

double HaversineKm(const GeoPoint& a, const GeoPoint& b);

struct Location {
  LocationId id = 0;
  GeoPoint point;
};

// Reads an `id,lat,lon` file. Ids must be unique.
std::vector<Location> LoadLocations(const std::string& path);
std::vector<Location> ParseLocations(const std::string& text,
                                     const std::string& source = "<memory>");
std::string FormatLocations(const std::vector<Location>& locations);

// The secret set X and output set Y with coordinates. Distances between ids
// are great-circle kilometers.
class LocationDomain {
 public:
  LocationDomain() = default;
  LocationDomain(std::vector<Location> secrets, std::vector<Location> outputs);
  // Y = X.
  explicit LocationDomain(std::vector<Location> secrets);

  const std::vector<Location>& secrets() const { return secrets_; }
  const std::vector<Location>& outputs() const { return outputs_; }
  std::vector<LocationId> secret_ids() const;
  std::vector<LocationId> output_ids() const;

  bool Contains(LocationId id) const { return points_.count(id) > 0; }
  const GeoPoint& PointOf(LocationId id) const;
  double Distance(LocationId a, LocationId b) const;

  // Largest violation of d(a,c) <= d(a,b) + d(b,c) over `samples` random
  // triples of known ids; 0 when the triangle inequality holds.
  double MaxTriangleViolation(std::size_t samples, std::uint64_t seed) const;

 private:
  std::vector<Location> secrets_;
  std::vector<Location> outputs_;
  std::unordered_map<LocationId, GeoPoint> points_;
};

// Decay weights w_{t-1}, ..., w_{t-Gamma} of the context-augmented metric.
class ContextWeights {
 public:
  ContextWeights() = default;
  explicit ContextWeights(std::vector<double> weights);

  // w_{t-tau} = alpha^tau for tau = 1..gamma.
  static ContextWeights Decay(int gamma, double alpha = 0.5);

  int gamma() const { return static_cast<int>(weights_.size()); }
  // Weight of lag `lag` (1-based).
  double at_lag(int lag) const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// d(x, x') + sum_tau w_{t-tau} d(v_{t-tau}, v'_{t-tau}). Both keys must carry
// context of the same length, no longer than the weight vector.
double ContextDistance(const SecretKey& a, const SecretKey& b,
                       const ContextWeights& weights,
                       const LocationDomain& domain);

// A distance over secret keys, tagged with an id recorded in mechanism
// metadata. Distances are kilometers.
struct KeyMetric {
  std::string id;
  std::function<double(const SecretKey&, const SecretKey&)> distance;

  double operator()(const SecretKey& a, const SecretKey& b) const {
    return distance(a, b);
  }
};

// Base distance between the current locations; context is ignored.
KeyMetric BaseKeyMetric(const LocationDomain& domain);

// The augmented metric over full-context keys (equal context lengths).
KeyMetric ContextKeyMetric(const LocationDomain& domain,
                           ContextWeights weights);

// Metric over keys whose context is the restriction of the full context to
// `lags` (key.context[i] holds lag lags[i]).
KeyMetric LagKeyMetric(const LocationDomain& domain, ContextWeights weights,
                       LagSet lags);

// Metric over blanket keys whose contexts are lag prefixes of possibly
// different lengths: lags present in both keys contribute, the others do
// not. This never exceeds the augmented distance of any pair of full-context
// keys projecting onto the two blanket keys.
KeyMetric PrefixKeyMetric(const LocationDomain& domain,
                          ContextWeights weights);

struct NeighborPair {
  std::size_t first = 0;   // index into the key list, first < second
  std::size_t second = 0;
  double distance = 0.0;

  bool operator==(const NeighborPair&) const = default;
};

// Every unordered pair of distinct keys with distance <= eta (inclusive).
// eta may be kInfiniteEta. Throws InvalidArgument for negative or NaN eta.
std::vector<NeighborPair> NeighborPairs(const std::vector<SecretKey>& keys,
                                        const KeyMetric& metric, double eta);

}  // namespace cmdp

#endif  // CMDP_GEO_H_
