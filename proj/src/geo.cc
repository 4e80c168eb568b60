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

#include "cmdp/geo.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <utility>

#include "cmdp/csv.h"
#include "cmdp/rng.h"

namespace cmdp {
namespace {

double Radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::shared_ptr<const LocationDomain> Share(const LocationDomain& domain) {
  return std::make_shared<const LocationDomain>(domain);
}

}  // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw InvalidArgument("coordinates must be finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw InvalidArgument("latitude out of range [-90, 90]: " +
                          FormatDouble(lat));
  }
  if (lon < -180.0 || lon > 180.0) {
    throw InvalidArgument("longitude out of range [-180, 180]: " +
                          FormatDouble(lon));
  }
}

double HaversineKm(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = Radians(a.lat());
  const double phi2 = Radians(b.lat());
  const double dphi = phi2 - phi1;
  const double dlambda = Radians(b.lon() - a.lon());
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::vector<Location> ParseLocations(const std::string& text,
                                     const std::string& source) {
  const CsvTable table = CsvTable::Parse(text, {"id", "lat", "lon"}, source);
  std::vector<Location> out;
  std::set<LocationId> seen;
  for (const CsvRow& row : table.rows()) {
    try {
      Location loc{ParseInt(row.fields[0]),
                   GeoPoint(ParseDouble(row.fields[1]),
                            ParseDouble(row.fields[2]))};
      if (!seen.insert(loc.id).second) {
        throw ParseError("duplicate id " + std::to_string(loc.id));
      }
      out.push_back(loc);
    } catch (const Error& e) {
      throw ParseError(Where(source, row.line) + e.what());
    }
  }
  return out;
}

std::vector<Location> LoadLocations(const std::string& path) {
  return ParseLocations(ReadTextFile(path), path);
}

std::string FormatLocations(const std::vector<Location>& locations) {
  std::string out = "id,lat,lon\n";
  for (const Location& loc : locations) {
    out += std::to_string(loc.id) + ',' + FormatDouble(loc.point.lat()) +
           ',' + FormatDouble(loc.point.lon()) + '\n';
  }
  return out;
}

LocationDomain::LocationDomain(std::vector<Location> secrets,
                               std::vector<Location> outputs)
    : secrets_(std::move(secrets)), outputs_(std::move(outputs)) {
  auto add_all = [this](const std::vector<Location>& list, const char* what) {
    std::set<LocationId> seen;
    for (const Location& loc : list) {
      if (!seen.insert(loc.id).second) {
        throw InvalidArgument(std::string("duplicate ") + what + " id " +
                              std::to_string(loc.id));
      }
      auto [it, inserted] = points_.emplace(loc.id, loc.point);
      if (!inserted && !(it->second == loc.point)) {
        throw InvalidArgument("id " + std::to_string(loc.id) +
                              " has conflicting coordinates");
      }
    }
  };
  add_all(secrets_, "secret");
  add_all(outputs_, "output");
}

LocationDomain::LocationDomain(std::vector<Location> secrets)
    : LocationDomain(secrets, secrets) {}

std::vector<LocationId> LocationDomain::secret_ids() const {
  std::vector<LocationId> ids;
  ids.reserve(secrets_.size());
  for (const Location& l : secrets_) ids.push_back(l.id);
  return ids;
}

std::vector<LocationId> LocationDomain::output_ids() const {
  std::vector<LocationId> ids;
  ids.reserve(outputs_.size());
  for (const Location& l : outputs_) ids.push_back(l.id);
  return ids;
}

const GeoPoint& LocationDomain::PointOf(LocationId id) const {
  auto it = points_.find(id);
  if (it == points_.end()) {
    throw InvalidArgument("unknown location id " + std::to_string(id));
  }
  return it->second;
}

double LocationDomain::Distance(LocationId a, LocationId b) const {
  if (a == b) {
    PointOf(a);
    return 0.0;
  }
  return HaversineKm(PointOf(a), PointOf(b));
}

double LocationDomain::MaxTriangleViolation(std::size_t samples,
                                            std::uint64_t seed) const {
  std::vector<LocationId> ids;
  for (const auto& [id, p] : points_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) return 0.0;
  SplitMix64 rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const LocationId a = ids[rng.Below(ids.size())];
    const LocationId b = ids[rng.Below(ids.size())];
    const LocationId c = ids[rng.Below(ids.size())];
    worst = std::max(worst, Distance(a, c) - Distance(a, b) - Distance(b, c));
  }
  return worst;
}

ContextWeights::ContextWeights(std::vector<double> weights)
    : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("context weights must be finite and >= 0");
    }
  }
}

ContextWeights ContextWeights::Decay(int gamma, double alpha) {
  if (gamma < 0) throw InvalidArgument("gamma must be >= 0");
  std::vector<double> w;
  double v = 1.0;
  for (int tau = 1; tau <= gamma; ++tau) {
    v *= alpha;
    w.push_back(v);
  }
  return ContextWeights(std::move(w));
}

double ContextWeights::at_lag(int lag) const {
  if (lag < 1 || lag > gamma()) {
    throw InvalidArgument("no weight for lag " + std::to_string(lag));
  }
  return weights_[static_cast<std::size_t>(lag - 1)];
}

double ContextDistance(const SecretKey& a, const SecretKey& b,
                       const ContextWeights& weights,
                       const LocationDomain& domain) {
  if (a.context.size() != b.context.size()) {
    throw InvalidArgument("context lengths differ: " + FormatKey(a) + " vs " +
                          FormatKey(b));
  }
  if (static_cast<int>(a.context.size()) > weights.gamma()) {
    throw InvalidArgument("context longer than the weight profile");
  }
  double d = domain.Distance(a.current, b.current);
  for (std::size_t i = 0; i < a.context.size(); ++i) {
    d += weights.weights()[i] * domain.Distance(a.context[i], b.context[i]);
  }
  return d;
}

KeyMetric BaseKeyMetric(const LocationDomain& domain) {
  return KeyMetric{"base", [dom = Share(domain)](const SecretKey& a, const SecretKey& b) {
                     return dom->Distance(a.current, b.current);
                   }};
}

KeyMetric ContextKeyMetric(const LocationDomain& domain,
                           ContextWeights weights) {
  return KeyMetric{"context",
                   [dom = Share(domain), w = std::move(weights)](
                       const SecretKey& a, const SecretKey& b) {
                     return ContextDistance(a, b, w, *dom);
                   }};
}

KeyMetric LagKeyMetric(const LocationDomain& domain, ContextWeights weights,
                       LagSet lags) {
  for (int lag : lags) weights.at_lag(lag);
  std::string id = "lags";
  for (int lag : lags) id += ":" + std::to_string(lag);
  return KeyMetric{
      id, [dom = Share(domain), w = std::move(weights), lags = std::move(lags)](
              const SecretKey& a, const SecretKey& b) {
        if (a.context.size() != lags.size() ||
            b.context.size() != lags.size()) {
          throw InvalidArgument("key context does not match the lag set");
        }
        double d = dom->Distance(a.current, b.current);
        for (std::size_t i = 0; i < lags.size(); ++i) {
          d += w.at_lag(lags[i]) * dom->Distance(a.context[i], b.context[i]);
        }
        return d;
      }};
}

KeyMetric PrefixKeyMetric(const LocationDomain& domain,
                          ContextWeights weights) {
  return KeyMetric{
      "prefix", [dom = Share(domain), w = std::move(weights)](
                    const SecretKey& a, const SecretKey& b) {
        const std::size_t common = std::min(a.context.size(), b.context.size());
        if (std::max(a.context.size(), b.context.size()) >
            static_cast<std::size_t>(w.gamma())) {
          throw InvalidArgument("context longer than the weight profile");
        }
        double d = dom->Distance(a.current, b.current);
        for (std::size_t i = 0; i < common; ++i) {
          d += w.weights()[i] * dom->Distance(a.context[i], b.context[i]);
        }
        return d;
      }};
}

std::vector<NeighborPair> NeighborPairs(const std::vector<SecretKey>& keys,
                                        const KeyMetric& metric, double eta) {
  if (std::isnan(eta) || eta < 0.0) {
    throw InvalidArgument("eta must be >= 0");
  }
  std::vector<NeighborPair> pairs;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      const double d = metric(keys[i], keys[j]);
      if (d <= eta) pairs.push_back(NeighborPair{i, j, d});
    }
  }
  return pairs;
}

}  // namespace cmdp
