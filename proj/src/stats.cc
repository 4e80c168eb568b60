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

#include "cmdp/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmdp {
namespace {

void CheckPair(const std::vector<double>& x, const std::vector<double>& y,
               std::size_t min_rows = 2) {
  if (x.size() != y.size()) throw InvalidArgument("columns differ in length");
  if (x.size() < min_rows) {
    throw InvalidArgument("correlation needs at least " +
                          std::to_string(min_rows) + " rows");
  }
}

std::string Cell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "undefined";
}

}  // namespace

std::optional<double> Pearson(const std::vector<double>& x,
                              const std::vector<double>& y) {
  CheckPair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

std::optional<double> Spearman(const std::vector<double>& x,
                               const std::vector<double>& y) {
  CheckPair(x, y);
  return Pearson(AverageRanks(x), AverageRanks(y));
}

std::optional<double> KendallTauB(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  CheckPair(x, y);
  double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ties_x += 1.0;
        ties_y += 1.0;
      } else if (dx == 0.0) {
        ties_x += 1.0;
      } else if (dy == 0.0) {
        ties_y += 1.0;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double n = static_cast<double>(x.size());
  const double n0 = n * (n - 1.0) / 2.0;
  const double den = std::sqrt((n0 - ties_x) * (n0 - ties_y));
  if (den == 0.0) return std::nullopt;
  return (concordant - discordant) / den;
}

Correlations Correlate(const std::vector<double>& x,
                       const std::vector<double>& y) {
  CheckPair(x, y, 3);
  return {Pearson(x, y), Spearman(x, y), KendallTauB(x, y)};
}

std::vector<FeatureCorrelation> CorrelateColumns(
    const CsvTable& table, const std::vector<std::string>& features,
    const std::string& target) {
  const std::size_t t = table.ColumnIndex(target);
  std::vector<FeatureCorrelation> out;
  for (const std::string& f : features) {
    const std::size_t c = table.ColumnIndex(f);
    std::vector<double> x, y;
    for (const CsvRow& row : table.rows()) {
      const double a = ParseDouble(row.fields[c]);
      const double b = ParseDouble(row.fields[t]);
      if (std::isfinite(a) && std::isfinite(b)) {
        x.push_back(a);
        y.push_back(b);
      }
    }
    out.push_back({f, Correlate(x, y)});
  }
  return out;
}

std::string FormatCorrelations(const std::vector<FeatureCorrelation>& rows) {
  std::string out = "feature,pearson,spearman,kendall\n";
  for (const FeatureCorrelation& r : rows) {
    out += r.feature + ',' + Cell(r.values.pearson) + ',' +
           Cell(r.values.spearman) + ',' + Cell(r.values.kendall) + '\n';
  }
  return out;
}

DensityStats NeighborhoodDensity(const std::vector<Location>& points,
                                 std::size_t k, double radius_m) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (points.size() < k + 1) {
    throw InvalidArgument("need at least k + 1 points for k nearest neighbors");
  }
  if (!(radius_m >= 0.0)) throw InvalidArgument("radius must be >= 0");
  DensityStats s;
  const std::size_t n = points.size();
  s.ids.reserve(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.ids.push_back(points[i].id);
    std::vector<double> others;
    others.reserve(n - 1);
    std::size_t within = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double m = 1000.0 * HaversineKm(points[i].point, points[j].point);
      others.push_back(m);
      if (m <= radius_m) ++within;
    }
    std::partial_sort(others.begin(),
                      others.begin() + static_cast<std::ptrdiff_t>(k),
                      others.end());
    others.resize(k);
    s.mean_knn_m.push_back(std::accumulate(others.begin(), others.end(), 0.0) /
                           static_cast<double>(k));
    s.knn_m.push_back(std::move(others));
    s.neighbors.push_back(within);
  }
  return s;
}

std::string FormatKnnDistances(const DensityStats& s) {
  std::string out = "point,rank,distance_m\n";
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    for (std::size_t r = 0; r < s.knn_m[i].size(); ++r) {
      out += std::to_string(s.ids[i]) + ',' + std::to_string(r + 1) + ',' +
             FormatDouble(s.knn_m[i][r]) + '\n';
    }
  }
  return out;
}

std::string FormatNeighborCcdf(const DensityStats& s) {
  std::string out = "neighbors,fraction_at_least\n";
  const std::size_t most =
      s.neighbors.empty()
          ? 0
          : *std::max_element(s.neighbors.begin(), s.neighbors.end());
  const double n = static_cast<double>(s.neighbors.size());
  for (std::size_t c = 0; c <= most; ++c) {
    const auto at_least = std::count_if(s.neighbors.begin(), s.neighbors.end(),
                                        [c](std::size_t v) { return v >= c; });
    out += std::to_string(c) + ',' +
           FormatDouble(static_cast<double>(at_least) / n) + '\n';
  }
  return out;
}

std::string FormatMeanKnn(const DensityStats& s) {
  std::string out = "point,mean_knn_m\n";
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    out += std::to_string(s.ids[i]) + ',' + FormatDouble(s.mean_knn_m[i]) +
           '\n';
  }
  return out;
}

std::string FormatMeanKnnHistogram(const DensityStats& s, int bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  std::string out = "bin_lo_m,bin_hi_m,count\n";
  const double hi =
      s.mean_knn_m.empty()
          ? 0.0
          : *std::max_element(s.mean_knn_m.begin(), s.mean_knn_m.end());
  const double width = hi > 0.0 ? hi / bins : 1.0;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : s.mean_knn_m) {
    const auto b = std::min(bins - 1, static_cast<int>(v / width));
    ++counts[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < bins; ++b) {
    out += FormatDouble(b * width) + ',' + FormatDouble((b + 1) * width) + ',' +
           std::to_string(counts[static_cast<std::size_t>(b)]) + '\n';
  }
  return out;
}

}  // namespace cmdp
