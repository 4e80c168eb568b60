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

// Descriptive statistics: rank and linear correlations between features and
// CI-test p-values, and neighborhood density of a location domain.

#ifndef CMDP_STATS_H_
#define CMDP_STATS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmdp/csv.h"
#include "cmdp/geo.h"

namespace cmdp {

// Each coefficient is absent when undefined (a constant column).
struct Correlations {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;  // tau-b
};

// The single coefficients accept two or more rows of equal length.
std::optional<double> Pearson(const std::vector<double>& x,
                              const std::vector<double>& y);
// Pearson correlation of average ranks.
std::optional<double> Spearman(const std::vector<double>& x,
                               const std::vector<double>& y);
std::optional<double> KendallTauB(const std::vector<double>& x,
                                  const std::vector<double>& y);
// 1-based ranks; ties share their average rank.
std::vector<double> AverageRanks(const std::vector<double>& values);

// Throws InvalidArgument for fewer than 3 rows or unequal lengths.
Correlations Correlate(const std::vector<double>& x,
                       const std::vector<double>& y);

struct FeatureCorrelation {
  std::string feature;
  Correlations values;
};

// Correlates every feature column with `target` (non-finite rows of a pair
// are dropped). Throws ParseError for missing columns.
std::vector<FeatureCorrelation> CorrelateColumns(
    const CsvTable& table, const std::vector<std::string>& features,
    const std::string& target);

// `feature,pearson,spearman,kendall` with "undefined" for absent values.
std::string FormatCorrelations(const std::vector<FeatureCorrelation>& rows);

struct DensityStats {
  std::vector<LocationId> ids;
  std::vector<std::vector<double>> knn_m;  // k nearest distances per point
  std::vector<std::size_t> neighbors;      // other points within the radius
  std::vector<double> mean_knn_m;
};

// Brute-force k nearest neighbors and neighbor counts within `radius_m`
// (inclusive). Throws InvalidArgument unless k >= 1 and there are at least
// k + 1 points.
DensityStats NeighborhoodDensity(const std::vector<Location>& points,
                                 std::size_t k, double radius_m);

std::string FormatKnnDistances(const DensityStats& stats);
// `neighbors,fraction_at_least`: share of points with at least c neighbors.
std::string FormatNeighborCcdf(const DensityStats& stats);
std::string FormatMeanKnn(const DensityStats& stats);
// `bin_lo_m,bin_hi_m,count` over `bins` equal-width bins.
std::string FormatMeanKnnHistogram(const DensityStats& stats, int bins = 20);

}  // namespace cmdp

#endif  // CMDP_STATS_H_
