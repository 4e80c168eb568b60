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

// Markov-blanket discovery over location histories: a permutation
// conditional-independence test, the lag-growing identification loop,
// feature-binned partitioning of trajectory data, and a decision-table
// blanket predictor.

#ifndef CMDP_BLANKET_H_
#define CMDP_BLANKET_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"

namespace cmdp {

inline constexpr std::size_t kMinCiRows = 200;
inline constexpr double kCiAlpha = 0.05;
inline constexpr int kMinPermutations = 500;

// Rows (x_t, x_{t-1}, ..., x_{t-gamma}) of node ids.
struct CiSample {
  int gamma = 0;
  std::vector<std::vector<LocationId>> rows;

  // One row per position t >= gamma of every sequence.
  static CiSample FromSequences(
      const std::vector<std::vector<LocationId>>& sequences, int gamma);
  // Throws InvalidArgument unless every row has gamma + 1 entries.
  void Validate() const;
};

struct CiTestOptions {
  int permutations = kMinPermutations;
  std::uint64_t seed = 0;
};

struct CiTestResult {
  double g_statistic = 0.0;
  double p_value = 1.0;
};

// Tests X_t independent of X_{t-target} given the conditioning lags with a
// G statistic summed over conditioning strata (empty strata add nothing) and
// a permutation null that shuffles the target column within strata:
// p = (1 + #{G_perm >= G}) / (1 + permutations).
// Throws InvalidArgument below kMinCiRows rows, for fewer than
// kMinPermutations permutations, or for lags outside 1..gamma.
CiTestResult CiTest(const CiSample& sample, int target_lag,
                    const LagSet& conditioning,
                    const CiTestOptions& options = {});

enum class HypothesisLabel { kReject, kFailToReject };

std::string LabelName(HypothesisLabel label);
HypothesisLabel ParseLabel(const std::string& text);

// Hypothesis m: X_t independent of X_{t-m-1} given lags {1..m}.
struct HypothesisOutcome {
  int m = 0;
  double p_value = 1.0;  // NaN when labeled without testing
  bool tested = false;
  HypothesisLabel label = HypothesisLabel::kFailToReject;
};

struct BlanketResult {
  LagSet lags;             // always {1..k}
  bool exhausted = false;  // every lag up to gamma was added
  std::vector<HypothesisOutcome> hypotheses;  // m = 1..gamma-1
};

// Start from {1}; while hypothesis m (m = 1, 2, ...) is rejected at
// kCiAlpha, add lag m+1. Hypotheses after the first non-rejection condition
// on supersets of the returned blanket and are labeled fail-to-reject
// without testing. Throws InvalidArgument for gamma < 1.
BlanketResult IdentifyBlanket(const CiSample& sample, int gamma,
                              std::uint64_t seed, int permutations =
                                                      kMinPermutations);

// Region grid over a latitude/longitude box. Rows run along latitude from
// the south edge, columns along longitude from the west edge; the cell index
// is row * cols + col.
struct RegionGrid {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;
  int rows = 1;
  int cols = 1;

  void Validate() const;
  int num_cells() const { return rows * cols; }
  // Absent outside the box; the north and east edges belong to the grid.
  std::optional<int> Cell(const GeoPoint& p) const;
  GeoPoint CellCenter(int cell) const;

  static RegionGrid Rome();   // 4 x 5 over 41.64..42.12 N, 12.23..12.83 E
  // 3 x 3 over 41.03..41.27 N, 8.49..8.73 E. The box carries an
  // east sign although the city lies west of Greenwich; pass an explicit
  // grid for real Porto coordinates.
  static RegionGrid Porto();
  // Smallest box around `points`, widened by 1e-9 degrees.
  static RegionGrid Covering(const std::vector<GeoPoint>& points, int rows,
                             int cols);
};

inline constexpr int kNumTimeBins = 24;
inline constexpr int kNumSpeedBins = 24;
inline constexpr double kSpeedBinMph = 5.0;
inline constexpr double kKmPerMile = 1.609344;

// Hour of day (UTC) of a Unix timestamp.
int TimeBin(double timestamp);
// floor(mph / 5), clamped to 0..23.
int SpeedBin(double mph);

struct FeatureBin {
  int time_bin = 0;
  int speed_bin = 0;
  int region_bin = 0;

  auto operator<=>(const FeatureBin&) const = default;
  bool operator==(const FeatureBin&) const = default;
};

// Bin of the sub-trajectory ending at a position: hour of its last record,
// average speed over the window, grid cell of its last record.
std::optional<FeatureBin> BinWindow(const std::vector<TrajectoryRecord>& window,
                                    const RegionGrid& grid);

struct BinSample {
  CiSample sample;
  bool usable = false;  // at least kMinCiRows rows
};

struct Partition {
  std::map<FeatureBin, BinSample> bins;
  std::size_t dropped_outside = 0;  // windows ending outside the grid
};

// Every window of gamma + 1 consecutive records becomes a CI row in the bin
// of that window. Throws InvalidArgument for an empty log or gamma < 1.
Partition PartitionDataset(const TrajectoryLog& log, const RoadGraph& graph,
                           int gamma, const RegionGrid& grid);

struct LabeledHypothesis {
  FeatureBin bin;
  int m = 0;
  HypothesisLabel label = HypothesisLabel::kFailToReject;

  bool operator==(const LabeledHypothesis&) const = default;
};

struct BinAnalysis {
  FeatureBin bin;
  BlanketResult result;
};

// Runs IdentifyBlanket on every usable bin (seeded per bin) and returns the
// per-bin results in bin order.
std::vector<BinAnalysis> AnalyzePartition(const Partition& partition,
                                          int gamma, std::uint64_t seed,
                                          int permutations = kMinPermutations);
std::vector<LabeledHypothesis> LabelsFrom(
    const std::vector<BinAnalysis>& analyses);

// Majority-vote table over (bin, m); ties and unseen entries answer
// fail-to-reject.
class BlanketPredictor {
 public:
  BlanketPredictor() = default;

  HypothesisLabel Query(const FeatureBin& bin, int m) const;
  std::size_t size() const { return table_.size(); }
  const std::map<std::pair<FeatureBin, int>, HypothesisLabel>& table() const {
    return table_;
  }
  HypothesisLabel default_label() const { return default_; }

 private:
  friend BlanketPredictor TrainPredictor(
      const std::vector<LabeledHypothesis>& labels);
  friend BlanketPredictor ParsePredictor(const std::string& text,
                                         const std::string& source);

  std::map<std::pair<FeatureBin, int>, HypothesisLabel> table_;
  HypothesisLabel default_ = HypothesisLabel::kFailToReject;
};

// Throws InvalidArgument for an empty label list.
BlanketPredictor TrainPredictor(const std::vector<LabeledHypothesis>& labels);

// Start from {1}; query m = 1, 2, ...; add lag m+1 on reject, stop otherwise
// or at gamma.
LagSet PredictBlanket(const BlanketPredictor& predictor, const FeatureBin& bin,
                      int gamma);
// Same from raw features; a point outside the grid uses the default rule.
LagSet PredictBlanket(const BlanketPredictor& predictor,
                      const RegionGrid& grid, double timestamp,
                      double speed_mph, const GeoPoint& point, int gamma);

// Positive class: fail-to-reject. Undefined ratios are NaN.
struct ClassifierMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
ClassifierMetrics EvaluatePredictor(const BlanketPredictor& predictor,
                                    const std::vector<LabeledHypothesis>& data);

// `time_bin,speed_bin,region_bin,m,label`; the predictor form adds a
// `*,*,*,*,<default>` row.
std::string FormatLabels(const std::vector<LabeledHypothesis>& labels);
std::vector<LabeledHypothesis> ParseLabels(const std::string& text,
                                           const std::string& source =
                                               "<memory>");
std::string FormatPredictor(const BlanketPredictor& predictor);
BlanketPredictor ParsePredictor(const std::string& text,
                                const std::string& source = "<memory>");

}  // namespace cmdp

#endif  // CMDP_BLANKET_H_
