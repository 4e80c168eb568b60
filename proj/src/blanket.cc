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

#include "cmdp/blanket.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "cmdp/csv.h"
#include "cmdp/rng.h"

namespace cmdp {
namespace {

double XLogX(double n) { return n > 0.0 ? n * std::log(n) : 0.0; }

// Dense codes for the values of one column.
std::vector<std::uint32_t> Encode(const std::vector<LocationId>& values,
                                  std::uint32_t* cardinality) {
  std::map<LocationId, std::uint32_t> codes;
  std::vector<std::uint32_t> out;
  out.reserve(values.size());
  for (LocationId v : values) {
    auto [it, inserted] =
        codes.emplace(v, static_cast<std::uint32_t>(codes.size()));
    out.push_back(it->second);
  }
  *cardinality = static_cast<std::uint32_t>(codes.size());
  return out;
}

// Sum of n log n over the cells of a three-way table given by cell ids.
class CellCounter {
 public:
  explicit CellCounter(std::uint64_t num_cells) {
    if (num_cells <= (1u << 22)) dense_.assign(num_cells, 0);
  }

  double SumXLogX(const std::vector<std::uint64_t>& cells) {
    double total = 0.0;
    if (!dense_.empty()) {
      for (std::uint64_t c : cells) ++dense_[c];
      for (std::uint64_t c : cells) {
        if (dense_[c] > 0) {
          total += XLogX(static_cast<double>(dense_[c]));
          dense_[c] = 0;
        }
      }
      return total;
    }
    std::vector<std::uint64_t> sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      total += XLogX(static_cast<double>(j - i));
      i = j;
    }
    return total;
  }

 private:
  std::vector<std::uint32_t> dense_;
};

void CheckLag(int lag, int gamma) {
  if (lag < 1 || lag > gamma) {
    throw InvalidArgument("lag " + std::to_string(lag) + " outside 1.." +
                          std::to_string(gamma));
  }
}

}  // namespace

CiSample CiSample::FromSequences(
    const std::vector<std::vector<LocationId>>& sequences, int gamma) {
  if (gamma < 0) throw InvalidArgument("gamma must be >= 0");
  CiSample s;
  s.gamma = gamma;
  const auto g = static_cast<std::size_t>(gamma);
  for (const auto& seq : sequences) {
    for (std::size_t t = g; t < seq.size(); ++t) {
      std::vector<LocationId> row(g + 1);
      for (std::size_t lag = 0; lag <= g; ++lag) row[lag] = seq[t - lag];
      s.rows.push_back(std::move(row));
    }
  }
  return s;
}

void CiSample::Validate() const {
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(gamma) + 1) {
      throw InvalidArgument("CI sample rows must hold gamma + 1 values");
    }
  }
}

CiTestResult CiTest(const CiSample& sample, int target_lag,
                    const LagSet& conditioning, const CiTestOptions& options) {
  sample.Validate();
  if (sample.rows.size() < kMinCiRows) {
    throw InvalidArgument("CI test needs at least " +
                          std::to_string(kMinCiRows) + " rows, got " +
                          std::to_string(sample.rows.size()));
  }
  if (options.permutations < kMinPermutations) {
    throw InvalidArgument("CI test needs at least " +
                          std::to_string(kMinPermutations) + " permutations");
  }
  CheckLag(target_lag, sample.gamma);
  for (int lag : conditioning) {
    CheckLag(lag, sample.gamma);
    if (lag == target_lag) {
      throw InvalidArgument("target lag cannot also be conditioned on");
    }
  }
  const std::size_t n = sample.rows.size();
  std::vector<LocationId> col_a(n), col_b(n);
  std::map<std::vector<LocationId>, std::uint32_t> strata_codes;
  std::vector<std::uint32_t> strata(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = sample.rows[i];
    col_a[i] = row[0];
    col_b[i] = row[static_cast<std::size_t>(target_lag)];
    std::vector<LocationId> z;
    z.reserve(conditioning.size());
    for (int lag : conditioning) z.push_back(row[static_cast<std::size_t>(lag)]);
    auto [it, inserted] = strata_codes.emplace(
        std::move(z), static_cast<std::uint32_t>(strata_codes.size()));
    strata[i] = it->second;
  }
  std::uint32_t na = 0, nb = 0;
  const std::vector<std::uint32_t> a = Encode(col_a, &na);
  std::vector<std::uint32_t> b = Encode(col_b, &nb);
  const std::uint64_t ns = strata_codes.size();

  // Margins n_s, n_sa, n_sb are unchanged by shuffling b within strata, so
  // only sum n_sab log n_sab needs recomputing per permutation.
  auto margin = [&](auto key) {
    std::map<std::uint64_t, double> counts;
    for (std::size_t i = 0; i < n; ++i) counts[key(i)] += 1.0;
    double s = 0.0;
    for (const auto& [k, c] : counts) s += XLogX(c);
    return s;
  };
  const double s_s = margin([&](std::size_t i) { return strata[i]; });
  const double s_sa = margin([&](std::size_t i) {
    return std::uint64_t{strata[i]} * na + a[i];
  });
  const double s_sb = margin([&](std::size_t i) {
    return std::uint64_t{strata[i]} * nb + b[i];
  });

  CellCounter counter(ns * na * nb);
  std::vector<std::uint64_t> cells(n);
  auto joint = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      cells[i] = (std::uint64_t{strata[i]} * na + a[i]) * nb + b[i];
    }
    return counter.SumXLogX(cells);
  };
  const double t_obs = joint();
  CiTestResult result;
  result.g_statistic = std::max(0.0, 2.0 * (t_obs + s_s - s_sa - s_sb));

  std::vector<std::vector<std::size_t>> members(ns);
  for (std::size_t i = 0; i < n; ++i) members[strata[i]].push_back(i);
  SplitMix64 rng(options.seed);
  const double slack = 1e-9 * std::max(1.0, std::abs(t_obs));
  int as_extreme = 0;
  std::vector<std::uint32_t> values;
  for (int p = 0; p < options.permutations; ++p) {
    for (const auto& idx : members) {
      if (idx.size() < 2) continue;
      values.clear();
      for (std::size_t i : idx) values.push_back(b[i]);
      rng.Shuffle(values);
      for (std::size_t k = 0; k < idx.size(); ++k) b[idx[k]] = values[k];
    }
    if (joint() >= t_obs - slack) ++as_extreme;
  }
  result.p_value = (1.0 + as_extreme) / (1.0 + options.permutations);
  return result;
}

std::string LabelName(HypothesisLabel label) {
  return label == HypothesisLabel::kReject ? "reject" : "fail_to_reject";
}

HypothesisLabel ParseLabel(const std::string& text) {
  if (text == "reject") return HypothesisLabel::kReject;
  if (text == "fail_to_reject") return HypothesisLabel::kFailToReject;
  throw ParseError("unknown label '" + text + "'");
}

BlanketResult IdentifyBlanket(const CiSample& sample, int gamma,
                              std::uint64_t seed, int permutations) {
  if (gamma < 1) throw InvalidArgument("blanket search needs gamma >= 1");
  if (sample.gamma < gamma) {
    throw InvalidArgument("sample holds fewer lags than gamma");
  }
  BlanketResult result;
  result.lags = {1};
  bool growing = true;
  for (int m = 1; m < gamma; ++m) {
    HypothesisOutcome h;
    h.m = m;
    if (growing) {
      CiTestOptions opt;
      opt.permutations = permutations;
      opt.seed = DeriveSeed(seed, static_cast<std::uint64_t>(m));
      h.p_value = CiTest(sample, m + 1, result.lags, opt).p_value;
      h.tested = true;
      if (h.p_value <= kCiAlpha) {
        h.label = HypothesisLabel::kReject;
        result.lags.push_back(m + 1);
      } else {
        growing = false;
      }
    } else {
      h.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    result.hypotheses.push_back(h);
  }
  result.exhausted = growing;
  return result;
}

void RegionGrid::Validate() const {
  if (rows < 1 || cols < 1) throw InvalidArgument("grid needs rows, cols >= 1");
  if (!(lat_max > lat_min) || !(lon_max > lon_min)) {
    throw InvalidArgument("grid box must have positive extent");
  }
}

std::optional<int> RegionGrid::Cell(const GeoPoint& p) const {
  if (p.lat() < lat_min || p.lat() > lat_max || p.lon() < lon_min ||
      p.lon() > lon_max) {
    return std::nullopt;
  }
  const int r = std::min(
      rows - 1,
      static_cast<int>(std::floor((p.lat() - lat_min) / (lat_max - lat_min) *
                                  rows)));
  const int c = std::min(
      cols - 1,
      static_cast<int>(std::floor((p.lon() - lon_min) / (lon_max - lon_min) *
                                  cols)));
  return r * cols + c;
}

GeoPoint RegionGrid::CellCenter(int cell) const {
  if (cell < 0 || cell >= num_cells()) {
    throw InvalidArgument("cell index out of range");
  }
  const int r = cell / cols;
  const int c = cell % cols;
  return GeoPoint(lat_min + (r + 0.5) * (lat_max - lat_min) / rows,
                  lon_min + (c + 0.5) * (lon_max - lon_min) / cols);
}

RegionGrid RegionGrid::Rome() { return {41.64, 42.12, 12.23, 12.83, 4, 5}; }

RegionGrid RegionGrid::Porto() { return {41.03, 41.27, 8.49, 8.73, 3, 3}; }

RegionGrid RegionGrid::Covering(const std::vector<GeoPoint>& points, int rows,
                                int cols) {
  if (points.empty()) throw InvalidArgument("no points to cover");
  RegionGrid g;
  g.lat_min = g.lat_max = points.front().lat();
  g.lon_min = g.lon_max = points.front().lon();
  for (const GeoPoint& p : points) {
    g.lat_min = std::min(g.lat_min, p.lat());
    g.lat_max = std::max(g.lat_max, p.lat());
    g.lon_min = std::min(g.lon_min, p.lon());
    g.lon_max = std::max(g.lon_max, p.lon());
  }
  g.lat_min -= 1e-9;
  g.lat_max += 1e-9;
  g.lon_min -= 1e-9;
  g.lon_max += 1e-9;
  g.rows = rows;
  g.cols = cols;
  g.Validate();
  return g;
}

int TimeBin(double timestamp) {
  double s = std::fmod(timestamp, 86400.0);
  if (s < 0.0) s += 86400.0;
  return std::min(23, static_cast<int>(s / 3600.0));
}

int SpeedBin(double mph) {
  if (!(mph > 0.0)) return 0;
  return std::min(kNumSpeedBins - 1,
                  static_cast<int>(std::floor(mph / kSpeedBinMph)));
}

std::optional<FeatureBin> BinWindow(const std::vector<TrajectoryRecord>& window,
                                    const RegionGrid& grid) {
  if (window.size() < 2) {
    throw InvalidArgument("a window needs at least two records");
  }
  const TrajectoryRecord& last = window.back();
  const std::optional<int> cell = grid.Cell(last.point);
  if (!cell) return std::nullopt;
  double km = 0.0;
  for (std::size_t i = 1; i < window.size(); ++i) {
    km += HaversineKm(window[i - 1].point, window[i].point);
  }
  const double hours = (last.timestamp - window.front().timestamp) / 3600.0;
  const double mph = hours > 0.0 ? km / hours / kKmPerMile : 0.0;
  return FeatureBin{TimeBin(last.timestamp), SpeedBin(mph), *cell};
}

Partition PartitionDataset(const TrajectoryLog& log, const RoadGraph& graph,
                           int gamma, const RegionGrid& grid) {
  if (log.num_records() == 0) throw InvalidArgument("trajectory log is empty");
  if (gamma < 1) throw InvalidArgument("partitioning needs gamma >= 1");
  grid.Validate();
  Partition out;
  const auto g = static_cast<std::size_t>(gamma);
  for (const Trajectory& traj : log.trajectories) {
    const auto& recs = traj.records;
    if (recs.size() <= g) continue;
    std::vector<LocationId> nodes;
    nodes.reserve(recs.size());
    for (const TrajectoryRecord& r : recs) {
      nodes.push_back(SnapToNode(r.point, graph));
    }
    for (std::size_t t = g; t < recs.size(); ++t) {
      const std::vector<TrajectoryRecord> window(
          recs.begin() + static_cast<std::ptrdiff_t>(t - g),
          recs.begin() + static_cast<std::ptrdiff_t>(t + 1));
      const std::optional<FeatureBin> bin = BinWindow(window, grid);
      if (!bin) {
        ++out.dropped_outside;
        continue;
      }
      BinSample& bs = out.bins[*bin];
      bs.sample.gamma = gamma;
      std::vector<LocationId> row(g + 1);
      for (std::size_t lag = 0; lag <= g; ++lag) row[lag] = nodes[t - lag];
      bs.sample.rows.push_back(std::move(row));
    }
  }
  for (auto& [bin, bs] : out.bins) {
    bs.usable = bs.sample.rows.size() >= kMinCiRows;
  }
  return out;
}

std::vector<BinAnalysis> AnalyzePartition(const Partition& partition,
                                          int gamma, std::uint64_t seed,
                                          int permutations) {
  std::vector<BinAnalysis> out;
  std::uint64_t stream = 0;
  for (const auto& [bin, bs] : partition.bins) {
    ++stream;
    if (!bs.usable) continue;
    out.push_back({bin, IdentifyBlanket(bs.sample, gamma,
                                        DeriveSeed(seed, stream),
                                        permutations)});
  }
  return out;
}

std::vector<LabeledHypothesis> LabelsFrom(
    const std::vector<BinAnalysis>& analyses) {
  std::vector<LabeledHypothesis> out;
  for (const BinAnalysis& a : analyses) {
    for (const HypothesisOutcome& h : a.result.hypotheses) {
      out.push_back({a.bin, h.m, h.label});
    }
  }
  return out;
}

HypothesisLabel BlanketPredictor::Query(const FeatureBin& bin, int m) const {
  auto it = table_.find({bin, m});
  return it == table_.end() ? default_ : it->second;
}

BlanketPredictor TrainPredictor(const std::vector<LabeledHypothesis>& labels) {
  if (labels.empty()) throw InvalidArgument("no labels to train on");
  std::map<std::pair<FeatureBin, int>, std::pair<int, int>> votes;
  for (const LabeledHypothesis& l : labels) {
    auto& v = votes[{l.bin, l.m}];
    if (l.label == HypothesisLabel::kReject) {
      ++v.first;
    } else {
      ++v.second;
    }
  }
  BlanketPredictor p;
  for (const auto& [key, v] : votes) {
    p.table_[key] = v.first > v.second ? HypothesisLabel::kReject
                                       : HypothesisLabel::kFailToReject;
  }
  return p;
}

LagSet PredictBlanket(const BlanketPredictor& predictor, const FeatureBin& bin,
                      int gamma) {
  LagSet lags = {1};
  for (int m = 1; m < gamma; ++m) {
    if (predictor.Query(bin, m) != HypothesisLabel::kReject) break;
    lags.push_back(m + 1);
  }
  return lags;
}

LagSet PredictBlanket(const BlanketPredictor& predictor,
                      const RegionGrid& grid, double timestamp,
                      double speed_mph, const GeoPoint& point, int gamma) {
  const std::optional<int> cell = grid.Cell(point);
  if (!cell) return {1};
  return PredictBlanket(predictor,
                        FeatureBin{TimeBin(timestamp), SpeedBin(speed_mph),
                                   *cell},
                        gamma);
}

ClassifierMetrics EvaluatePredictor(
    const BlanketPredictor& predictor,
    const std::vector<LabeledHypothesis>& data) {
  ClassifierMetrics m;
  for (const LabeledHypothesis& l : data) {
    const bool predicted_pos =
        predictor.Query(l.bin, l.m) == HypothesisLabel::kFailToReject;
    const bool actual_pos = l.label == HypothesisLabel::kFailToReject;
    if (predicted_pos && actual_pos) ++m.tp;
    if (predicted_pos && !actual_pos) ++m.fp;
    if (!predicted_pos && !actual_pos) ++m.tn;
    if (!predicted_pos && actual_pos) ++m.fn;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto ratio = [nan](double num, double den) {
    return den > 0.0 ? num / den : nan;
  };
  m.accuracy = ratio(static_cast<double>(m.tp + m.tn),
                     static_cast<double>(data.size()));
  m.precision = ratio(static_cast<double>(m.tp),
                      static_cast<double>(m.tp + m.fp));
  m.recall = ratio(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fn));
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

namespace {

const std::vector<std::string> kLabelHeader = {"time_bin", "speed_bin",
                                               "region_bin", "m", "label"};

std::string LabelRow(const FeatureBin& bin, int m, HypothesisLabel label) {
  return std::to_string(bin.time_bin) + ',' + std::to_string(bin.speed_bin) +
         ',' + std::to_string(bin.region_bin) + ',' + std::to_string(m) + ',' +
         LabelName(label) + '\n';
}

LabeledHypothesis ParseLabelRow(const CsvRow& row) {
  LabeledHypothesis l;
  l.bin.time_bin = static_cast<int>(ParseInt(row.fields[0]));
  l.bin.speed_bin = static_cast<int>(ParseInt(row.fields[1]));
  l.bin.region_bin = static_cast<int>(ParseInt(row.fields[2]));
  l.m = static_cast<int>(ParseInt(row.fields[3]));
  l.label = ParseLabel(row.fields[4]);
  if (l.bin.time_bin < 0 || l.bin.time_bin >= kNumTimeBins ||
      l.bin.speed_bin < 0 || l.bin.speed_bin >= kNumSpeedBins ||
      l.bin.region_bin < 0 || l.m < 1) {
    throw ParseError("bin index out of range");
  }
  return l;
}

}  // namespace

std::string FormatLabels(const std::vector<LabeledHypothesis>& labels) {
  std::string out = "time_bin,speed_bin,region_bin,m,label\n";
  for (const LabeledHypothesis& l : labels) out += LabelRow(l.bin, l.m, l.label);
  return out;
}

std::vector<LabeledHypothesis> ParseLabels(const std::string& text,
                                           const std::string& source) {
  const CsvTable table = CsvTable::Parse(text, kLabelHeader, source);
  std::vector<LabeledHypothesis> out;
  for (const CsvRow& row : table.rows()) {
    try {
      out.push_back(ParseLabelRow(row));
    } catch (const Error& e) {
      throw ParseError(Where(source, row.line) + e.what());
    }
  }
  return out;
}

std::string FormatPredictor(const BlanketPredictor& predictor) {
  std::string out = "time_bin,speed_bin,region_bin,m,label\n";
  for (const auto& [key, label] : predictor.table()) {
    out += LabelRow(key.first, key.second, label);
  }
  out += "*,*,*,*," + LabelName(predictor.default_label()) + '\n';
  return out;
}

BlanketPredictor ParsePredictor(const std::string& text,
                                const std::string& source) {
  const CsvTable table = CsvTable::Parse(text, kLabelHeader, source);
  BlanketPredictor p;
  bool have_default = false;
  for (const CsvRow& row : table.rows()) {
    try {
      if (row.fields[0] == "*") {
        p.default_ = ParseLabel(row.fields[4]);
        have_default = true;
        continue;
      }
      const LabeledHypothesis l = ParseLabelRow(row);
      if (!p.table_.emplace(std::make_pair(l.bin, l.m), l.label).second) {
        throw ParseError("repeated table entry");
      }
    } catch (const Error& e) {
      throw ParseError(Where(source, row.line) + e.what());
    }
  }
  if (!have_default) throw ParseError(source + ": missing default-rule row");
  return p;
}

}  // namespace cmdp
