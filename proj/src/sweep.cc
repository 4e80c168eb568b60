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

#include "cmdp/sweep.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <thread>
#include <utility>

#include "cmdp/audit.h"
#include "cmdp/geo.h"
#include "cmdp/lp.h"
#include "cmdp/mechanisms.h"
#include "cmdp/rng.h"
#include "cmdp/utility.h"

namespace cmdp {
namespace {

// One evaluation record class: a full-context key with the blanket sizes the
// predictor and the direct search assign to it, weighted so that the keys
// follow the joint prior.
struct Unit {
  SecretKey full;
  std::size_t row = 0;  // row of the full-context cost tensor
  double weight = 0.0;
  int k_pred = 1;
  int k_true = 1;
};

using KeyFn = std::function<SecretKey(const Unit&)>;

LagSet Prefix(int k) {
  LagSet lags(static_cast<std::size_t>(k));
  std::iota(lags.begin(), lags.end(), 1);
  return lags;
}

struct Projected {
  std::vector<SecretKey> keys;
  KeyDistribution prior;
  CostTensor cost;
};

// Prior and cost of the keys produced by `fn`: masses add up and cost rows
// are the mass-weighted mixtures of full-context rows.
Projected Project(const std::vector<Unit>& units, const CostTensor& full,
                  const KeyFn& fn) {
  std::map<SecretKey, std::vector<double>> sums;
  Projected p;
  const std::size_t ny = full.num_outputs();
  for (const Unit& u : units) {
    const SecretKey key = fn(u);
    auto [it, inserted] = sums.try_emplace(key, std::vector<double>(ny, 0.0));
    for (std::size_t y = 0; y < ny; ++y) {
      it->second[y] += u.weight * full.at(u.row, y);
    }
    p.prior[key] += u.weight;
  }
  std::vector<double> values;
  for (const auto& [key, row] : sums) {
    p.keys.push_back(key);
    const double mass = p.prior.at(key);
    for (double v : row) values.push_back(v / mass);
  }
  p.cost = CostTensor(p.keys, full.outputs(), std::move(values));
  return p;
}

double EvaluateLoss(const PerturbationMatrix& q, const std::vector<Unit>& units,
                    const CostTensor& full, const KeyFn& fn) {
  if (q.outputs() != full.outputs()) {
    throw InvalidArgument("mechanism outputs differ from evaluation outputs");
  }
  double total = 0.0;
  for (const Unit& u : units) {
    const std::size_t k = q.KeyIndex(fn(u));
    double row = 0.0;
    for (std::size_t y = 0; y < q.num_outputs(); ++y) {
      row += full.at(u.row, y) * q.at(k, y);
    }
    total += u.weight * row;
  }
  return total;
}

std::string Num(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "NA";
}

std::string CsvSafe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string MetricsRow(const std::string& split, std::size_t n,
                       const ClassifierMetrics& m) {
  return split + ',' + std::to_string(n) + ',' + FormatDouble(m.accuracy) +
         ',' + FormatDouble(m.precision) + ',' + FormatDouble(m.recall) + ',' +
         FormatDouble(m.f1) + '\n';
}

TrajectoryLog Subset(const TrajectoryLog& log,
                     const std::vector<std::size_t>& idx) {
  TrajectoryLog out;
  for (std::size_t i : idx) out.trajectories.push_back(log.trajectories[i]);
  return out;
}

}  // namespace

void SweepConfig::Validate() const {
  if (gamma < 1) throw InvalidArgument("sweep needs gamma >= 1");
  if (std::isnan(eta) || eta < 0.0) throw InvalidArgument("eta must be >= 0");
  if (epsilons.empty()) throw InvalidArgument("epsilon list is empty");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw InvalidArgument("epsilon values must be positive and finite");
    }
  }
  if (!weights.empty() && static_cast<int>(weights.size()) != gamma) {
    throw InvalidArgument("weights must have gamma entries");
  }
  for (const std::string& m : mechanisms) {
    if (std::find(kSweepMechanisms.begin(), kSweepMechanisms.end(), m) ==
        kSweepMechanisms.end()) {
      throw InvalidArgument("unknown mechanism '" + m + "'");
    }
  }
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw InvalidArgument("eval fraction must lie in (0, 1)");
  }
  if (permutations < kMinPermutations) {
    throw InvalidArgument("at least " + std::to_string(kMinPermutations) +
                          " permutations required");
  }
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  if (grid) grid->Validate();
  if (grid_rows < 1 || grid_cols < 1) {
    throw InvalidArgument("grid rows and cols must be >= 1");
  }
}

std::string FormatSweepTable(const std::vector<SweepCell>& cells) {
  std::string out =
      "mechanism,epsilon,expected_loss_km,max_pl,pass,build_s,solve_s\n";
  for (const SweepCell& c : cells) {
    out += c.mechanism + ',' + FormatDouble(c.epsilon) + ',' +
           Num(c.expected_loss) + ',' +
           (c.error.empty() ? FormatDouble(c.max_pl) : "NA") + ',' +
           (c.pass ? "true" : "false") + ',' + Num(c.build_s) + ',' +
           Num(c.solve_s) + '\n';
  }
  return out;
}

SweepResult RunSweep(const RoadGraph& graph, const TrajectoryLog& log,
                     const SweepConfig& config) {
  config.Validate();
  if (log.trajectories.size() < 2) {
    throw InvalidArgument("sweep needs at least two trajectories");
  }
  const int gamma = config.gamma;
  SweepResult result;
  std::string errors = "mechanism,epsilon,stage,message\n";

  // Train/eval split over trajectories.
  std::vector<std::size_t> order(log.trajectories.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 split_rng(DeriveSeed(config.seed, 1));
  split_rng.Shuffle(order);
  const auto n_eval = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::llround(config.eval_fraction * static_cast<double>(order.size()))),
      1, order.size() - 1);
  std::vector<std::size_t> eval_idx(order.begin(),
                                    order.begin() +
                                        static_cast<std::ptrdiff_t>(n_eval));
  std::vector<std::size_t> train_idx(
      order.begin() + static_cast<std::ptrdiff_t>(config.disjoint_split ? n_eval
                                                                        : 0),
      order.end());
  std::sort(eval_idx.begin(), eval_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  const TrajectoryLog train = Subset(log, train_idx);
  const TrajectoryLog eval = Subset(log, eval_idx);

  // Priors over the whole log.
  PriorOptions popt;
  popt.task_mode = config.task_mode;
  PriorModel model = EstimatePriors(log, graph, gamma, popt);
  model.set_task_prior(SampleTasks(model.p_task(), config.task_count,
                                   DeriveSeed(config.seed, 2)));

  std::vector<GeoPoint> node_points;
  for (const Location& l : graph.nodes()) node_points.push_back(l.point);
  const RegionGrid grid =
      config.grid ? *config.grid
                  : RegionGrid::Covering(node_points, config.grid_rows,
                                         config.grid_cols);

  // Blanket discovery: per-bin search on the whole log (direct blankets and
  // p-values), predictor trained on the train split and scored on eval.
  const Partition all_part = PartitionDataset(log, graph, gamma, grid);
  const auto all_analysis = AnalyzePartition(all_part, gamma,
                                             DeriveSeed(config.seed, 3),
                                             config.permutations);
  std::map<FeatureBin, int> true_k;
  std::string pvalues =
      "time_bin,speed_bin,region_bin,m,speed,lon,lat,time,p_value\n";
  for (const BinAnalysis& a : all_analysis) {
    true_k[a.bin] = static_cast<int>(a.result.lags.size());
    const GeoPoint center = grid.CellCenter(a.bin.region_bin);
    for (const HypothesisOutcome& h : a.result.hypotheses) {
      if (!h.tested) continue;
      pvalues += std::to_string(a.bin.time_bin) + ',' +
                 std::to_string(a.bin.speed_bin) + ',' +
                 std::to_string(a.bin.region_bin) + ',' + std::to_string(h.m) +
                 ',' + FormatDouble((a.bin.speed_bin + 0.5) * kSpeedBinMph) +
                 ',' + FormatDouble(center.lon()) + ',' +
                 FormatDouble(center.lat()) + ',' +
                 std::to_string(a.bin.time_bin) + ',' +
                 FormatDouble(h.p_value) + '\n';
    }
  }
  result.files["pvalues.csv"] = pvalues;

  const auto train_labels = LabelsFrom(
      AnalyzePartition(PartitionDataset(train, graph, gamma, grid), gamma,
                       DeriveSeed(config.seed, 4), config.permutations));
  const auto eval_labels = LabelsFrom(
      AnalyzePartition(PartitionDataset(eval, graph, gamma, grid), gamma,
                       DeriveSeed(config.seed, 5), config.permutations));
  BlanketPredictor predictor;
  if (train_labels.empty()) {
    errors += "LP+C-mDP,NA,predictor,no usable training bin; default rule "
              "only\n";
  } else {
    predictor = TrainPredictor(train_labels);
  }
  result.files["labels.csv"] = FormatLabels(train_labels);
  result.files["predictor.csv"] = FormatPredictor(predictor);
  result.files["predictor_metrics.csv"] =
      "split,n,accuracy,precision,recall,f1\n" +
      MetricsRow("train", train_labels.size(),
                 EvaluatePredictor(predictor, train_labels)) +
      MetricsRow("eval", eval_labels.size(),
                 EvaluatePredictor(predictor, eval_labels));

  // Evaluation records grouped by full-context key.
  std::map<SecretKey, std::map<std::pair<int, int>, double>> seen;
  std::map<int, std::pair<double, double>> size_counts;
  double n_records = 0.0;
  const auto g = static_cast<std::size_t>(gamma);
  for (const Trajectory& t : eval.trajectories) {
    if (t.records.size() <= g) continue;
    std::vector<LocationId> nodes;
    for (const TrajectoryRecord& r : t.records) {
      nodes.push_back(SnapToNode(r.point, graph));
    }
    for (std::size_t i = g; i < t.records.size(); ++i) {
      SecretKey key(nodes[i]);
      for (std::size_t lag = 1; lag <= g; ++lag) {
        key.context.push_back(nodes[i - lag]);
      }
      const std::vector<TrajectoryRecord> window(
          t.records.begin() + static_cast<std::ptrdiff_t>(i - g),
          t.records.begin() + static_cast<std::ptrdiff_t>(i + 1));
      int kp = 1, kt = 1;
      if (const auto bin = BinWindow(window, grid)) {
        kp = static_cast<int>(PredictBlanket(predictor, *bin, gamma).size());
        if (auto it = true_k.find(*bin); it != true_k.end()) kt = it->second;
      }
      seen[key][{kp, kt}] += 1.0;
      size_counts[kp].first += 1.0;
      size_counts[kt].second += 1.0;
      n_records += 1.0;
    }
  }
  std::string sizes = "k,predicted_share,true_share\n";
  for (const auto& [k, c] : size_counts) {
    sizes += std::to_string(k) + ',' + FormatDouble(c.first / n_records) +
             ',' + FormatDouble(c.second / n_records) + '\n';
  }
  result.files["blanket_sizes.csv"] = sizes;

  // Secrets are the observed locations; outputs are every node.
  std::vector<Location> secrets;
  for (const Location& l : graph.nodes()) {
    if (model.p_x().count(l.id) > 0) secrets.push_back(l);
  }
  const auto domain =
      std::make_shared<const LocationDomain>(secrets, graph.nodes());
  const ContextWeights weights =
      config.weights.empty() ? ContextWeights::Decay(gamma)
                             : ContextWeights(config.weights);

  std::vector<SecretKey> full_keys;
  for (const auto& [key, p] : model.p_joint()) full_keys.push_back(key);
  const CostTensor full_cost =
      CostFullContext(graph, model, *domain, full_keys);
  std::vector<Unit> units;
  for (std::size_t r = 0; r < full_keys.size(); ++r) {
    const double p = model.p_joint().at(full_keys[r]);
    auto it = seen.find(full_keys[r]);
    if (it == seen.end()) {
      units.push_back({full_keys[r], r, p, 1, 1});
      continue;
    }
    double total = 0.0;
    for (const auto& [ks, n] : it->second) total += n;
    for (const auto& [ks, n] : it->second) {
      units.push_back({full_keys[r], r, p * n / total, ks.first, ks.second});
    }
  }

  const KeyFn plain = [](const Unit& u) { return SecretKey(u.full.current); };
  const KeyFn markov1 = [](const Unit& u) { return ProjectKey(u.full, {1}); };
  const KeyFn predicted = [](const Unit& u) {
    return ProjectKey(u.full, Prefix(u.k_pred));
  };
  const KeyFn direct = [](const Unit& u) {
    return ProjectKey(u.full, Prefix(u.k_true));
  };
  const KeyMetric base = BaseKeyMetric(*domain);
  const KeyMetric prefix = PrefixKeyMetric(*domain, weights);

  // Context-free baseline inputs.
  std::vector<SecretKey> plain_keys;
  KeyDistribution plain_prior;
  for (const auto& [x, p] : model.p_x()) {
    plain_keys.emplace_back(x);
    plain_prior[SecretKey(x)] = p;
  }
  const CostTensor free_cost = CostContextFree(graph, model, *domain);

  std::map<std::string, Projected> projected;
  projected.emplace("LP+Markov1", Project(units, full_cost, markov1));
  projected.emplace("LP+C-mDP", Project(units, full_cost, predicted));
  projected.emplace("LP+TrueMB", Project(units, full_cost, direct));

  for (double eps : config.epsilons) {
    for (const std::string& m : config.mechanisms) {
      SweepCell cell;
      cell.mechanism = m;
      cell.epsilon = eps;
      result.cells.push_back(cell);
    }
  }

  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  auto run_cell = [&](SweepCell& cell) {
    const std::string& m = cell.mechanism;
    std::string stage = "build";
    try {
      const auto t0 = Clock::now();
      PerturbationMatrix q;
      const KeyMetric* metric = &base;
      const KeyDistribution* prior = &plain_prior;
      KeyFn fn = plain;
      double solve_time = 0.0;
      if (m == "ExpMech") {
        q = ExpMechanism(plain_keys, *domain, cell.epsilon);
      } else {
        MechanismLp lp;
        if (m == "LP") {
          lp = BuildMdpLp(free_cost, plain_prior, base, cell.epsilon,
                          config.eta);
        } else {
          const Projected& p = projected.at(m);
          lp = BuildCmdpReducedLp(p.cost, p.prior, prefix, cell.epsilon,
                                  config.eta);
          metric = &prefix;
          prior = &p.prior;
          fn = m == "LP+Markov1" ? markov1
               : m == "LP+C-mDP" ? predicted
                                 : direct;
        }
        stage = "solve";
        const auto t1 = Clock::now();
        const LpSolution sol = Solve(lp);
        solve_time = seconds(t1, Clock::now());
        if (sol.status != SolveStatus::kOptimal) {
          throw Error("solver status " + StatusName(sol.status));
        }
        q = sol.q;
      }
      const double total = seconds(t0, Clock::now());
      stage = "audit";
      const AuditReport report =
          Audit(q, *metric, *prior, cell.epsilon, config.eta);
      stage = "evaluate";
      cell.expected_loss = EvaluateLoss(q, units, full_cost, fn);
      cell.max_pl = report.max_pl;
      cell.pass = report.pass;
      if (config.timing) {
        cell.build_s = total - solve_time;
        cell.solve_s = solve_time;
      }
    } catch (const std::exception& e) {
      cell.error = stage + ": " + e.what();
      cell.pass = false;
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(config.workers), result.cells.size());
  if (workers <= 1) {
    for (SweepCell& c : result.cells) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < result.cells.size(); i = next++) {
          run_cell(result.cells[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (const SweepCell& c : result.cells) {
    if (c.error.empty()) continue;
    const auto colon = c.error.find(':');
    errors += c.mechanism + ',' + FormatDouble(c.epsilon) + ',' +
              c.error.substr(0, colon) + ',' +
              CsvSafe(c.error.substr(colon + 2)) + '\n';
  }
  result.files["results.csv"] = FormatSweepTable(result.cells);
  result.files["errors.csv"] = errors;
  return result;
}

}  // namespace cmdp
