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

#include "cmdp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "cmdp/csv.h"
#include "cmdp/rng.h"

namespace cmdp {
namespace {

bool SameNumber(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

bool MechanismMetadata::operator==(const MechanismMetadata& o) const {
  return SameNumber(epsilon, o.epsilon) && SameNumber(eta, o.eta) &&
         metric == o.metric && builder == o.builder &&
         key_schema == o.key_schema;
}

PerturbationMatrix::PerturbationMatrix(std::vector<SecretKey> keys,
                                       std::vector<LocationId> outputs,
                                       std::vector<double> probs,
                                       MechanismMetadata metadata,
                                       double tolerance)
    : keys_(std::move(keys)),
      outputs_(std::move(outputs)),
      probs_(std::move(probs)),
      metadata_(std::move(metadata)) {
  if (probs_.size() != keys_.size() * outputs_.size()) {
    throw InvalidArgument("matrix size does not match keys x outputs");
  }
  if (outputs_.empty()) throw InvalidArgument("matrix has no outputs");
  if (std::set<LocationId>(outputs_.begin(), outputs_.end()).size() !=
      outputs_.size()) {
    throw InvalidArgument("duplicate output in matrix");
  }
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    if (!index_.emplace(keys_[k], k).second) {
      throw InvalidArgument("duplicate key " + FormatKey(keys_[k]));
    }
    double sum = 0.0;
    for (double p : Row(k)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("entry outside [0,1] in row " +
                              FormatKey(keys_[k]));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw InvalidArgument("row " + FormatKey(keys_[k]) + " sums to " +
                            FormatDouble(sum));
    }
  }
}

std::size_t PerturbationMatrix::KeyIndex(const SecretKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    throw InvalidArgument("key " + FormatKey(key) + " not in matrix");
  }
  return it->second;
}

std::string FormatMatrix(const PerturbationMatrix& q) {
  const MechanismMetadata& m = q.metadata();
  std::string out;
  out += "# epsilon=" + FormatDouble(m.epsilon) + '\n';
  out += "# eta=" + FormatDouble(m.eta) + '\n';
  out += "# metric=" + m.metric + '\n';
  out += "# builder=" + m.builder + '\n';
  out += "# key_schema=" + m.key_schema + '\n';
  out += "key,output,prob\n";
  for (std::size_t k = 0; k < q.num_keys(); ++k) {
    const std::string key = FormatKey(q.keys()[k]);
    for (std::size_t j = 0; j < q.num_outputs(); ++j) {
      out += key + ',' + std::to_string(q.outputs()[j]) + ',' +
             FormatDouble(q.at(k, j)) + '\n';
    }
  }
  return out;
}

PerturbationMatrix ParseMatrix(const std::string& text,
                               const std::string& source) {
  const CsvTable table =
      CsvTable::Parse(text, {"key", "output", "prob"}, source);
  MechanismMetadata meta;
  for (const std::string& c : table.comments()) {
    const std::string_view line = Trim(c);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string name(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (name == "epsilon") {
      meta.epsilon = ParseDouble(value);
    } else if (name == "eta") {
      meta.eta = ParseDouble(value);
    } else if (name == "metric") {
      meta.metric = value;
    } else if (name == "builder") {
      meta.builder = value;
    } else if (name == "key_schema") {
      meta.key_schema = value;
    }
  }
  std::vector<SecretKey> keys;
  std::vector<LocationId> outputs;
  std::map<SecretKey, std::size_t> key_pos;
  std::map<LocationId, std::size_t> out_pos;
  struct Cell {
    std::size_t k, j;
    double p;
    std::size_t line;
  };
  std::vector<Cell> cells;
  for (const CsvRow& row : table.rows()) {
    try {
      const SecretKey key = ParseKey(row.fields[0]);
      const LocationId y = ParseInt(row.fields[1]);
      const double p = ParseDouble(row.fields[2]);
      auto [ki, knew] = key_pos.emplace(key, keys.size());
      if (knew) keys.push_back(key);
      auto [yi, ynew] = out_pos.emplace(y, outputs.size());
      if (ynew) outputs.push_back(y);
      cells.push_back({ki->second, yi->second, p, row.line});
    } catch (const ParseError& e) {
      throw ParseError(Where(source, row.line) + e.what());
    }
  }
  std::vector<double> probs(keys.size() * outputs.size(), 0.0);
  std::vector<bool> seen(probs.size(), false);
  for (const Cell& c : cells) {
    const std::size_t at = c.k * outputs.size() + c.j;
    if (seen[at]) throw ParseError(Where(source, c.line) + "repeated cell");
    seen[at] = true;
    probs[at] = c.p;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError(source + ": matrix is missing cells");
  }
  try {
    return PerturbationMatrix(std::move(keys), std::move(outputs),
                              std::move(probs), std::move(meta));
  } catch (const InvalidArgument& e) {
    throw ParseError(source + ": " + e.what());
  }
}

PerturbationMatrix LoadMatrix(const std::string& path) {
  return ParseMatrix(ReadTextFile(path), path);
}

PerturbationMatrix ExpMechanism(const std::vector<SecretKey>& keys,
                                const std::vector<LocationId>& outputs,
                                const OutputDistance& distance, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  if (keys.empty() || outputs.empty()) {
    throw InvalidArgument("exponential mechanism needs keys and outputs");
  }
  const std::size_t ny = outputs.size();
  std::vector<double> probs(keys.size() * ny);
  std::vector<double> d(ny);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (std::size_t j = 0; j < ny; ++j) d[j] = distance(keys[k], outputs[j]);
    // Shifting by the row minimum leaves the normalized row unchanged and
    // keeps the largest weight at exactly 1.
    const double dmin = *std::min_element(d.begin(), d.end());
    double total = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      probs[k * ny + j] = std::exp(-eps * (d[j] - dmin) / 2.0);
      total += probs[k * ny + j];
    }
    for (std::size_t j = 0; j < ny; ++j) probs[k * ny + j] /= total;
  }
  MechanismMetadata meta;
  meta.epsilon = eps;
  meta.eta = kInfiniteEta;
  meta.builder = "expmech";
  return PerturbationMatrix(keys, outputs, std::move(probs), std::move(meta));
}

PerturbationMatrix ExpMechanism(const std::vector<SecretKey>& keys,
                                const LocationDomain& domain, double eps) {
  PerturbationMatrix q = ExpMechanism(
      keys, domain.output_ids(),
      [&domain](const SecretKey& k, LocationId y) {
        return domain.Distance(k.current, y);
      },
      eps);
  MechanismMetadata meta = q.metadata();
  meta.metric = "base";
  return PerturbationMatrix(q.keys(), q.outputs(), q.probs(), meta);
}

double ExpectedLoss(const PerturbationMatrix& q, const CostTensor& cost,
                    const KeyDistribution& prior) {
  if (q.keys() != cost.keys() || q.outputs() != cost.outputs()) {
    throw InvalidArgument("matrix and cost tensor are indexed differently");
  }
  double total = 0.0;
  for (const auto& [key, p] : prior) {
    if (p == 0.0) continue;
    const std::size_t k = q.KeyIndex(key);
    double row = 0.0;
    for (std::size_t j = 0; j < q.num_outputs(); ++j) {
      row += cost.at(k, j) * q.at(k, j);
    }
    total += p * row;
  }
  return total;
}

LocationId SampleOutput(const PerturbationMatrix& q, const SecretKey& key,
                        std::uint64_t seed) {
  const std::span<const double> row = q.Row(q.KeyIndex(key));
  SplitMix64 rng(seed);
  const double u = rng.Uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    acc += row[j];
    last = j;
    if (u < acc) return q.outputs()[j];
  }
  // u landed in the rounding gap above the accumulated row sum.
  return q.outputs()[last];
}

SecretKey BlanketKeyFor(LocationId x, const std::vector<LocationId>& history,
                        const LagSet& lags) {
  SecretKey key(x);
  for (int lag : lags) {
    if (lag < 1) throw InvalidArgument("lags are 1-based");
    if (static_cast<std::size_t>(lag) > history.size()) {
      throw InvalidArgument("history of length " +
                            std::to_string(history.size()) +
                            " is too short for lag " + std::to_string(lag));
    }
    key.context.push_back(history[history.size() - lag]);
  }
  return key;
}

}  // namespace cmdp
