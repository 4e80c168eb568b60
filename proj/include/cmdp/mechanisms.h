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

// Perturbation matrices, the exponential-mechanism baseline, expected-loss
// evaluation and run-time sampling of a released location.

#ifndef CMDP_MECHANISMS_H_
#define CMDP_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/priors.h"
#include "cmdp/utility.h"

namespace cmdp {

struct MechanismMetadata {
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  std::string metric;      // KeyMetric::id
  std::string builder;     // e.g. "lp", "expmech", "refined"
  std::string key_schema;  // e.g. "x", "x|v1|v2", "x|lags:1"

  bool operator==(const MechanismMetadata& o) const;
};

// Row-stochastic keys x outputs matrix.
class PerturbationMatrix {
 public:
  PerturbationMatrix() = default;
  // Throws InvalidArgument unless every entry lies in [0, 1] and every row
  // sums to 1 within `tolerance`, or keys/outputs repeat.
  PerturbationMatrix(std::vector<SecretKey> keys,
                     std::vector<LocationId> outputs,
                     std::vector<double> probs, MechanismMetadata metadata,
                     double tolerance = 1e-9);

  const std::vector<SecretKey>& keys() const { return keys_; }
  const std::vector<LocationId>& outputs() const { return outputs_; }
  const std::vector<double>& probs() const { return probs_; }
  const MechanismMetadata& metadata() const { return metadata_; }
  std::size_t num_keys() const { return keys_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  double at(std::size_t key, std::size_t output) const {
    return probs_[key * outputs_.size() + output];
  }
  std::span<const double> Row(std::size_t key) const {
    return {probs_.data() + key * outputs_.size(), outputs_.size()};
  }
  bool HasKey(const SecretKey& key) const { return index_.count(key) > 0; }
  std::size_t KeyIndex(const SecretKey& key) const;

 private:
  std::vector<SecretKey> keys_;
  std::vector<LocationId> outputs_;
  std::vector<double> probs_;
  MechanismMetadata metadata_;
  std::map<SecretKey, std::size_t> index_;
};

// Header block of `# name=value` lines followed by `key,output,prob` rows.
std::string FormatMatrix(const PerturbationMatrix& q);
PerturbationMatrix ParseMatrix(const std::string& text,
                               const std::string& source = "<memory>");
PerturbationMatrix LoadMatrix(const std::string& path);

// Distance from a secret key to an output location, in km.
using OutputDistance = std::function<double(const SecretKey&, LocationId)>;

// q(k, y) proportional to exp(-eps d(k, y) / 2) over every output.
// Throws InvalidArgument for eps <= 0 or empty key/output lists.
PerturbationMatrix ExpMechanism(const std::vector<SecretKey>& keys,
                                const std::vector<LocationId>& outputs,
                                const OutputDistance& distance, double eps);
// Same with d(k, y) the base distance between k.current and y.
PerturbationMatrix ExpMechanism(const std::vector<SecretKey>& keys,
                                const LocationDomain& domain, double eps);

// sum_k p(k) sum_y c(k, y) q(k, y). Keys and outputs of q and c must be the
// same lists; prior keys must be rows of q (missing rows carry no mass).
double ExpectedLoss(const PerturbationMatrix& q, const CostTensor& cost,
                    const KeyDistribution& prior);

// Inverse-CDF draw from the row of `key` using one SplitMix64 value of
// `seed`. Throws InvalidArgument for an unknown key.
LocationId SampleOutput(const PerturbationMatrix& q, const SecretKey& key,
                        std::uint64_t seed);

// Row key (x, b) for a chronological history whose last element is x_{t-1}:
// b lists history values at `lags` in lag order. Throws InvalidArgument when
// the history is too short.
SecretKey BlanketKeyFor(LocationId x, const std::vector<LocationId>& history,
                        const LagSet& lags);

}  // namespace cmdp

#endif  // CMDP_MECHANISMS_H_
