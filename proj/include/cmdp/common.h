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

// Shared vocabulary types: location ids, secret keys, error classes and
// number formatting used by every file format in the project.

#ifndef CMDP_COMMON_H_
#define CMDP_COMMON_H_

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmdp {

using LocationId = std::int64_t;

// Set of context lags (1 means x_{t-1}), strictly increasing.
using LagSet = std::vector<int>;

// Probability distribution over location ids. Ordered so that iteration, and
// therefore every floating-point accumulation over it, is deterministic.
using Distribution = std::map<LocationId, double>;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents are malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A secret record joined with (a restriction of) its context: the current
// location x_t followed by context values ordered by increasing lag, i.e.
// context[0] is x_{t-1}. An empty context denotes a context-free secret.
struct SecretKey {
  LocationId current = 0;
  std::vector<LocationId> context;

  SecretKey() = default;
  explicit SecretKey(LocationId x) : current(x) {}
  SecretKey(LocationId x, std::vector<LocationId> v)
      : current(x), context(std::move(v)) {}

  auto operator<=>(const SecretKey&) const = default;
  bool operator==(const SecretKey&) const = default;
};

// Text form "x" or "x|v1|v2|..." (lag order). Never contains commas, so keys
// can be embedded in delimited files.
std::string FormatKey(const SecretKey& key);
SecretKey ParseKey(std::string_view text);

// Shortest round-trip decimal form of a double (17 significant digits).
// Infinities render as "inf"/"-inf" and NaN as "nan".
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);
std::int64_t ParseInt(std::string_view text);

}  // namespace cmdp

#endif  // CMDP_COMMON_H_
