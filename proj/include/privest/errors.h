//
// Copyright 2026 The privest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVEST_ERRORS_H_
#define PRIVEST_ERRORS_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace privest {

// A parameter or observation lies outside the set on which the model is
// defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-supplied argument violates a precondition (n = 0, k > n, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data is valid for the family but admits no estimate, e.g. an exponential
// block whose sample mean is zero.
class DegenerateDataError : public std::runtime_error {
 public:
  explicit DegenerateDataError(const std::string& what,
                               std::optional<std::size_t> block = std::nullopt)
      : std::runtime_error(what), block_(block) {}

  // Index of the offending block when raised from sample-and-aggregate.
  std::optional<std::size_t> block() const { return block_; }

 private:
  std::optional<std::size_t> block_;
};

}  // namespace privest

#endif  // PRIVEST_ERRORS_H_
