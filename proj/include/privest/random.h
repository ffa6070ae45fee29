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

#ifndef PRIVEST_RANDOM_H_
#define PRIVEST_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace privest {

// Explicit, caller-owned source of randomness. Wraps std::mt19937_64, whose
// output sequence is fixed by the standard; the conversion to doubles is
// done here rather than through std::uniform_real_distribution so that a
// seed reproduces the same values with any standard library.
//
// Not thread-safe. Each worker owns its own stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1): 53 random bits, offset by half an
  // ulp so neither endpoint is produced.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [lo, hi].
  double UniformIn(double lo, double hi) {
    return lo + (hi - lo) * UniformOpen();
  }

  // Uniform index in [0, n). Requires n > 0.
  std::uint64_t Index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a tuple of coordinates (e.g. n, trial index,
// stream purpose) into an independent-looking 64-bit seed. Used to give
// every Monte Carlo trial its own stream so results do not depend on the
// order or thread in which trials run.
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> coords);

}  // namespace privest

#endif  // PRIVEST_RANDOM_H_
