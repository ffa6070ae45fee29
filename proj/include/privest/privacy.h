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

#ifndef PRIVEST_PRIVACY_H_
#define PRIVEST_PRIVACY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "privest/model.h"
#include "privest/random.h"

namespace privest {

// Privacy budget epsilon, block count k and the Laplace scale
// diameter / (k * epsilon) they imply.
struct PrivacyParams {
  double epsilon;
  std::size_t k;
  double lambda_scale;

  // Throws ArgumentError for non-positive epsilon or diameter, or k == 0.
  static PrivacyParams Make(double epsilon, std::size_t k, double diameter);
};

// Full record of one sample-and-aggregate run.
struct PrivateEstimate {
  std::vector<double> block_estimates;  // z_j, each inside the space
  double average;                       // mean of block_estimates
  double noise;                         // Laplace draw R
  double output;                        // average + noise (optionally clamped)
  PrivacyParams params;
  std::size_t block_size;  // floor(n / k); the first n mod k blocks hold one more
};

// k = ceil(n^(3/5) * diameter^(2/5) / epsilon^(2/5)), clamped to [1, n].
std::size_t ChooseK(std::size_t n, double epsilon, double diameter);

// Sizes of the k contiguous blocks: the first n mod k blocks get
// floor(n/k) + 1 points, the rest floor(n/k).
std::vector<std::size_t> BlockSizes(std::size_t n, std::size_t k);

// Splits data into k disjoint contiguous blocks covering every point.
// Throws ArgumentError unless 1 <= k <= data.size().
std::vector<std::span<const double>> Partition(std::span<const double> data,
                                               std::size_t k);

// Inverse CDF of Laplace(0, scale): -scale * sgn(u - 1/2) * ln(1 - 2|u - 1/2|).
double LaplaceInverseCdf(double u, double scale);

// One Laplace(0, scale) draw; consumes exactly one uniform from rng.
double LaplaceDraw(double scale, RandomStream& rng);

// Noiseless part of sample-and-aggregate: the bias-corrected MLE of each
// block, clamped to the space. DegenerateDataError carries the block index.
std::vector<double> BlockEstimates(const Family& family,
                                   std::span<const double> data,
                                   std::size_t k);

// Mean of BlockEstimates.
double BlockAverage(const Family& family, std::span<const double> data,
                    std::size_t k);

enum class OutputClamp { kNone, kToSpace };

// Sample-and-aggregate: partition into k blocks (k = ChooseK when absent),
// bias-corrected MLE per block, average, add Laplace(diameter/(k eps)).
// With OutputClamp::kToSpace the released value is additionally clamped to
// the parameter space, which is post-processing and keeps the guarantee.
PrivateEstimate SampleAggregate(const Family& family,
                                std::span<const double> data, double epsilon,
                                std::optional<std::size_t> k,
                                RandomStream& rng,
                                OutputClamp clamp = OutputClamp::kNone);

inline PrivateEstimate SampleAggregate(const Family& family,
                                       const Dataset& data, double epsilon,
                                       std::optional<std::size_t> k,
                                       RandomStream& rng,
                                       OutputClamp clamp = OutputClamp::kNone) {
  return SampleAggregate(family, data.values(), epsilon, k, rng, clamp);
}

// |zbar(x) - zbar(x')| for the noiseless pipeline. x and x' must have equal
// length and differ in exactly one position, otherwise ArgumentError.
double AverageSensitivity(const Family& family, const Dataset& x,
                          const Dataset& x_prime, std::size_t k);

// Same, with x' given as x with x[index] replaced. replacement may equal
// x[index], in which case the result is 0.
double AverageSensitivity(const Family& family, const Dataset& x,
                          std::size_t index, double replacement,
                          std::size_t k);

// ln of the density ratio Lap(zbar, scale)(y) / Lap(zbar_prime, scale)(y),
// i.e. (|y - zbar'| - |y - zbar|) / scale.
double LogDensityRatio(double zbar, double zbar_prime, double scale, double y);

// exp(LogDensityRatio) at the scale carried by params.
double DensityRatioBound(double zbar, double zbar_prime,
                         const PrivacyParams& params, double y);

}  // namespace privest

#endif  // PRIVEST_PRIVACY_H_
