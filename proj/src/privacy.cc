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

#include "privest/privacy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "privest/errors.h"
#include "privest/estimator.h"

namespace privest {

PrivacyParams PrivacyParams::Make(double epsilon, std::size_t k,
                                  double diameter) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ArgumentError("epsilon must be positive and finite");
  }
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw ArgumentError("diameter must be positive and finite");
  }
  if (k == 0) throw ArgumentError("k must be at least 1");
  return {epsilon, k, diameter / (static_cast<double>(k) * epsilon)};
}

std::size_t ChooseK(std::size_t n, double epsilon, double diameter) {
  if (n == 0) throw ArgumentError("n must be at least 1");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(diameter > 0.0)) throw ArgumentError("diameter must be positive");
  const double raw = std::ceil(std::pow(static_cast<double>(n), 0.6) *
                               std::pow(diameter / epsilon, 0.4));
  if (!(raw < static_cast<double>(n))) return n;
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::vector<std::size_t> BlockSizes(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "block count k=" << k << " must satisfy 1 <= k <= n=" << n;
    throw ArgumentError(os.str());
  }
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::vector<std::size_t> sizes(k, base);
  for (std::size_t j = 0; j < extra; ++j) ++sizes[j];
  return sizes;
}

std::vector<std::span<const double>> Partition(std::span<const double> data,
                                               std::size_t k) {
  std::vector<std::span<const double>> blocks;
  blocks.reserve(k);
  std::size_t begin = 0;
  for (std::size_t size : BlockSizes(data.size(), k)) {
    blocks.push_back(data.subspan(begin, size));
    begin += size;
  }
  return blocks;
}

double LaplaceInverseCdf(double u, double scale) {
  if (!(scale > 0.0)) throw ArgumentError("laplace scale must be positive");
  const double centered = u - 0.5;
  if (centered == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(centered));
  return centered > 0.0 ? magnitude : -magnitude;
}

double LaplaceDraw(double scale, RandomStream& rng) {
  if (!(scale > 0.0)) throw ArgumentError("laplace scale must be positive");
  return LaplaceInverseCdf(rng.UniformOpen(), scale);
}

std::vector<double> BlockEstimates(const Family& family,
                                   std::span<const double> data,
                                   std::size_t k) {
  const auto blocks = Partition(data, k);
  std::vector<double> estimates;
  estimates.reserve(k);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    try {
      estimates.push_back(BiasCorrectedMle(family, blocks[j]).value);
    } catch (const DegenerateDataError& e) {
      std::ostringstream os;
      os << "block " << j << ": " << e.what();
      throw DegenerateDataError(os.str(), j);
    }
  }
  return estimates;
}

namespace {

double MeanOf(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double BlockAverage(const Family& family, std::span<const double> data,
                    std::size_t k) {
  return MeanOf(BlockEstimates(family, data, k));
}

PrivateEstimate SampleAggregate(const Family& family,
                                std::span<const double> data, double epsilon,
                                std::optional<std::size_t> k,
                                RandomStream& rng, OutputClamp clamp) {
  if (data.empty()) throw ArgumentError("dataset must be non-empty");
  const double diameter = family.space().diameter();
  const std::size_t blocks = k ? *k : ChooseK(data.size(), epsilon, diameter);
  const PrivacyParams params = PrivacyParams::Make(epsilon, blocks, diameter);

  PrivateEstimate result;
  result.block_estimates = BlockEstimates(family, data, blocks);
  result.average = MeanOf(result.block_estimates);
  result.noise = LaplaceDraw(params.lambda_scale, rng);
  result.output = result.average + result.noise;
  if (clamp == OutputClamp::kToSpace) {
    result.output = family.space().Clamp(result.output);
  }
  result.params = params;
  result.block_size = data.size() / blocks;
  return result;
}

double AverageSensitivity(const Family& family, const Dataset& x,
                          const Dataset& x_prime, std::size_t k) {
  if (x.size() != x_prime.size()) {
    throw ArgumentError("neighboring datasets must have equal length");
  }
  std::size_t differing = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != x_prime[i]) ++differing;
  }
  if (differing != 1) {
    std::ostringstream os;
    os << "datasets are not neighbors: they differ in " << differing
       << " positions (exactly 1 required)";
    throw ArgumentError(os.str());
  }
  return std::abs(BlockAverage(family, x.values(), k) -
                  BlockAverage(family, x_prime.values(), k));
}

double AverageSensitivity(const Family& family, const Dataset& x,
                          std::size_t index, double replacement,
                          std::size_t k) {
  if (index >= x.size()) throw ArgumentError("neighbor index out of range");
  std::vector<double> changed = x.vector();
  changed[index] = replacement;
  return std::abs(BlockAverage(family, x.values(), k) -
                  BlockAverage(family, changed, k));
}

double LogDensityRatio(double zbar, double zbar_prime, double scale, double y) {
  if (!(scale > 0.0)) throw ArgumentError("laplace scale must be positive");
  return (std::abs(y - zbar_prime) - std::abs(y - zbar)) / scale;
}

double DensityRatioBound(double zbar, double zbar_prime,
                         const PrivacyParams& params, double y) {
  return std::exp(LogDensityRatio(zbar, zbar_prime, params.lambda_scale, y));
}

}  // namespace privest
