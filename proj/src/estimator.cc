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

#include "privest/estimator.h"

#include "privest/errors.h"

namespace privest {
namespace {

double Mean(std::span<const double> data) {
  double sum = 0.0;
  for (double x : data) sum += x;
  return sum / static_cast<double>(data.size());
}

double RawMle(const Family& family, std::span<const double> data) {
  if (data.empty()) throw ArgumentError("estimator requires non-empty data");
  ValidateObservations(family, data);
  const double mean = Mean(data);
  switch (family.kind()) {
    case FamilyKind::kBernoulli:
    case FamilyKind::kGaussianKnownVariance:
      return mean;
    case FamilyKind::kExponentialRate:
      if (mean == 0.0) {
        throw DegenerateDataError(
            "exponential rate MLE undefined for sample mean 0");
      }
      return 1.0 / mean;
  }
  return mean;
}

// b1 without the range check; the correction is evaluated at the raw MLE,
// which may lie outside the space.
double RawBiasCoefficient(const Family& family, double theta) {
  return family.kind() == FamilyKind::kExponentialRate ? theta : 0.0;
}

Estimate ClampTo(const ParameterSpace& space, double raw) {
  const double value = space.Clamp(raw);
  return {value, value != raw, raw};
}

}  // namespace

Estimate Mle(const Family& family, std::span<const double> data) {
  return ClampTo(family.space(), RawMle(family, data));
}

double BiasCoefficient(const Family& family, double theta) {
  if (!family.space().Contains(theta)) {
    throw DomainError("bias coefficient: theta outside parameter space");
  }
  return RawBiasCoefficient(family, theta);
}

Estimate BiasCorrectedMle(const Family& family, std::span<const double> data) {
  const double mle = RawMle(family, data);
  const double n = static_cast<double>(data.size());
  return ClampTo(family.space(), mle - RawBiasCoefficient(family, mle) / n);
}

}  // namespace privest
