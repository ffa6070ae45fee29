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

#ifndef PRIVEST_ESTIMATOR_H_
#define PRIVEST_ESTIMATOR_H_

#include <span>

#include "privest/model.h"

namespace privest {

// A point estimate restricted to the parameter space. raw_value is the
// statistic before clamping; clamped is set exactly when it fell outside.
struct Estimate {
  double value;
  bool clamped;
  double raw_value;
};

// Closed-form maximum likelihood estimate, clamped to the space:
// sample mean for Bernoulli and Gaussian, 1 / sample mean for exponential.
// Throws ArgumentError on empty data, DomainError on invalid observations
// and DegenerateDataError for exponential data with mean zero.
Estimate Mle(const Family& family, std::span<const double> data);

// Leading coefficient b1 of the MLE bias expansion b1(theta)/n:
// 0 for Bernoulli and Gaussian, theta for the exponential rate.
double BiasCoefficient(const Family& family, double theta);

// MLE minus b1(MLE)/n, then clamped to the space. The correction acts on
// the unclamped MLE.
Estimate BiasCorrectedMle(const Family& family, std::span<const double> data);

}  // namespace privest

#endif  // PRIVEST_ESTIMATOR_H_
