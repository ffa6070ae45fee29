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

#ifndef PRIVEST_MODEL_H_
#define PRIVEST_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privest/random.h"

namespace privest {

// Closed, bounded parameter interval [lower, upper] with diameter
// upper - lower.
class ParameterSpace {
 public:
  // Throws ArgumentError unless lower < upper and both are finite.
  ParameterSpace(double lower, double upper);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double diameter() const { return upper_ - lower_; }

  bool Contains(double theta) const {
    return theta >= lower_ && theta <= upper_;
  }
  double Clamp(double theta) const;

 private:
  double lower_;
  double upper_;
};

enum class FamilyKind { kBernoulli, kGaussianKnownVariance, kExponentialRate };

// One-parameter model f(x; theta) together with its parameter space.
// Immutable; safe to share between threads.
class Family {
 public:
  // Space must lie inside [0, 1].
  static Family Bernoulli(ParameterSpace space = {0.0, 1.0});
  // Unknown mean, fixed standard deviation sigma > 0.
  static Family GaussianKnownVariance(double sigma = 1.0,
                                      ParameterSpace space = {0.0, 1.0});
  // Rate parameter; space must lie inside (0, inf).
  static Family ExponentialRate(ParameterSpace space = {0.1, 10.0});

  // Builds a family from its CLI identifier (bernoulli, gaussian_fixed_var,
  // exponential_rate) using the default space for that family.
  static Family FromName(std::string_view name, double sigma = 1.0);
  // Same, with an explicit space.
  static Family FromName(std::string_view name, ParameterSpace space,
                         double sigma = 1.0);

  FamilyKind kind() const { return kind_; }
  const ParameterSpace& space() const { return space_; }
  // Only meaningful for kGaussianKnownVariance.
  double sigma() const { return sigma_; }
  std::string_view name() const;

  // True when x is in the observation domain D of the family.
  bool InDomain(double x) const;

 private:
  Family(FamilyKind kind, ParameterSpace space, double sigma)
      : kind_(kind), space_(space), sigma_(sigma) {}

  FamilyKind kind_;
  ParameterSpace space_;
  double sigma_;
};

// Default parameter space for a family identifier.
ParameterSpace DefaultSpace(std::string_view name);

// Non-empty sequence of observations.
class Dataset {
 public:
  // Throws ArgumentError on an empty sequence.
  explicit Dataset(std::vector<double> observations);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> values_;
};

// Throws DomainError naming the first observation outside the family's
// observation domain.
void ValidateObservations(const Family& family, std::span<const double> data);

// n independent draws from f(.; theta). Bernoulli compares a uniform against
// theta; Gaussian uses Box-Muller on consecutive uniform pairs; exponential
// uses the inverse CDF -ln(u)/theta. Throws DomainError if theta is outside
// the space and ArgumentError if n == 0.
Dataset Sample(const Family& family, double theta, std::size_t n,
               RandomStream& rng);

// Writes draws into out (no allocation). Same stream consumption as Sample.
void SampleInto(const Family& family, double theta, std::span<double> out,
                RandomStream& rng);

// sum_i ln f(x_i; theta).
double LogLikelihood(const Family& family, double theta,
                     std::span<const double> data);

// d/dtheta ln f(x; theta). Throws DomainError where the derivative is
// undefined (Bernoulli at theta = 0 or 1) or theta is outside the space.
double Score(const Family& family, double theta, double x);

// Closed-form I_f(theta): 1/(theta(1-theta)), 1/sigma^2, 1/theta^2.
// Returns +inf at the Bernoulli endpoints.
double FisherInformation(const Family& family, double theta);

}  // namespace privest

#endif  // PRIVEST_MODEL_H_
