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

#include "privest/model.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "privest/errors.h"

namespace privest {
namespace {

std::string FormatTheta(const Family& family, double theta) {
  std::ostringstream os;
  os << "theta=" << theta << " outside parameter space ["
     << family.space().lower() << ", " << family.space().upper() << "] of "
     << family.name();
  return os.str();
}

void RequireInSpace(const Family& family, double theta) {
  if (!family.space().Contains(theta)) {
    throw DomainError(FormatTheta(family, theta));
  }
}

}  // namespace

ParameterSpace::ParameterSpace(double lower, double upper)
    : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    std::ostringstream os;
    os << "parameter space requires finite lower < upper, got [" << lower
       << ", " << upper << "]";
    throw ArgumentError(os.str());
  }
}

double ParameterSpace::Clamp(double theta) const {
  if (theta < lower_) return lower_;
  if (theta > upper_) return upper_;
  return theta;
}

Family Family::Bernoulli(ParameterSpace space) {
  if (space.lower() < 0.0 || space.upper() > 1.0) {
    throw ArgumentError("bernoulli parameter space must lie inside [0, 1]");
  }
  return Family(FamilyKind::kBernoulli, space, 0.0);
}

Family Family::GaussianKnownVariance(double sigma, ParameterSpace space) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("gaussian sigma must be positive and finite");
  }
  return Family(FamilyKind::kGaussianKnownVariance, space, sigma);
}

Family Family::ExponentialRate(ParameterSpace space) {
  if (!(space.lower() > 0.0)) {
    throw ArgumentError("exponential rate space must have lower > 0");
  }
  return Family(FamilyKind::kExponentialRate, space, 0.0);
}

ParameterSpace DefaultSpace(std::string_view name) {
  if (name == "bernoulli") return {0.0, 1.0};
  if (name == "gaussian_fixed_var") return {0.0, 1.0};
  if (name == "exponential_rate") return {0.1, 10.0};
  throw ArgumentError("unknown model '" + std::string(name) + "'");
}

Family Family::FromName(std::string_view name, double sigma) {
  return FromName(name, DefaultSpace(name), sigma);
}

Family Family::FromName(std::string_view name, ParameterSpace space,
                        double sigma) {
  if (name == "bernoulli") return Bernoulli(space);
  if (name == "gaussian_fixed_var") return GaussianKnownVariance(sigma, space);
  if (name == "exponential_rate") return ExponentialRate(space);
  throw ArgumentError("unknown model '" + std::string(name) + "'");
}

std::string_view Family::name() const {
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return "bernoulli";
    case FamilyKind::kGaussianKnownVariance:
      return "gaussian_fixed_var";
    case FamilyKind::kExponentialRate:
      return "exponential_rate";
  }
  return "unknown";
}

bool Family::InDomain(double x) const {
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return x == 0.0 || x == 1.0;
    case FamilyKind::kGaussianKnownVariance:
      return std::isfinite(x);
    case FamilyKind::kExponentialRate:
      return std::isfinite(x) && x >= 0.0;
  }
  return false;
}

Dataset::Dataset(std::vector<double> observations)
    : values_(std::move(observations)) {
  if (values_.empty()) throw ArgumentError("dataset must be non-empty");
}

void ValidateObservations(const Family& family, std::span<const double> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!family.InDomain(data[i])) {
      std::ostringstream os;
      os << "observation " << i << " (" << data[i]
         << ") outside the domain of " << family.name();
      throw DomainError(os.str());
    }
  }
}

void SampleInto(const Family& family, double theta, std::span<double> out,
                RandomStream& rng) {
  RequireInSpace(family, theta);
  const std::size_t n = out.size();
  switch (family.kind()) {
    case FamilyKind::kBernoulli:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = rng.UniformOpen() < theta ? 1.0 : 0.0;
      }
      break;
    case FamilyKind::kGaussianKnownVariance: {
      const double sigma = family.sigma();
      for (std::size_t i = 0; i < n; i += 2) {
        const double radius = std::sqrt(-2.0 * std::log(rng.UniformOpen()));
        const double angle = 2.0 * std::numbers::pi * rng.UniformOpen();
        out[i] = theta + sigma * radius * std::cos(angle);
        if (i + 1 < n) out[i + 1] = theta + sigma * radius * std::sin(angle);
      }
      break;
    }
    case FamilyKind::kExponentialRate:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = -std::log(rng.UniformOpen()) / theta;
      }
      break;
  }
}

Dataset Sample(const Family& family, double theta, std::size_t n,
               RandomStream& rng) {
  if (n == 0) throw ArgumentError("sample size n must be at least 1");
  std::vector<double> values(n);
  SampleInto(family, theta, values, rng);
  return Dataset(std::move(values));
}

double LogLikelihood(const Family& family, double theta,
                     std::span<const double> data) {
  RequireInSpace(family, theta);
  ValidateObservations(family, data);
  double total = 0.0;
  switch (family.kind()) {
    case FamilyKind::kBernoulli: {
      const double log_p = std::log(theta);
      const double log_q = std::log1p(-theta);
      for (double x : data) total += x == 1.0 ? log_p : log_q;
      break;
    }
    case FamilyKind::kGaussianKnownVariance: {
      const double sigma = family.sigma();
      const double log_norm =
          -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sigma);
      for (double x : data) {
        const double z = (x - theta) / sigma;
        total += log_norm - 0.5 * z * z;
      }
      break;
    }
    case FamilyKind::kExponentialRate: {
      const double log_rate = std::log(theta);
      for (double x : data) total += log_rate - theta * x;
      break;
    }
  }
  return total;
}

double Score(const Family& family, double theta, double x) {
  RequireInSpace(family, theta);
  if (!family.InDomain(x)) {
    throw DomainError("score: observation outside the family domain");
  }
  switch (family.kind()) {
    case FamilyKind::kBernoulli:
      if (theta <= 0.0 || theta >= 1.0) {
        throw DomainError("bernoulli score undefined at theta = 0 or 1");
      }
      return x / theta - (1.0 - x) / (1.0 - theta);
    case FamilyKind::kGaussianKnownVariance:
      return (x - theta) / (family.sigma() * family.sigma());
    case FamilyKind::kExponentialRate:
      return 1.0 / theta - x;
  }
  return 0.0;
}

double FisherInformation(const Family& family, double theta) {
  RequireInSpace(family, theta);
  switch (family.kind()) {
    case FamilyKind::kBernoulli:
      return 1.0 / (theta * (1.0 - theta));
    case FamilyKind::kGaussianKnownVariance:
      return 1.0 / (family.sigma() * family.sigma());
    case FamilyKind::kExponentialRate:
      return 1.0 / (theta * theta);
  }
  return 0.0;
}

}  // namespace privest
