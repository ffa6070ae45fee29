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
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "privest/errors.h"

namespace privest {
namespace {

std::vector<Family> AllFamilies() {
  return {Family::Bernoulli(), Family::GaussianKnownVariance(1.0),
          Family::ExponentialRate()};
}

double Mean(const Dataset& d) {
  return std::accumulate(d.values().begin(), d.values().end(), 0.0) /
         static_cast<double>(d.size());
}

TEST(ParameterSpaceTest, RejectsEmptyOrInfiniteIntervals) {
  EXPECT_THROW(ParameterSpace(1.0, 1.0), ArgumentError);
  EXPECT_THROW(ParameterSpace(2.0, 1.0), ArgumentError);
  EXPECT_THROW(ParameterSpace(0.0, INFINITY), ArgumentError);
  const ParameterSpace space(0.1, 10.0);
  EXPECT_DOUBLE_EQ(space.diameter(), 9.9);
  EXPECT_EQ(space.Clamp(-3.0), 0.1);
  EXPECT_EQ(space.Clamp(11.0), 10.0);
  EXPECT_EQ(space.Clamp(2.5), 2.5);
}

TEST(FamilyTest, ValidatesSpacesAndNames) {
  EXPECT_THROW(Family::Bernoulli({-0.1, 0.5}), ArgumentError);
  EXPECT_THROW(Family::ExponentialRate({0.0, 1.0}), ArgumentError);
  EXPECT_THROW(Family::GaussianKnownVariance(0.0), ArgumentError);
  EXPECT_THROW(Family::FromName("poisson"), ArgumentError);
  for (const Family& f : AllFamilies()) {
    EXPECT_EQ(Family::FromName(f.name()).kind(), f.kind());
  }
  EXPECT_EQ(Family::ExponentialRate().space().lower(), 0.1);
  EXPECT_EQ(Family::ExponentialRate().space().upper(), 10.0);
}

TEST(FamilyTest, ObservationDomains) {
  const Family b = Family::Bernoulli();
  EXPECT_TRUE(b.InDomain(0.0));
  EXPECT_TRUE(b.InDomain(1.0));
  EXPECT_FALSE(b.InDomain(0.5));
  const Family e = Family::ExponentialRate();
  EXPECT_TRUE(e.InDomain(0.0));
  EXPECT_FALSE(e.InDomain(-1e-9));
  EXPECT_FALSE(Family::GaussianKnownVariance().InDomain(NAN));
}

TEST(DatasetTest, RejectsEmpty) {
  EXPECT_THROW(Dataset({}), ArgumentError);
}

TEST(SampleTest, PointMassAtUpperBoundary) {
  RandomStream rng(9);
  const Dataset d = Sample(Family::Bernoulli({0.0, 1.0}), 1.0, 1000, rng);
  for (double x : d.values()) ASSERT_EQ(x, 1.0);
}

TEST(SampleTest, ErrorsOnBadArguments) {
  RandomStream rng(1);
  EXPECT_THROW(Sample(Family::Bernoulli({0.01, 0.99}), 0.995, 10, rng),
               DomainError);
  EXPECT_THROW(Sample(Family::Bernoulli(), 0.5, 0, rng), ArgumentError);
}

TEST(SampleTest, BernoulliMeanBand) {
  // 4 * sqrt(0.21 / 1e6) = 0.00183.
  RandomStream rng(11);
  EXPECT_NEAR(Mean(Sample(Family::Bernoulli(), 0.3, 1000000, rng)), 0.3,
              0.002);
}

TEST(SampleTest, ExponentialMeanBand) {
  // 4 * 0.5 / sqrt(1e6) = 0.002.
  RandomStream rng(12);
  EXPECT_NEAR(Mean(Sample(Family::ExponentialRate(), 2.0, 1000000, rng)), 0.5,
              0.002);
}

TEST(SampleTest, GaussianMomentsBand) {
  RandomStream rng(13);
  const Dataset d =
      Sample(Family::GaussianKnownVariance(2.0, {-5.0, 5.0}), 1.5, 100001, rng);
  const double mean = Mean(d);
  double ss = 0.0;
  for (double x : d.values()) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 1.5, 4 * 2.0 / std::sqrt(100001.0));
  EXPECT_NEAR(ss / (d.size() - 1), 4.0, 4.0 * 0.02);
}

TEST(SampleTest, DeterministicForSeed) {
  for (const Family& f : AllFamilies()) {
    const double theta = f.space().lower() + 0.37 * f.space().diameter();
    RandomStream a(2024);
    RandomStream b(2024);
    EXPECT_EQ(Sample(f, theta, 513, a), Sample(f, theta, 513, b)) << f.name();
  }
}

TEST(LogLikelihoodTest, KnownValues) {
  EXPECT_NEAR(LogLikelihood(Family::Bernoulli(), 0.5, std::vector{0.0, 1.0}),
              -1.3862943611198906, 1e-12);
  EXPECT_NEAR(LogLikelihood(Family::GaussianKnownVariance(1.0, {-1.0, 1.0}),
                            0.0, std::vector{0.0}),
              -0.91893853320467274, 1e-12);
  EXPECT_NEAR(LogLikelihood(Family::ExponentialRate(), 1.0,
                            std::vector{1.0, 1.0}),
              -2.0, 1e-12);
}

TEST(LogLikelihoodTest, RejectsObservationOutsideDomain) {
  EXPECT_THROW(LogLikelihood(Family::Bernoulli(), 0.5, std::vector{0.0, 2.0}),
               DomainError);
  EXPECT_THROW(
      LogLikelihood(Family::ExponentialRate(), 1.0, std::vector{-1.0}),
      DomainError);
}

TEST(LogLikelihoodTest, AdditiveOverObservations) {
  RandomStream rng(77);
  for (const Family& f : AllFamilies()) {
    for (int rep = 0; rep < 20; ++rep) {
      const double theta = rng.UniformIn(f.space().lower() + 0.01,
                                         f.space().upper() - 0.01);
      const Dataset d = Sample(f, theta, 1 + rng.Index(200), rng);
      double singles = 0.0;
      for (double x : d.values()) {
        singles += LogLikelihood(f, theta, std::vector{x});
      }
      const double total = LogLikelihood(f, theta, d.values());
      EXPECT_NEAR(total, singles, 1e-10 * std::abs(total)) << f.name();
    }
  }
}

TEST(ScoreTest, KnownValues) {
  EXPECT_DOUBLE_EQ(Score(Family::Bernoulli(), 0.5, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(
      Score(Family::GaussianKnownVariance(1.0, {0.0, 1.0}), 0.4, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(Score(Family::ExponentialRate(), 2.0, 0.5), 0.0);
}

TEST(ScoreTest, UndefinedAtBernoulliEndpoints) {
  EXPECT_THROW(Score(Family::Bernoulli(), 0.0, 1.0), DomainError);
  EXPECT_THROW(Score(Family::Bernoulli(), 1.0, 1.0), DomainError);
  EXPECT_THROW(Score(Family::ExponentialRate(), 11.0, 1.0), DomainError);
}

TEST(FisherInformationTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(FisherInformation(Family::Bernoulli(), 0.5), 4.0);
  EXPECT_DOUBLE_EQ(
      FisherInformation(Family::GaussianKnownVariance(1.0, {-9.0, 9.0}), 7.0),
      1.0);
  EXPECT_DOUBLE_EQ(
      FisherInformation(Family::GaussianKnownVariance(2.0), 0.5), 0.25);
  EXPECT_DOUBLE_EQ(FisherInformation(Family::ExponentialRate(), 2.0), 0.25);
  EXPECT_TRUE(std::isinf(FisherInformation(Family::Bernoulli(), 0.0)));
  EXPECT_THROW(FisherInformation(Family::ExponentialRate(), 0.05),
               DomainError);
}

// Var[score] = I_f and d/dtheta E[score] = -I_f, both by Monte Carlo over
// 1e6 draws.
class ScoreInformationTest : public ::testing::TestWithParam<int> {};

TEST_P(ScoreInformationTest, VarianceAndCurvatureMatchInformation) {
  const Family family = AllFamilies()[GetParam()];
  const double lo = family.space().lower();
  const double width = family.space().diameter();
  for (double frac : {0.2, 0.5, 0.8}) {
    const double theta = lo + frac * width;
    RandomStream rng(1000 + GetParam());
    const Dataset d = Sample(family, theta, 1000000, rng);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : d.values()) {
      const double s = Score(family, theta, x);
      sum += s;
      sum_sq += s * s;
    }
    const double n = static_cast<double>(d.size());
    const double var = sum_sq / n - (sum / n) * (sum / n);
    const double info = FisherInformation(family, theta);
    EXPECT_NEAR(var / info, 1.0, 0.02) << family.name() << " theta=" << theta;

    const double h = 1e-4;
    auto mean_score = [&](double t) {
      double total = 0.0;
      for (double x : d.values()) total += Score(family, t, x);
      return total / n;
    };
    const double curvature =
        (mean_score(theta + h) - mean_score(theta - h)) / (2 * h);
    EXPECT_NEAR(-curvature / info, 1.0, 0.02)
        << family.name() << " theta=" << theta;
  }
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, ScoreInformationTest,
                         ::testing::Values(0, 1, 2));

}  // namespace
}  // namespace privest
