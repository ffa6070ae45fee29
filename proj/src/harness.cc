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

#include "privest/harness.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <string>

#include "privest/errors.h"
#include "privest/estimator.h"

namespace privest {
namespace {

// Stream purposes mixed into DeriveSeed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kAuditStream = 3;

constexpr int kMaxResamples = 1000;

struct TrialOutcome {
  double error = 0.0;
  double noise = 0.0;
  std::size_t resamples = 0;
};

TrialOutcome RunOneTrial(const ExperimentConfig& config, std::size_t n,
                         std::size_t k, std::uint64_t trial,
                         std::vector<double>& buffer) {
  TrialOutcome outcome;
  for (std::uint64_t attempt = 0;; ++attempt) {
    RandomStream data_rng(
        DeriveSeed(config.seed, {n, trial, kDataStream, attempt}));
    SampleInto(config.family, config.theta_true, buffer, data_rng);
    try {
      switch (config.estimator) {
        case EstimatorKind::kMle:
          outcome.error = Mle(config.family, buffer).value - config.theta_true;
          break;
        case EstimatorKind::kBiasCorrected:
          outcome.error =
              BiasCorrectedMle(config.family, buffer).value - config.theta_true;
          break;
        case EstimatorKind::kPrivate: {
          RandomStream noise_rng(DeriveSeed(config.seed, {n, trial, kNoiseStream}));
          const PrivateEstimate est = SampleAggregate(
              config.family, buffer, config.epsilon, k, noise_rng);
          outcome.noise = est.noise;
          outcome.error = (config.suppress_noise ? est.average : est.output) -
                          config.theta_true;
          break;
        }
      }
      return outcome;
    } catch (const DegenerateDataError&) {
      if (++outcome.resamples > kMaxResamples) throw;
    }
  }
}

// Records the exception of the lowest-indexed failing trial so the error
// reported does not depend on scheduling.
class FirstError {
 public:
  void Record(std::uint64_t index, std::exception_ptr error) {
#pragma omp critical(privest_first_error)
    {
      if (!error_ || index < index_) {
        index_ = index;
        error_ = error;
      }
    }
  }
  void RethrowIfAny() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::uint64_t index_ = std::numeric_limits<std::uint64_t>::max();
  std::exception_ptr error_;
};

TrialSamples AllocateSamples(const ExperimentConfig& config, std::size_t n) {
  config.Validate();
  TrialSamples samples;
  samples.k = ResolveK(config, n);
  samples.errors.resize(config.trials);
  samples.noises.resize(config.trials);
  return samples;
}

struct BlockMoments {
  double bias = 0.0;
  double variance = 0.0;
};

BlockMoments MomentsForBlock(const ExperimentConfig& config, std::size_t size,
                             bool corrected) {
  const double theta = config.theta_true;
  const double t = static_cast<double>(size);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (config.family.kind()) {
    case FamilyKind::kBernoulli:
      return {0.0, theta * (1.0 - theta) / t};
    case FamilyKind::kGaussianKnownVariance: {
      const double sigma = config.family.sigma();
      return {0.0, sigma * sigma / t};
    }
    case FamilyKind::kExponentialRate: {
      if (size < 3) return {nan, nan};
      const double l2 = theta * theta;
      if (corrected) return {0.0, l2 / (t - 2.0)};
      return {theta / (t - 1.0),
              t * t * l2 / ((t - 1.0) * (t - 1.0) * (t - 2.0))};
    }
  }
  return {nan, nan};
}

}  // namespace

std::string_view ToString(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kMle:
      return "mle";
    case EstimatorKind::kBiasCorrected:
      return "bias_corrected";
    case EstimatorKind::kPrivate:
      return "private";
  }
  return "unknown";
}

EstimatorKind ParseEstimatorKind(std::string_view name) {
  if (name == "mle") return EstimatorKind::kMle;
  if (name == "bias_corrected") return EstimatorKind::kBiasCorrected;
  if (name == "private") return EstimatorKind::kPrivate;
  throw ArgumentError("unknown estimator '" + std::string(name) + "'");
}

void ExperimentConfig::Validate() const {
  if (!family.space().Contains(theta_true)) {
    throw DomainError("theta_true outside the parameter space");
  }
  if (trials < 1) throw ArgumentError("trials must be at least 1");
  if (n_grid.empty()) throw ArgumentError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ArgumentError("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw ArgumentError("n_grid must be strictly increasing");
    }
  }
  if (estimator == EstimatorKind::kPrivate) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw ArgumentError("epsilon must be positive and finite");
    }
    if (k && *k < 1) throw ArgumentError("k must be at least 1");
  }
}

std::size_t ResolveK(const ExperimentConfig& config, std::size_t n) {
  if (config.estimator != EstimatorKind::kPrivate) return 1;
  const std::size_t k =
      config.k ? *config.k
               : ChooseK(n, config.epsilon, config.family.space().diameter());
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "k=" << k << " must satisfy 1 <= k <= n=" << n;
    throw ArgumentError(os.str());
  }
  return k;
}

TrialSamples CollectTrials(const ExperimentConfig& config, std::size_t n,
                           int workers) {
  TrialSamples samples = AllocateSamples(config, n);
  std::vector<std::size_t> resamples(config.trials, 0);
  const auto trials = static_cast<std::int64_t>(config.trials);
  FirstError first_error;

#pragma omp parallel num_threads(std::max(1, workers))
  {
    std::vector<double> buffer(n);
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < trials; ++i) {
      try {
        const TrialOutcome outcome =
            RunOneTrial(config, n, samples.k, static_cast<std::uint64_t>(i),
                        buffer);
        samples.errors[i] = outcome.error;
        samples.noises[i] = outcome.noise;
        resamples[i] = outcome.resamples;
      } catch (...) {
        first_error.Record(static_cast<std::uint64_t>(i),
                           std::current_exception());
      }
    }
  }
  first_error.RethrowIfAny();

  for (std::size_t r : resamples) samples.resamples += r;
  return samples;
}

TrialSamples CollectTrialsSerial(const ExperimentConfig& config,
                                 std::size_t n) {
  TrialSamples samples = AllocateSamples(config, n);
  std::vector<double> buffer(n);
  for (std::size_t i = 0; i < config.trials; ++i) {
    const TrialOutcome outcome = RunOneTrial(config, n, samples.k, i, buffer);
    samples.errors[i] = outcome.error;
    samples.noises[i] = outcome.noise;
    samples.resamples += outcome.resamples;
  }
  return samples;
}

TrialStats Summarize(const ExperimentConfig& config, std::size_t n,
                     const TrialSamples& samples) {
  const auto count = static_cast<double>(samples.errors.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : samples.errors) {
    sum += e;
    sum_sq += e * e;
  }
  TrialStats stats;
  stats.n = n;
  stats.k = samples.k;
  stats.resamples = samples.resamples;
  stats.bias = sum / count;
  stats.mse = sum_sq / count;

  double centered = 0.0;
  double sq_dev = 0.0;
  for (double e : samples.errors) {
    centered += (e - stats.bias) * (e - stats.bias);
    const double d = e * e - stats.mse;
    sq_dev += d * d;
  }
  stats.variance = centered / count;
  stats.standard_error_of_mse =
      samples.errors.size() > 1
          ? std::sqrt(sq_dev / (count - 1.0)) / std::sqrt(count)
          : 0.0;
  stats.relative_efficiency =
      static_cast<double>(n) *
      FisherInformation(config.family, config.theta_true) * stats.mse;
  stats.predicted_mse = PredictedMse(config, n);
  return stats;
}

std::vector<TrialStats> RunTrials(const ExperimentConfig& config,
                                  int workers) {
  config.Validate();
  std::vector<TrialStats> rows;
  rows.reserve(config.n_grid.size());
  for (std::size_t n : config.n_grid) {
    rows.push_back(Summarize(config, n, CollectTrials(config, n, workers)));
  }
  return rows;
}

std::vector<TrialStats> RunTrialsSerial(const ExperimentConfig& config) {
  config.Validate();
  std::vector<TrialStats> rows;
  rows.reserve(config.n_grid.size());
  for (std::size_t n : config.n_grid) {
    rows.push_back(Summarize(config, n, CollectTrialsSerial(config, n)));
  }
  return rows;
}

double PredictedMse(const ExperimentConfig& config, std::size_t n) {
  switch (config.estimator) {
    case EstimatorKind::kMle:
    case EstimatorKind::kBiasCorrected: {
      const BlockMoments m = MomentsForBlock(
          config, n, config.estimator == EstimatorKind::kBiasCorrected);
      return m.variance + m.bias * m.bias;
    }
    case EstimatorKind::kPrivate: {
      const std::size_t k = ResolveK(config, n);
      double bias = 0.0;
      double variance = 0.0;
      for (std::size_t size : BlockSizes(n, k)) {
        const BlockMoments m = MomentsForBlock(config, size, true);
        bias += m.bias;
        variance += m.variance;
      }
      const auto kd = static_cast<double>(k);
      bias /= kd;
      variance /= kd * kd;
      double mse = variance + bias * bias;
      if (!config.suppress_noise) {
        const double scale =
            PrivacyParams::Make(config.epsilon, k,
                                config.family.space().diameter())
                .lambda_scale;
        mse += 2.0 * scale * scale;
      }
      return mse;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::pair<std::size_t, double>> EfficiencyCurve(
    const ExperimentConfig& config, int workers) {
  if (config.estimator != EstimatorKind::kPrivate) {
    throw ArgumentError("efficiency curve requires the private estimator");
  }
  if (config.n_grid.size() < 3) {
    throw ArgumentError("efficiency curve requires at least 3 sample sizes");
  }
  std::vector<std::pair<std::size_t, double>> curve;
  for (const TrialStats& row : RunTrials(config, workers)) {
    curve.emplace_back(row.n, row.relative_efficiency);
  }
  return curve;
}

std::pair<double, double> ObservationExtremes(const Family& family) {
  switch (family.kind()) {
    case FamilyKind::kBernoulli:
      return {0.0, 1.0};
    case FamilyKind::kGaussianKnownVariance: {
      const double reach = 1e6 * family.sigma();
      return {family.space().lower() - reach, family.space().upper() + reach};
    }
    case FamilyKind::kExponentialRate:
      return {1e-12, 1e12};
  }
  return {0.0, 0.0};
}

namespace {

struct PairResult {
  double sensitivity_ratio = 0.0;
  double abs_log_ratio = 0.0;
  double score = 0.0;  // max(sensitivity_ratio, abs_log_ratio / epsilon)
  std::size_t index = 0;
  double value_x = 0.0;
  double value_x_prime = 0.0;
  double zbar = 0.0;
  double zbar_prime = 0.0;
};

void SamplePairBase(const Family& family, std::uint64_t pair_seed,
                    std::vector<double>& data, std::size_t& index) {
  RandomStream rng(pair_seed);
  const double theta =
      rng.UniformIn(family.space().lower(), family.space().upper());
  SampleInto(family, family.space().Clamp(theta), data, rng);
  index = static_cast<std::size_t>(rng.Index(data.size()));
}

double WorstLogRatio(double zbar, double zbar_prime, double scale,
                     std::size_t grid_size) {
  const double lo = std::min(zbar, zbar_prime) - 10.0 * scale;
  const double hi = std::max(zbar, zbar_prime) + 10.0 * scale;
  double worst = 0.0;
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double y = lo + (hi - lo) * static_cast<double>(g) /
                              static_cast<double>(grid_size - 1);
    worst = std::max(worst,
                     std::abs(LogDensityRatio(zbar, zbar_prime, scale, y)));
  }
  return worst;
}

}  // namespace

DpAuditReport DpAudit(const Family& family, std::size_t n, double epsilon,
                      std::size_t k, std::size_t pairs,
                      std::size_t y_grid_size, RandomStream& rng,
                      const AuditOptions& options) {
  if (pairs < 1) throw ArgumentError("audit requires at least one pair");
  if (y_grid_size < 2) throw ArgumentError("y grid needs at least 2 points");
  if (n < 1 || k < 1 || k > n) {
    throw ArgumentError("audit requires 1 <= k <= n");
  }
  const double diameter = family.space().diameter();
  const PrivacyParams params = PrivacyParams::Make(epsilon, k, diameter);
  double scale = params.lambda_scale;
  if (options.noise_scale_override) {
    if (!(*options.noise_scale_override > 0.0)) {
      throw ArgumentError("noise scale override must be positive");
    }
    scale = *options.noise_scale_override;
  }
  const auto [low, high] = ObservationExtremes(family);
  const std::uint64_t base_seed = rng.NextU64();
  const auto kd = static_cast<double>(k);

  // Three comparisons per random dataset.
  std::vector<PairResult> results(pairs * 3);
  const auto pair_count = static_cast<std::int64_t>(pairs);
  FirstError first_error;

#pragma omp parallel num_threads(std::max(1, options.workers))
  {
    std::vector<double> data(n);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t p = 0; p < pair_count; ++p) {
      try {
        std::size_t index = 0;
        SamplePairBase(family, DeriveSeed(base_seed, {kAuditStream,
                                          static_cast<std::uint64_t>(p)}),
                       data, index);
        const double original = data[index];
        const double values[3] = {original, low, high};
        double zbars[3];
        for (int v = 0; v < 3; ++v) {
          data[index] = values[v];
          zbars[v] = BlockAverage(family, data, k);
        }
        data[index] = original;

        constexpr int kComparisons[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int c = 0; c < 3; ++c) {
          const int a = kComparisons[c][0];
          const int b = kComparisons[c][1];
          PairResult& r = results[static_cast<std::size_t>(p) * 3 + c];
          r.index = index;
          r.value_x = values[a];
          r.value_x_prime = values[b];
          r.zbar = zbars[a];
          r.zbar_prime = zbars[b];
          r.sensitivity_ratio = std::abs(zbars[a] - zbars[b]) * kd / diameter;
          r.abs_log_ratio = WorstLogRatio(zbars[a], zbars[b], scale, y_grid_size);
          r.score = std::max(r.sensitivity_ratio, r.abs_log_ratio / epsilon);
        }
      } catch (...) {
        first_error.Record(static_cast<std::uint64_t>(p),
                           std::current_exception());
      }
    }
  }
  first_error.RethrowIfAny();

  DpAuditReport report;
  report.pairs_tested = results.size();
  report.epsilon_target = epsilon;
  report.n = n;
  report.k = k;
  report.lambda_scale = scale;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    report.max_sensitivity_ratio =
        std::max(report.max_sensitivity_ratio, results[i].sensitivity_ratio);
    report.max_abs_log_ratio =
        std::max(report.max_abs_log_ratio, results[i].abs_log_ratio);
    if (results[i].score > results[worst].score) worst = i;
  }
  report.pass = report.max_sensitivity_ratio <= 1.0 + kAuditSlack &&
                report.max_abs_log_ratio <= epsilon + kAuditSlack;

  const PairResult& w = results[worst];
  AuditPair pair;
  pair.pair_index = worst / 3;
  pair.dataset.resize(n);
  std::size_t index = 0;
  SamplePairBase(family, DeriveSeed(base_seed, {kAuditStream, pair.pair_index}),
                 pair.dataset, index);
  pair.dataset[index] = w.value_x;
  pair.index = index;
  pair.value_x = w.value_x;
  pair.value_x_prime = w.value_x_prime;
  pair.zbar = w.zbar;
  pair.zbar_prime = w.zbar_prime;
  pair.sensitivity_ratio = w.sensitivity_ratio;
  pair.abs_log_ratio = w.abs_log_ratio;
  report.worst = std::move(pair);
  return report;
}

PrivateEstimate EstimateWithSeed(const Family& family, const Dataset& data,
                                 double epsilon, std::optional<std::size_t> k,
                                 std::uint64_t seed, OutputClamp clamp) {
  RandomStream noise_rng(DeriveSeed(seed, {kNoiseStream}));
  return SampleAggregate(family, data, epsilon, k, noise_rng, clamp);
}

SyntheticEstimate EstimateSynthetic(const Family& family, double theta,
                                    std::size_t n, double epsilon,
                                    std::optional<std::size_t> k,
                                    std::uint64_t seed, OutputClamp clamp) {
  RandomStream data_rng(DeriveSeed(seed, {kDataStream}));
  Dataset data = Sample(family, theta, n, data_rng);
  PrivateEstimate estimate =
      EstimateWithSeed(family, data, epsilon, k, seed, clamp);
  return {std::move(data), std::move(estimate)};
}

}  // namespace privest
