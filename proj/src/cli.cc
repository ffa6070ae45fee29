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

#include "privest/cli.h"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "privest/errors.h"

namespace privest::cli {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct CommonFlags {
  std::string model = "bernoulli";
  std::optional<double> theta_min;
  std::optional<double> theta_max;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out;
};

void AddCommonFlags(CLI::App& app, CommonFlags& flags) {
  app.add_option("--model", flags.model, "Parametric family")
      ->check(CLI::IsMember(
          {"bernoulli", "gaussian_fixed_var", "exponential_rate"}));
  app.add_option("--theta-min", flags.theta_min,
                 "Lower end of the parameter space");
  app.add_option("--theta-max", flags.theta_max,
                 "Upper end of the parameter space");
  app.add_option("--sigma", flags.sigma,
                 "Known standard deviation (gaussian_fixed_var)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--workers", flags.workers,
                 "OpenMP worker threads (0 = all); never changes results")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", flags.out, "Report file path");
}

Family BuildFamily(const CommonFlags& flags) {
  const ParameterSpace defaults = DefaultSpace(flags.model);
  try {
    return Family::FromName(
        flags.model,
        ParameterSpace(flags.theta_min.value_or(defaults.lower()),
                       flags.theta_max.value_or(defaults.upper())),
        flags.sigma);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

int ResolveWorkers(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

std::optional<std::size_t> ParseK(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size() || k == 0) {
    throw UsageError("--k must be 'auto' or a positive integer, got '" + text +
                     "'");
  }
  return k;
}

void RequirePositiveEpsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw UsageError("--eps must be a positive finite number");
  }
}

void RequireThetaInSpace(const Family& family, double theta) {
  if (!family.space().Contains(theta)) {
    std::ostringstream os;
    os << "--theta " << theta << " is outside the parameter space ["
       << family.space().lower() << ", " << family.space().upper() << "]";
    throw UsageError(os.str());
  }
}

std::string BuildIdentifier() {
#ifdef PRIVEST_VERSION
  std::string id = "privest " PRIVEST_VERSION;
#else
  std::string id = "privest";
#endif
#ifdef __VERSION__
  id += " (" __VERSION__ ")";
#endif
  return id;
}

json CommonJson(const CommonFlags& flags, const Family& family) {
  json j;
  j["model"] = flags.model;
  j["theta_min"] = family.space().lower();
  j["theta_max"] = family.space().upper();
  if (family.kind() == FamilyKind::kGaussianKnownVariance) {
    j["sigma"] = family.sigma();
  }
  j["seed"] = flags.seed;
  return j;
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << contents;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

// Writes <out>.manifest.json listing every report emitted by the run.
void WriteManifest(const std::string& out, json config,
                   std::chrono::steady_clock::time_point start) {
  const std::string manifest_path = out + ".manifest.json";
  json manifest;
  manifest["config"] = std::move(config);
  manifest["build_identifier"] = BuildIdentifier();
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  manifest["output_paths"] = {out, manifest_path};
  WriteFile(manifest_path, manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- estimate

struct EstimateFlags {
  CommonFlags common;
  std::string data_file;
  std::optional<double> theta;
  std::optional<std::size_t> n;
  double eps = 0.0;
  std::string k = "auto";
  bool release_zbar = false;
  bool clamp_output = false;
};

int RunEstimate(const EstimateFlags& flags, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  RequirePositiveEpsilon(flags.eps);
  const Family family = BuildFamily(flags.common);
  const std::optional<std::size_t> k = ParseK(flags.k);
  const OutputClamp clamp =
      flags.clamp_output ? OutputClamp::kToSpace : OutputClamp::kNone;

  PrivateEstimate estimate;
  std::size_t n = 0;
  if (!flags.data_file.empty()) {
    if (flags.theta || flags.n) {
      throw UsageError("--data-file cannot be combined with --theta/--n");
    }
    const Dataset data = ReadDataFile(flags.data_file);
    ValidateObservations(family, data.values());
    n = data.size();
    if (k && *k > n) throw UsageError("--k exceeds the number of observations");
    estimate = EstimateWithSeed(family, data, flags.eps, k, flags.common.seed,
                                clamp);
  } else {
    if (!flags.theta || !flags.n) {
      throw UsageError("give either --data-file or both --theta and --n");
    }
    RequireThetaInSpace(family, *flags.theta);
    n = *flags.n;
    if (n == 0) throw UsageError("--n must be positive");
    if (k && *k > n) throw UsageError("--k exceeds --n");
    estimate = EstimateSynthetic(family, *flags.theta, n, flags.eps, k,
                                 flags.common.seed, clamp)
                   .estimate;
  }

  std::ostringstream record;
  record << "model,n,epsilon,k,block_size,seed,output";
  if (flags.release_zbar) record << ",average";
  record << "\n"
         << family.name() << ',' << n << ',' << FormatReal(flags.eps) << ','
         << estimate.params.k << ',' << estimate.block_size << ','
         << flags.common.seed << ',' << FormatReal(estimate.output);
  if (flags.release_zbar) record << ',' << FormatReal(estimate.average);
  record << "\n";
  out << record.str();

  if (!flags.common.out.empty()) {
    WriteFile(flags.common.out, record.str());
    json config = CommonJson(flags.common, family);
    config["command"] = "estimate";
    config["eps"] = flags.eps;
    config["k"] = flags.k;
    if (!flags.data_file.empty()) {
      config["data_file"] = flags.data_file;
    } else {
      config["theta"] = *flags.theta;
      config["n"] = n;
    }
    config["release_zbar"] = flags.release_zbar;
    WriteManifest(flags.common.out, std::move(config), start);
  }
  return kExitOk;
}

// -------------------------------------------------------------- experiment

struct ExperimentFlags {
  CommonFlags common;
  std::optional<double> theta;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_grid;
  double eps = 1.0;
  std::string k = "auto";
  std::size_t trials = 1000;
  std::string estimator = "private";
};

void PrintSummary(const ExperimentConfig& config,
                  const std::vector<TrialStats>& rows, std::ostream& out) {
  out << config.family.name() << " theta=" << config.theta_true
      << " estimator=" << ToString(config.estimator);
  if (config.estimator == EstimatorKind::kPrivate) {
    out << " eps=" << config.epsilon;
  }
  out << " trials=" << config.trials << " seed=" << config.seed << "\n";
  out << std::setw(10) << "n" << std::setw(8) << "k" << std::setw(14) << "mse"
      << std::setw(14) << "predicted" << std::setw(12) << "n*I*mse"
      << std::setw(11) << "resamples" << "\n";
  for (const TrialStats& row : rows) {
    out << std::setw(10) << row.n << std::setw(8) << row.k << std::setw(14)
        << std::setprecision(5) << row.mse << std::setw(14)
        << row.predicted_mse << std::setw(12) << row.relative_efficiency
        << std::setw(11) << row.resamples << "\n";
  }
}

int RunExperiment(const ExperimentFlags& flags, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.family = BuildFamily(flags.common);
  if (!flags.theta) throw UsageError("--theta is required");
  RequireThetaInSpace(config.family, *flags.theta);
  config.theta_true = *flags.theta;
  if (!flags.n_grid.empty() && flags.n) {
    throw UsageError("give either --n or --n-grid, not both");
  }
  if (!flags.n_grid.empty()) {
    config.n_grid = flags.n_grid;
  } else if (flags.n) {
    config.n_grid = {*flags.n};
  } else {
    throw UsageError("--n or --n-grid is required");
  }
  try {
    config.estimator = ParseEstimatorKind(flags.estimator);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (config.estimator == EstimatorKind::kPrivate) {
    RequirePositiveEpsilon(flags.eps);
  }
  config.epsilon = flags.eps;
  config.k = ParseK(flags.k);
  config.trials = flags.trials;
  config.seed = flags.common.seed;
  try {
    config.Validate();
    for (std::size_t n : config.n_grid) ResolveK(config, n);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  const std::vector<TrialStats> rows =
      RunTrials(config, ResolveWorkers(flags.common.workers));
  const std::string csv = ExperimentCsv(config, rows);
  if (flags.common.out.empty()) {
    out << csv;
    return kExitOk;
  }
  WriteFile(flags.common.out, csv);
  PrintSummary(config, rows, out);

  json manifest_config = CommonJson(flags.common, config.family);
  manifest_config["command"] = "experiment";
  manifest_config["theta"] = config.theta_true;
  manifest_config["n_grid"] = config.n_grid;
  manifest_config["eps"] = config.epsilon;
  manifest_config["k"] = flags.k;
  manifest_config["trials"] = config.trials;
  manifest_config["estimator"] = flags.estimator;
  manifest_config["workers"] = ResolveWorkers(flags.common.workers);
  WriteManifest(flags.common.out, std::move(manifest_config), start);
  return kExitOk;
}

// ------------------------------------------------------------------- audit

struct AuditFlags {
  CommonFlags common;
  std::optional<std::size_t> n;
  double eps = 1.0;
  std::string k = "auto";
  std::size_t pairs = 1000;
  std::size_t y_grid = 1000;
  std::optional<double> noise_scale_override;
};

json AuditJson(const DpAuditReport& report) {
  json j;
  j["pairs_tested"] = report.pairs_tested;
  j["max_sensitivity_ratio"] = report.max_sensitivity_ratio;
  j["max_abs_log_ratio"] = report.max_abs_log_ratio;
  j["epsilon_target"] = report.epsilon_target;
  j["pass"] = report.pass;
  j["n"] = report.n;
  j["k"] = report.k;
  j["lambda_scale"] = report.lambda_scale;
  if (report.worst) {
    const AuditPair& w = *report.worst;
    j["worst_pair"] = {
        {"pair_index", w.pair_index}, {"index", w.index},
        {"value_x", w.value_x},       {"value_x_prime", w.value_x_prime},
        {"zbar", w.zbar},             {"zbar_prime", w.zbar_prime},
        {"sensitivity_ratio", w.sensitivity_ratio},
        {"abs_log_ratio", w.abs_log_ratio},
        {"dataset", w.dataset}};
  }
  return j;
}

int RunAudit(const AuditFlags& flags, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RequirePositiveEpsilon(flags.eps);
  const Family family = BuildFamily(flags.common);
  if (!flags.n || *flags.n == 0) throw UsageError("--n must be positive");
  const std::size_t n = *flags.n;
  const std::optional<std::size_t> k_flag = ParseK(flags.k);
  const std::size_t k =
      k_flag ? *k_flag : ChooseK(n, flags.eps, family.space().diameter());
  if (k > n) throw UsageError("--k exceeds --n");
  if (flags.pairs == 0) throw UsageError("--pairs must be positive");
  if (flags.y_grid < 2) throw UsageError("--y-grid must be at least 2");
  if (flags.noise_scale_override && !(*flags.noise_scale_override > 0.0)) {
    throw UsageError("--noise-scale-override must be positive");
  }

  AuditOptions options;
  options.workers = ResolveWorkers(flags.common.workers);
  options.noise_scale_override = flags.noise_scale_override;
  RandomStream rng(flags.common.seed);
  const DpAuditReport report = DpAudit(family, n, flags.eps, k, flags.pairs,
                                       flags.y_grid, rng, options);

  json report_json = AuditJson(report);
  out << "audit " << family.name() << " n=" << n << " k=" << k
      << " eps=" << flags.eps << " pairs_tested=" << report.pairs_tested
      << " max_sensitivity_ratio=" << FormatReal(report.max_sensitivity_ratio)
      << " max_abs_log_ratio=" << FormatReal(report.max_abs_log_ratio)
      << " pass=" << (report.pass ? "true" : "false") << "\n";
  if (!flags.common.out.empty()) {
    WriteFile(flags.common.out, report_json.dump(2) + "\n");
    json config = CommonJson(flags.common, family);
    config["command"] = "audit";
    config["n"] = n;
    config["eps"] = flags.eps;
    config["k"] = k;
    config["pairs"] = flags.pairs;
    config["y_grid"] = flags.y_grid;
    if (flags.noise_scale_override) {
      config["noise_scale_override"] = *flags.noise_scale_override;
    }
    WriteManifest(flags.common.out, std::move(config), start);
  }
  if (!report.pass) {
    err << "privacy audit FAILED; violating pair:\n"
        << report_json["worst_pair"].dump() << "\n";
    return kExitAuditFailure;
  }
  return kExitOk;
}

// Injects config-file values for keys the command line does not set.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty() || rest.empty()) return rest;

  std::vector<std::string> expanded = {rest[0]};
  for (const auto& [key, value] : ReadConfigFile(config_path)) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(rest.begin() + 1, rest.end(),
                                   [&](const std::string& a) {
                                     return a == flag ||
                                            a.rfind(flag + "=", 0) == 0;
                                   });
    if (!given) expanded.push_back(flag + "=" + value);
  }
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

}  // namespace

std::string FormatReal(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

Dataset ReadDataFile(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open data file '" + path + "'");
  std::vector<double> values;
  std::string line;
  for (std::size_t line_no = 1; std::getline(file, line); ++line_no) {
    const std::string_view text = Trim(line);
    if (text.empty()) continue;
    double x = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": not a decimal number: '" + std::string(text) + "'");
    }
    values.push_back(x);
  }
  if (values.empty()) throw ParseError(path + ": no observations");
  return Dataset(std::move(values));
}

std::map<std::string, std::string> ReadConfigFile(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> entries;
  std::string line;
  for (std::size_t line_no = 1; std::getline(file, line); ++line_no) {
    std::string_view text = line;
    text = Trim(text.substr(0, text.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    std::string_view key = Trim(text.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.remove_prefix(2);
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    entries[std::string(key)] = std::string(Trim(text.substr(eq + 1)));
  }
  return entries;
}

std::string ExperimentCsv(const ExperimentConfig& config,
                          const std::vector<TrialStats>& rows) {
  const bool is_private = config.estimator == EstimatorKind::kPrivate;
  std::ostringstream csv;
  csv << kExperimentCsvHeader << "\n";
  for (const TrialStats& row : rows) {
    csv << row.n << ',' << ToString(config.estimator) << ','
        << (is_private ? FormatReal(config.epsilon) : "") << ',' << row.k
        << ',' << config.trials << ',' << FormatReal(row.mse) << ','
        << FormatReal(row.standard_error_of_mse) << ','
        << FormatReal(row.bias) << ',' << FormatReal(row.variance) << ','
        << FormatReal(row.relative_efficiency) << ','
        << FormatReal(row.predicted_mse) << ',' << config.seed << "\n";
  }
  return csv.str();
}

int Run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Differentially private sample-and-aggregate estimation",
               "privest");
  app.require_subcommand(1);

  EstimateFlags est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Release one private estimate from a data file or "
                  "synthetic sample");
  AddCommonFlags(*estimate, est.common);
  estimate->add_option("--data-file", est.data_file,
                       "One observation per line");
  estimate->add_option("--theta", est.theta, "True parameter (synthetic)");
  estimate->add_option("--n", est.n, "Sample size (synthetic)");
  estimate->add_option("--eps", est.eps, "Privacy budget epsilon")->required();
  estimate->add_option("--k", est.k, "Block count or 'auto'");
  estimate->add_flag("--release-zbar", est.release_zbar,
                     "Also emit the unperturbed block average");
  estimate->add_flag("--clamp-output", est.clamp_output,
                     "Clamp the released value to the parameter space");

  ExperimentFlags exp;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Monte Carlo MSE / efficiency experiment");
  AddCommonFlags(*experiment, exp.common);
  experiment->add_option("--theta", exp.theta, "True parameter");
  experiment->add_option("--n", exp.n, "Single sample size");
  experiment->add_option("--n-grid", exp.n_grid,
                         "Comma-separated increasing sample sizes")
      ->delimiter(',');
  experiment->add_option("--eps", exp.eps, "Privacy budget epsilon");
  experiment->add_option("--k", exp.k, "Block count or 'auto'");
  experiment->add_option("--trials", exp.trials, "Replications per n")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--estimator", exp.estimator,
                         "mle | bias_corrected | private")
      ->check(CLI::IsMember({"mle", "bias_corrected", "private"}));

  AuditFlags aud;
  CLI::App* audit = app.add_subcommand(
      "audit", "Randomized neighbor-pair privacy audit");
  AddCommonFlags(*audit, aud.common);
  audit->add_option("--n", aud.n, "Dataset size")->required();
  audit->add_option("--eps", aud.eps, "Privacy budget epsilon");
  audit->add_option("--k", aud.k, "Block count or 'auto'");
  audit->add_option("--pairs", aud.pairs, "Random datasets to perturb");
  audit->add_option("--y-grid", aud.y_grid, "Points in the density grid");
  audit->add_option("--noise-scale-override", aud.noise_scale_override,
                    "Test hook: Laplace scale used in the ratio check");

  try {
    std::vector<std::string> args = ExpandConfig(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n"
        << "run 'privest <command> --help' for usage\n";
    return kExitUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitDataError;
  }

  try {
    if (estimate->parsed()) return RunEstimate(est, out);
    if (experiment->parsed()) return RunExperiment(exp, out);
    return RunAudit(aud, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const DegenerateDataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace privest::cli
