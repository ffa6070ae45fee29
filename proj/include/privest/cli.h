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

#ifndef PRIVEST_CLI_H_
#define PRIVEST_CLI_H_

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "privest/harness.h"
#include "privest/model.h"

namespace privest::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitDataError = 1,
  kExitUsageError = 2,
  kExitAuditFailure = 3,
};

// Malformed data or config file; the message carries the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag values that parse but are not acceptable.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kExperimentCsvHeader =
    "n,estimator,epsilon,k,trials,mse,mse_stderr,bias,variance,"
    "relative_efficiency,predicted_mse,seed";

// 17 significant digits, %g style.
std::string FormatReal(double value);

// One observation per line; blank lines are skipped.
Dataset ReadDataFile(const std::string& path);

// Flat key=value file; '#' starts a comment. Keys may be written with or
// without the leading "--".
std::map<std::string, std::string> ReadConfigFile(const std::string& path);

std::string ExperimentCsv(const ExperimentConfig& config,
                          const std::vector<TrialStats>& rows);

// Entry point shared by the privest binary and the tests. args excludes the
// program name; args[0] is the subcommand (estimate, experiment, audit).
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace privest::cli

#endif  // PRIVEST_CLI_H_
