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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "privest/harness.h"

namespace privest::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("privest_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  void Write(const std::string& name, const std::string& contents) const {
    std::ofstream(Path(name)) << contents;
  }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int Cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return privest::cli::Run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> Fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

TEST(FormatRealTest, SeventeenSignificantDigits) {
  EXPECT_EQ(FormatReal(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatReal(2.0), "2");
  EXPECT_EQ(FormatReal(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(FormatReal(-2.5e-7), "-2.4999999999999999e-07");
}

TEST_F(CliTest, EstimateFromDataFileIsReproducible) {
  Write("d.csv", "1\n0\n\n1\n1\n0\n0\n1\n0\n1\n1\n");
  ASSERT_EQ(Cli({"estimate", "--model", "bernoulli", "--data-file",
                 Path("d.csv"), "--eps", "0.5", "--k", "auto", "--seed", "7"}),
            kExitOk)
      << err_.str();
  const auto lines = Lines(out_.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "model,n,epsilon,k,block_size,seed,output");

  const Dataset data({1, 0, 1, 1, 0, 0, 1, 0, 1, 1});
  const PrivateEstimate direct = EstimateWithSeed(
      Family::Bernoulli(), data, 0.5, std::nullopt, 7);
  const auto fields = Fields(lines[1]);
  ASSERT_EQ(fields.size(), 7u);
  EXPECT_EQ(fields[1], "10");
  EXPECT_EQ(fields[3], std::to_string(direct.params.k));
  EXPECT_EQ(fields[6], FormatReal(direct.output));
}

TEST_F(CliTest, EstimateReleasesAverageOnlyOnRequest) {
  Write("d.csv", "0.5\n1.5\n2.5\n");
  ASSERT_EQ(Cli({"estimate", "--model", "gaussian_fixed_var", "--theta-min",
                 "-5", "--theta-max", "5", "--data-file", Path("d.csv"),
                 "--eps", "1", "--k", "3", "--release-zbar"}),
            kExitOk)
      << err_.str();
  const auto lines = Lines(out_.str());
  EXPECT_EQ(lines[0], "model,n,epsilon,k,block_size,seed,output,average");
  EXPECT_EQ(Fields(lines[1]).back(), "1.5");
}

TEST_F(CliTest, EstimateSyntheticMatchesLibrary) {
  ASSERT_EQ(Cli({"estimate", "--model", "exponential_rate", "--theta", "2",
                 "--n", "1000", "--eps", "1", "--seed", "1", "--out",
                 Path("est.csv")}),
            kExitOk)
      << err_.str();
  const SyntheticEstimate direct = EstimateSynthetic(
      Family::ExponentialRate(), 2.0, 1000, 1.0, std::nullopt, 1);
  const auto fields = Fields(Lines(out_.str())[1]);
  EXPECT_EQ(fields[6], FormatReal(direct.estimate.output));
  EXPECT_EQ(Slurp(Path("est.csv")), out_.str());

  const auto manifest =
      nlohmann::json::parse(Slurp(Path("est.csv.manifest.json")));
  for (const auto& p : manifest["output_paths"]) {
    EXPECT_TRUE(fs::exists(p.get<std::string>())) << p;
  }
  EXPECT_EQ(manifest["config"]["command"], "estimate");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({"estimate", "--model", "bernoulli", "--eps", "0"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"estimate", "--model", "poisson", "--eps", "1", "--theta",
                 "0.5", "--n", "10"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"estimate", "--eps", "1", "--theta", "0.5"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"estimate", "--eps", "1", "--theta", "0.5", "--n", "10",
                 "--k", "11"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"estimate", "--eps", "1", "--theta", "0.5", "--n", "10",
                 "--k", "three"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"estimate", "--eps", "1", "--theta", "1.5", "--n", "10"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"experiment", "--theta", "0.3"}), kExitUsageError);
  EXPECT_EQ(Cli({"experiment", "--theta", "0.3", "--n-grid", "100,10"}),
            kExitUsageError);
  EXPECT_EQ(Cli({"frobnicate"}), kExitUsageError);
  EXPECT_EQ(Cli({}), kExitUsageError);
  EXPECT_EQ(Cli({"audit", "--n", "10", "--k", "11"}), kExitUsageError);
}

TEST_F(CliTest, MalformedDataFileReportsLine) {
  Write("bad.csv", "1\n0\n\nabc\n");
  EXPECT_EQ(Cli({"estimate", "--data-file", Path("bad.csv"), "--eps", "1"}),
            kExitDataError);
  EXPECT_NE(err_.str().find(":4:"), std::string::npos) << err_.str();

  Write("domain.csv", "1\n2\n");
  EXPECT_EQ(Cli({"estimate", "--data-file", Path("domain.csv"), "--eps", "1"}),
            kExitDataError);
  EXPECT_EQ(Cli({"estimate", "--data-file", Path("missing.csv"), "--eps", "1"}),
            kExitDataError);

  Write("zeros.csv", "0\n0\n1\n1\n");
  EXPECT_EQ(Cli({"estimate", "--model", "exponential_rate", "--data-file",
                 Path("zeros.csv"), "--eps", "1", "--k", "2"}),
            kExitDataError);
  EXPECT_NE(err_.str().find("block 0"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ExperimentWritesOneRowPerSampleSize) {
  ASSERT_EQ(Cli({"experiment", "--model", "bernoulli", "--theta", "0.3",
                 "--n-grid", "1000,10000", "--trials", "100", "--eps", "0.5",
                 "--out", Path("a.csv")}),
            kExitOk)
      << err_.str();
  const auto lines = Lines(Slurp(Path("a.csv")));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], kExperimentCsvHeader);
  const auto row = Fields(lines[2]);
  ASSERT_EQ(row.size(), 12u);
  EXPECT_EQ(row[0], "10000");
  EXPECT_EQ(row[1], "private");
  EXPECT_EQ(row[2], "0.5");
  EXPECT_EQ(row[3], "332");
  EXPECT_EQ(row[4], "100");
  EXPECT_EQ(row[11], "1");
}

TEST_F(CliTest, ExperimentIsByteIdenticalAcrossRunsAndWorkers) {
  const std::vector<std::string> base = {
      "experiment", "--model", "exponential_rate", "--theta", "2",
      "--n-grid",   "100,1000", "--trials", "300", "--eps", "0.5",
      "--seed",     "42"};
  auto with = [&](const std::string& out, const std::string& workers) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "--out", Path(out)});
    return Cli(args);
  };
  ASSERT_EQ(with("w1.csv", "1"), kExitOk);
  ASSERT_EQ(with("w1b.csv", "1"), kExitOk);
  ASSERT_EQ(with("w8.csv", "8"), kExitOk);
  const std::string a = Slurp(Path("w1.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, Slurp(Path("w1b.csv")));
  EXPECT_EQ(a, Slurp(Path("w8.csv")));
}

TEST_F(CliTest, NonPrivateRowsLeaveEpsilonEmpty) {
  ASSERT_EQ(Cli({"experiment", "--theta", "0.3", "--n", "50", "--trials",
                 "10", "--estimator", "mle"}),
            kExitOk);
  const auto row = Fields(Lines(out_.str())[1]);
  EXPECT_EQ(row[1], "mle");
  EXPECT_EQ(row[2], "");
  EXPECT_EQ(row[3], "1");
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  Write("exp.cfg",
        "# experiment\nmodel = bernoulli\ntheta=0.3\n--n-grid = 100,200\n"
        "trials=20\neps=0.5\nseed=9\n");
  ASSERT_EQ(Cli({"experiment", "--config", Path("exp.cfg"), "--out",
                 Path("cfg.csv")}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(Cli({"experiment", "--model", "bernoulli", "--theta", "0.3",
                 "--n-grid", "100,200", "--trials", "20", "--eps", "0.5",
                 "--seed", "9", "--out", Path("flags.csv")}),
            kExitOk);
  EXPECT_EQ(Slurp(Path("cfg.csv")), Slurp(Path("flags.csv")));

  ASSERT_EQ(Cli({"experiment", "--config", Path("exp.cfg"), "--trials", "7"}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(Fields(Lines(out_.str())[1])[4], "7");

  Write("bad.cfg", "theta 0.3\n");
  EXPECT_EQ(Cli({"experiment", "--config", Path("bad.cfg")}), kExitUsageError);
  Write("unknown.cfg", "colour=blue\n");
  EXPECT_EQ(Cli({"experiment", "--config", Path("unknown.cfg")}),
            kExitUsageError);
}

TEST_F(CliTest, PrivateExperimentMatchesDecomposition) {
  ASSERT_EQ(Cli({"experiment", "--estimator", "private", "--eps", "0.5",
                 "--model", "bernoulli", "--theta", "0.3", "--n", "10000",
                 "--trials", "10000", "--seed", "3"}),
            kExitOk);
  const auto row = Fields(Lines(out_.str())[1]);
  EXPECT_EQ(row[3], "332");
  const double mse = std::stod(row[5]);
  const double lambda = 1.0 / (332 * 0.5);
  EXPECT_NEAR(mse / (0.21 / 10000 + 2 * lambda * lambda), 1.0, 0.05);
}

TEST_F(CliTest, AuditPassesAndWritesReport) {
  ASSERT_EQ(Cli({"audit", "--model", "bernoulli", "--n", "100", "--k", "10",
                 "--eps", "1", "--pairs", "1000", "--out", Path("audit.json")}),
            kExitOk)
      << err_.str();
  const auto report = nlohmann::json::parse(Slurp(Path("audit.json")));
  EXPECT_TRUE(report["pass"].get<bool>());
  EXPECT_LE(report["max_sensitivity_ratio"].get<double>(), 0.11);
  EXPECT_EQ(report["pairs_tested"].get<int>(), 3000);
  EXPECT_TRUE(fs::exists(Path("audit.json.manifest.json")));
}

TEST_F(CliTest, AuditCatchesHalvedScale) {
  // k = n = 10, eps = 1: correct scale 0.1, halved 0.05.
  ASSERT_EQ(Cli({"audit", "--model", "bernoulli", "--n", "10", "--k", "10",
                 "--eps", "1", "--pairs", "50", "--noise-scale-override",
                 "0.05", "--out", Path("audit.json")}),
            kExitAuditFailure);
  EXPECT_NE(err_.str().find("dataset"), std::string::npos);
  const auto report = nlohmann::json::parse(Slurp(Path("audit.json")));
  EXPECT_FALSE(report["pass"].get<bool>());
  EXPECT_GT(report["max_abs_log_ratio"].get<double>(), 1.0);
  EXPECT_EQ(report["worst_pair"]["dataset"].size(), 10u);
}

int RunBinary(const std::string& args) {
  const std::string command =
      std::string(PRIVEST_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitCodes) {
  EXPECT_EQ(RunBinary("estimate --model bernoulli --theta 0.3 --n 100 --eps 1"),
            0);
  EXPECT_EQ(RunBinary("estimate --model bernoulli --eps 0"), 2);
  EXPECT_EQ(RunBinary("--help"), 0);
  Write("bad.csv", "x\n");
  EXPECT_EQ(RunBinary("estimate --data-file " + Path("bad.csv") + " --eps 1"),
            1);
  EXPECT_EQ(RunBinary("audit --n 10 --k 10 --pairs 20 "
                      "--noise-scale-override 0.05"),
            3);
}

}  // namespace
}  // namespace privest::cli
