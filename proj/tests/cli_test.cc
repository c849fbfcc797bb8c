#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phenoid/common/io.h"
#include "testing.h"

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr goes to a side file.
Result Cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string(PHENOID_CLI) + " " + args + " > " + out.string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = phenoid::ReadFile(out);
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = phenoid::testing::TempDir("cli"); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(Cli("--help", dir_).exit_code, 0);
  EXPECT_EQ(Cli("synth", dir_).exit_code, 1);  // --out is required
  EXPECT_EQ(Cli("bogus", dir_).exit_code, 1);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const std::string common = "synth --profile cachexia --n 150 --prevalence 0.1 --seed 4 --out ";
  ASSERT_EQ(Cli(common + P("a"), dir_).exit_code, 0);
  ASSERT_EQ(Cli(common + P("b"), dir_).exit_code, 0);
  for (const char* f : {"corpus.jsonl", "truth.jsonl", "labels.csv"}) {
    EXPECT_EQ(phenoid::ReadFile(dir_ / "a" / f), phenoid::ReadFile(dir_ / "b" / f)) << f;
  }
  EXPECT_EQ(Cli("synth --profile nosuch --out " + P("c"), dir_).exit_code, 1);
  EXPECT_EQ(Cli("synth --profile cachexia --prevalence 1.5 --out " + P("c"), dir_).exit_code, 1);
}

TEST_F(CliTest, MatrixTrainEvaluateExplain) {
  ASSERT_EQ(Cli("synth --profile lung_cancer --n 200 --prevalence 0.2 --seed 2 --out " + P("s"),
                dir_)
                .exit_code,
            0);
  ASSERT_EQ(Cli("extract --corpus " + P("s") + " --out " + P("m.csv"), dir_).exit_code, 0);
  ASSERT_TRUE(fs::exists(dir_ / "m.csv"));

  const std::string train_args = "train --matrix " + P("m.csv") + " --labels " +
                                 P("s/labels.csv") + " --folds 3 --max-resource 3 --seed 1 ";
  EXPECT_EQ(Cli(train_args + "--budget 0 --out " + P("never.json"), dir_).exit_code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "never.json"));
  ASSERT_EQ(Cli("--json " + train_args + "--budget 60 --out " + P("model.json"), dir_).exit_code,
            0);
  ASSERT_TRUE(fs::exists(dir_ / "model.json"));

  const Result eval = Cli("--json evaluate --model " + P("model.json") + " --matrix " +
                              P("m.csv") + " --labels " + P("s/labels.csv"),
                          dir_);
  ASSERT_EQ(eval.exit_code, 0);
  EXPECT_NO_THROW(static_cast<void>(nlohmann::json::parse(eval.out)));

  std::ifstream labels(dir_ / "s" / "labels.csv");
  std::string header, first;
  std::getline(labels, header);
  std::getline(labels, first);
  const std::string id = first.substr(0, first.find(','));
  ASSERT_EQ(Cli("explain --model " + P("model.json") + " --matrix " + P("m.csv") + " --rows " +
                    id + " --background 20 --out " + P("x"),
                dir_)
                .exit_code,
            0);
  EXPECT_TRUE(fs::exists(dir_ / "x" / "beeswarm.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "x" / ("waterfall_" + id + ".csv")));
  EXPECT_EQ(Cli("explain --model " + P("model.json") + " --matrix " + P("m.csv") +
                    " --rows missing --out " + P("y"),
                dir_)
                .exit_code,
            1);
}

TEST_F(CliTest, MissingInputFile) {
  EXPECT_EQ(Cli("extract --corpus " + P("absent.jsonl") + " --out " + P("m.csv"), dir_).exit_code,
            1);
  EXPECT_EQ(Cli("evaluate --model " + P("absent.json") + " --matrix " + P("m.csv") +
                    " --labels " + P("l.csv"),
                dir_)
                .exit_code,
            1);
}

TEST_F(CliTest, LoopWithOracle) {
  ASSERT_EQ(
      Cli("synth --profile cachexia --n 400 --prevalence 0.1 --seed 3 --out " + P("s"), dir_)
          .exit_code,
      0);
  EXPECT_EQ(Cli("loop --corpus " + P("s"), dir_).exit_code, 1);  // needs --oracle
  const Result r = Cli("--json loop --oracle --no-baselines --budget 10 --seed 3 --corpus " +
                           P("s") + " --events " + P("events.jsonl") + " --report " +
                           P("report.json"),
                       dir_);
  ASSERT_EQ(r.exit_code, 0) << phenoid::ReadFile(dir_ / "stderr.txt");
  const nlohmann::json report = nlohmann::json::parse(phenoid::ReadFile(dir_ / "report.json"));
  EXPECT_TRUE(report["status"] == "Converged" || report["status"] == "MaxIterations");
  EXPECT_LE(report["iterations"].size(), 3u);
  EXPECT_TRUE(fs::exists(dir_ / "events.jsonl"));
}

}  // namespace
