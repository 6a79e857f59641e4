// Copyright 2026 The sflx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "sflx/classifier.h"
#include "sflx/image_io.h"
#include "sflx/raster.h"
#include "support/test_util.h"

namespace sflx {
namespace {

namespace fs = std::filesystem;

const std::string kKofs = "builtin:kofs:k=4:s=18,37,60,91,130,155,201,236";

int RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + std::string(SFLX_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::TempDir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    image_ = dir_ / "in.png";
    SaveImage(testing::FixtureImage(), image_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Explain(const fs::path& out, const std::string& extra = "") {
    return "--classifier " + kKofs + " --out " + out.string() + " " + extra +
           " explain --image " + image_.string();
  }

  fs::path dir_;
  fs::path image_;
};

TEST_F(CliTest, ExplainWritesVerifiableArtifacts) {
  const fs::path out = dir_ / "out";
  ASSERT_EQ(RunCli(Explain(out, "--prune --seed 3")), 0);
  for (const char* m : {"ochiai", "tarantula", "zoltar", "wong-ii", "best"}) {
    EXPECT_TRUE(fs::exists(out / m / "ranking.csv")) << m;
    EXPECT_TRUE(fs::exists(out / m / "heatmap.png")) << m;
    EXPECT_TRUE(fs::exists(out / m / "overlay.png")) << m;
    ASSERT_TRUE(fs::exists(out / m / "explanation.json")) << m;
  }
  // The kept-only overlay must still classify as the original label.
  KOfSClassifier h(testing::kFixtureSecret, testing::kFixtureK,
                   BackgroundColor::Black(1));
  const auto json = nlohmann::json::parse(Slurp(out / "best" / "explanation.json"));
  EXPECT_EQ(json.at("sufficient_label"), "y-target");
  EXPECT_EQ(h.Classify(LoadImage(out / "best" / "overlay.png")), "y-target");
  EXPECT_LE(json.at("pixel_indices").size(), 8u);
}

TEST_F(CliTest, ExplainIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(RunCli(Explain(dir_ / "a", "--seed 11 --m 500")), 0);
  ASSERT_EQ(RunCli(Explain(dir_ / "b", "--seed 11 --m 500")), 0);
  for (const char* f : {"ranking.csv", "explanation.json", "heatmap.png", "overlay.png"}) {
    EXPECT_EQ(Slurp(dir_ / "a" / "ochiai" / f), Slurp(dir_ / "b" / "ochiai" / f)) << f;
  }
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("--classifier " + kKofs + " explain --image " + (dir_ / "missing.png").string()), 4);
  EXPECT_EQ(RunCli(Explain(dir_ / "o", "--measure dstar")), 2);
  EXPECT_EQ(RunCli(Explain(dir_ / "o", "--sigma0 1.5")), 2);
  EXPECT_EQ(RunCli(Explain(dir_ / "o", "--m 0")), 2);
  EXPECT_EQ(RunCli("--classifier builtin:bogus explain --image " + image_.string()), 2);
  EXPECT_EQ(RunCli("--classifier proc:/bin/false --out " + (dir_ / "o").string() +
                " explain --image " + image_.string()),
            3);
  EXPECT_EQ(RunCli("--no-such-flag"), 2);
}

TEST_F(CliTest, SeedPrecedence) {
  ASSERT_EQ(RunCli(Explain(dir_ / "flag", "--m 300 --seed 5")), 0);
  ASSERT_EQ(RunCli(Explain(dir_ / "env", "--m 300"), "SFLX_SEED=5"), 0);
  ASSERT_EQ(RunCli(Explain(dir_ / "both", "--m 300 --seed 5"), "SFLX_SEED=9"), 0);
  ASSERT_EQ(RunCli(Explain(dir_ / "other", "--m 300"), "SFLX_SEED=9"), 0);
  const auto csv = [&](const char* d) { return Slurp(dir_ / d / "wong-ii" / "ranking.csv"); };
  EXPECT_EQ(csv("flag"), csv("env"));
  EXPECT_EQ(csv("flag"), csv("both"));
  EXPECT_NE(csv("flag"), csv("other"));
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
  const fs::path cfg = dir_ / "run.toml";
  std::ofstream(cfg) << "classifier = \"" << kKofs << "\"\nm = 300\nseed = 5\n"
                     << "measure = [\"ochiai\"]\n";
  ASSERT_EQ(RunCli("--config " + cfg.string() + " --out " + (dir_ / "c").string() +
                " explain --image " + image_.string()),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "c" / "ochiai" / "ranking.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "c" / "zoltar"));
  ASSERT_EQ(RunCli(Explain(dir_ / "f", "--m 300 --seed 5 --measure ochiai")), 0);
  EXPECT_EQ(Slurp(dir_ / "c" / "ochiai" / "ranking.csv"),
            Slurp(dir_ / "f" / "ochiai" / "ranking.csv"));
  ASSERT_EQ(RunCli("--config " + cfg.string() + " --seed 6 --out " + (dir_ / "g").string() +
                " explain --image " + image_.string()),
            0);
  EXPECT_NE(Slurp(dir_ / "c" / "ochiai" / "ranking.csv"),
            Slurp(dir_ / "g" / "ochiai" / "ranking.csv"));
}

TEST_F(CliTest, EvalDeletionMode) {
  const fs::path out = dir_ / "eval";
  ASSERT_EQ(RunCli("--classifier " + kKofs + " --out " + out.string() +
                " eval --mode deletion --image " + image_.string()),
            0);
  ASSERT_TRUE(fs::exists(out / "aggregate.csv"));
  const auto metrics = nlohmann::json::parse(Slurp(out / "in" / "metrics.json"));
  EXPECT_FALSE(metrics.dump().empty());
  const std::string csv = Slurp(out / "aggregate.csv");
  EXPECT_EQ(csv.rfind("image,measure,size_fraction,flip_fraction", 0), 0u);
}

TEST_F(CliTest, ChimeraRetainsPatchKeyedComposites) {
  const fs::path out = dir_ / "chim";
  ASSERT_EQ(RunCli("--m 300 --out " + out.string() + " chimera --count 10"), 0);
  const auto summary = nlohmann::json::parse(Slurp(out / "summary.json"));
  EXPECT_EQ(summary.at("retained"), 10);
  EXPECT_TRUE(fs::exists(out / "chimera.csv"));
}

TEST_F(CliTest, BenchFinishesQuickly) {
  const auto start = std::chrono::steady_clock::now();
  ASSERT_EQ(RunCli("--classifier " + kKofs + " --out " + (dir_ / "b").string() +
                " bench --image " + image_.string()),
            0);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bench.json"));
}

TEST_F(CliTest, Selftest) { EXPECT_EQ(RunCli("selftest"), 0); }

}  // namespace
}  // namespace sflx
