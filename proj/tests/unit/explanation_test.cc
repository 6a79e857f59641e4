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

#include "sflx/explanation.h"

#include <bit>
#include <set>

#include <gtest/gtest.h>

#include "sflx/evaluation.h"
#include "sflx/mutation.h"
#include "support/test_util.h"

namespace sflx {
namespace {

using testing::CodeOf;
using testing::NonBlack;

const BackgroundColor kBlack = BackgroundColor::Black(1);

// Ranking that lists `first` in order, then every other unit ascending.
PixelRanking RankingWithFirst(std::size_t n, const std::vector<PixelIndex>& first) {
  std::vector<double> values(n, 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    values[first[i]] = static_cast<double>(first.size() - i);
  }
  return RankByValues(values);
}

PixelRanking RandomRanking(std::size_t n, Rng& rng) {
  std::vector<double> values(n);
  for (double& v : values) v = rng.UniformUnit();
  return RankByValues(values);
}

// Answers "a" for the first `switch_after` calls, then "b".
class FlakyClassifier final : public Classifier {
 public:
  explicit FlakyClassifier(int switch_after) : switch_after_(switch_after) {}
  Label Classify(const Raster&) override { return calls_++ < switch_after_ ? "a" : "b"; }
  std::string_view kind() const override { return "flaky"; }

 private:
  int switch_after_;
  int calls_ = 0;
};

TEST(BuildExplanationTest, PerfectRankingFindsTheSecretPixel) {
  const Occluder occluder(NonBlack(3, 3, 1, 1), kBlack);
  KOfSClassifier h({5}, 1, kBlack);
  const Explanation e =
      BuildExplanation(h, occluder, RankingWithFirst(9, {5}), Measure::kOchiai);
  EXPECT_EQ(e.pixels, (std::vector<PixelIndex>{5}));
  EXPECT_EQ(e.sufficient_label, "y-target");
  EXPECT_EQ(e.queries_used, 1u);
  EXPECT_FALSE(e.pruned);
}

TEST(BuildExplanationTest, NeverReturnsTheEmptyPrefix) {
  const Occluder occluder(NonBlack(3, 3, 1, 1), kBlack);
  ConstantClassifier h("y");
  for (SearchMode mode : {SearchMode::kLinear, SearchMode::kBinary}) {
    const Explanation e =
        BuildExplanation(h, occluder, RankingWithFirst(9, {7}), Measure::kOchiai, mode);
    EXPECT_EQ(e.pixels, (std::vector<PixelIndex>{7}));
  }
}

TEST(BuildExplanationTest, InvertedRankingCountsEveryDecoy) {
  const Occluder occluder(NonBlack(3, 3, 1, 1), kBlack);
  const std::vector<PixelIndex> secret = {0, 4, 8};
  for (int k = 1; k <= 3; ++k) {
    KOfSClassifier h(secret, k, kBlack);
    const Explanation e = BuildExplanation(
        h, occluder, RankingWithFirst(9, {1, 2, 3, 5, 6, 7, 0, 4, 8}), Measure::kOchiai);
    EXPECT_EQ(e.pixels.size(), 9u - secret.size() + k);
  }
}

TEST(BuildExplanationTest, DetectsNondeterminism) {
  const Occluder occluder(NonBlack(2, 2, 1, 1), kBlack);
  FlakyClassifier h(0);
  const Label expected = "a";
  EXPECT_EQ(CodeOf([&] {
              BuildExplanation(h, occluder, RankingWithFirst(4, {}), Measure::kOchiai,
                               SearchMode::kLinear, &expected);
            }),
            ErrorCode::kClassifierIo);
  FlakyClassifier later(1);
  EXPECT_EQ(CodeOf([&] {
              BuildExplanation(later, occluder, RankingWithFirst(4, {}), Measure::kOchiai);
            }),
            ErrorCode::kClassifierIo);
}

TEST(BuildExplanationTest, RejectsRankingOfWrongSize) {
  const Occluder occluder(NonBlack(2, 2, 1, 1), kBlack);
  ConstantClassifier h("y");
  EXPECT_EQ(CodeOf([&] {
              BuildExplanation(h, occluder, RankingWithFirst(5, {}), Measure::kOchiai);
            }),
            ErrorCode::kInvalidArgument);
}

TEST(BuildExplanationTest, SufficientAndPrefixMinimalOnLinearClassifiers) {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const Occluder occluder(NonBlack(6, 6, 1, trial), kBlack);
    LinearClassifier h = LinearClassifier::Random(36, trial, 0.0);
    const PixelRanking ranking = RandomRanking(36, rng);
    for (SearchMode mode : {SearchMode::kLinear, SearchMode::kBinary}) {
      const Explanation e = BuildExplanation(h, occluder, ranking, Measure::kOchiai, mode);
      ASSERT_TRUE(IsSufficient(h, occluder, e.pixels, e.sufficient_label));
      if (e.pixels.size() > 1) {
        const std::span<const PixelIndex> shorter(e.pixels.data(), e.pixels.size() - 1);
        ASSERT_FALSE(IsSufficient(h, occluder, shorter, e.sufficient_label));
      }
    }
  }
}

TEST(BuildExplanationTest, BinaryEqualsLinearOnMonotoneClassifiers) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Occluder occluder(NonBlack(10, 10, 1, trial), kBlack);
    const std::size_t s = 1 + rng.UniformBelow(20);
    KOfSClassifier h(testing::RandomSubset(100, s, rng),
                     1 + static_cast<int>(rng.UniformBelow(s)), kBlack);
    const PixelRanking ranking = RandomRanking(100, rng);
    const Explanation linear =
        BuildExplanation(h, occluder, ranking, Measure::kOchiai, SearchMode::kLinear);
    const Explanation binary =
        BuildExplanation(h, occluder, ranking, Measure::kOchiai, SearchMode::kBinary);
    ASSERT_EQ(linear.pixels, binary.pixels) << trial;
  }
}

TEST(BuildExplanationTest, AutoModeUsesLogarithmicSearchOnLargeImages) {
  const Occluder occluder(NonBlack(65, 65, 1, 1), kBlack);
  const std::vector<PixelIndex> secret = {4000, 4100, 4200};
  KOfSClassifier h(secret, 2, kBlack);
  const PixelRanking ranking = RankingWithFirst(65 * 65, {});  // secret far down
  const Explanation e = BuildExplanation(h, occluder, ranking, Measure::kOchiai);
  EXPECT_EQ(e.pixels.size(), 4101u);
  EXPECT_LT(e.queries_used, 40u);
}

TEST(PruneExplanationTest, Examples) {
  const Occluder occluder(NonBlack(4, 4, 1, 1), kBlack);
  KOfSClassifier h({5}, 1, kBlack);
  Explanation e;
  e.pixels = {5, 9};
  e.sufficient_label = "y-target";
  const Explanation pruned = PruneExplanation(h, occluder, e);
  EXPECT_EQ(pruned.pixels, (std::vector<PixelIndex>{5}));
  EXPECT_TRUE(pruned.pruned);
  EXPECT_EQ(PruneExplanation(h, occluder, pruned).pixels, pruned.pixels);

  ConstantClassifier all_y("y");
  Explanation full;
  full.pixels = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  full.sufficient_label = "y";
  EXPECT_TRUE(PruneExplanation(all_y, occluder, full).pixels.empty());
}

TEST(PruneExplanationTest, KOfSResultIsExactlyKSecretPixelsOn3x3) {
  const Occluder occluder(NonBlack(3, 3, 1, 2), kBlack);
  Rng rng(77);
  for (std::uint32_t bits = 1; bits < 512; ++bits) {
    std::vector<PixelIndex> secret;
    for (PixelIndex p = 0; p < 9; ++p) {
      if (bits >> p & 1) secret.push_back(p);
    }
    for (int k = 1; k <= static_cast<int>(secret.size()); ++k) {
      KOfSClassifier h(secret, k, kBlack);
      const Explanation e = PruneExplanation(
          h, occluder,
          BuildExplanation(h, occluder, RandomRanking(9, rng), Measure::kOchiai));
      ASSERT_EQ(e.pixels.size(), static_cast<std::size_t>(k)) << bits << " k=" << k;
      for (PixelIndex p : e.pixels) ASSERT_TRUE(bits >> p & 1) << bits;
    }
  }
}

TEST(PruneExplanationTest, OneMinimalAndNoSmallerThanBruteForceOn3x3Tables) {
  const Occluder occluder(NonBlack(3, 3, 1, 3), kBlack);
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Label> table(512);
    for (auto& l : table) l = rng.UniformBelow(2) ? "y" : "z";
    table.back() = "y";
    TruthTableClassifier h(9, table, kBlack);
    const Explanation e = PruneExplanation(
        h, occluder,
        BuildExplanation(h, occluder, RandomRanking(9, rng), Measure::kOchiai));
    std::uint32_t kept = 0;
    for (PixelIndex p : e.pixels) kept |= 1u << p;
    ASSERT_EQ(table[kept], "y");
    for (PixelIndex p : e.pixels) ASSERT_NE(table[kept & ~(1u << p)], "y");
    const BruteForceResult oracle = BruteForceMinExplanation(9, table);
    ASSERT_GE(std::popcount(kept), oracle.min_size);
  }
}

TEST(ExplainBestTest, SingleMeasureEqualsDirectBuild) {
  const Occluder occluder(testing::FixtureImage(), kBlack);
  KOfSClassifier h(testing::kFixtureSecret, testing::kFixtureK, kBlack);
  MutationParams params;
  params.seed = 3;
  const TestSuite suite = GenerateTestSuite(h, occluder, params);
  const Measure only[] = {Measure::kTarantula};
  const BestExplanation best = ExplainBest(h, occluder, suite, only);
  const Explanation direct = BuildExplanation(
      h, occluder, RankPixels(ComputeSpectra(suite, 256), Measure::kTarantula),
      Measure::kTarantula);
  EXPECT_EQ(best.measure, Measure::kTarantula);
  EXPECT_EQ(best.explanation.pixels, direct.pixels);
  EXPECT_EQ(best.explanation.queries_used, direct.queries_used);
}

TEST(ExplainBestTest, PicksSmallestThenDeclarationOrder) {
  const Occluder occluder(testing::FixtureImage(), kBlack);
  KOfSClassifier h(testing::kFixtureSecret, testing::kFixtureK, kBlack);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MutationParams params;
    params.seed = seed;
    params.m = 200;
    const TestSuite suite = GenerateTestSuite(h, occluder, params);
    const Measure reversed[] = {Measure::kWongII, Measure::kZoltar, Measure::kTarantula,
                                Measure::kOchiai};
    const BestExplanation best = ExplainBest(h, occluder, suite, reversed);
    ASSERT_EQ(best.per_measure.size(), 4u);
    std::size_t smallest = SIZE_MAX;
    for (const auto& r : best.per_measure) {
      smallest = std::min(smallest, r.explanation.pixels.size());
      ASSERT_TRUE(IsSufficient(h, occluder, r.explanation.pixels, suite.original_label));
    }
    EXPECT_EQ(best.explanation.pixels.size(), smallest);
    for (Measure m : kAllMeasures) {
      const auto it = std::ranges::find_if(best.per_measure,
                                           [&](const auto& r) { return r.measure == m; });
      if (it->explanation.pixels.size() == smallest) {
        EXPECT_EQ(best.measure, m);
        break;
      }
    }
  }
}

TEST(ExplainBestTest, FixtureSizesRegression) {
  const Occluder occluder(testing::FixtureImage(), kBlack);
  KOfSClassifier h(testing::kFixtureSecret, testing::kFixtureK, kBlack);
  const TestSuite suite = GenerateTestSuite(h, occluder, MutationParams{});
  const BestExplanation best = ExplainBest(h, occluder, suite, kAllMeasures);
  std::vector<std::size_t> sizes;
  for (const auto& r : best.per_measure) sizes.push_back(r.explanation.pixels.size());
  // Pinned from the first fixed-seed run.
  EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 4, 4, 4}));
}

TEST(ExplainBestTest, RejectsEmptyMeasureList) {
  const Occluder occluder(NonBlack(2, 2, 1, 1), kBlack);
  ConstantClassifier h("y");
  MutationParams params;
  params.m = 3;
  const TestSuite suite = GenerateTestSuite(h, occluder, params);
  EXPECT_EQ(CodeOf([&] { ExplainBest(h, occluder, suite, {}); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace sflx
