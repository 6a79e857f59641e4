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

#include "sflx/spectrum.h"

#include <cmath>

#include <gtest/gtest.h>

#include "sflx/mutation.h"
#include "support/test_util.h"

namespace sflx {
namespace {

using testing::CodeOf;

TestSuite SuiteOf(std::size_t n, const std::vector<std::pair<std::vector<PixelIndex>, bool>>& rows) {
  TestSuite suite;
  suite.unit_count = n;
  suite.original_label = "y";
  for (const auto& [masked, same] : rows) {
    suite.mutants.push_back({MaskSet::FromIndices(n, masked), same});
  }
  suite.params.m = rows.size();
  return suite;
}

// The worked example: four mutants over two pixels.
TestSuite FourMutants() {
  return SuiteOf(2, {{{}, true}, {{0}, false}, {{0, 1}, false}, {{1}, true}});
}

TEST(ComputeSpectraTest, FourMutantExample) {
  const auto spectra = ComputeSpectra(FourMutants(), 2);
  EXPECT_EQ(spectra[0], (SpectrumVector{.ep = 2, .ef = 0, .np = 0, .nf = 2}));
  EXPECT_EQ(spectra[1], (SpectrumVector{.ep = 1, .ef = 1, .np = 1, .nf = 1}));
}

TEST(ComputeSpectraTest, DegenerateColumns) {
  const TestSuite all_y = SuiteOf(3, {{{1}, true}, {{1, 2}, true}, {{}, true}});
  const auto s = ComputeSpectra(all_y, 3);
  EXPECT_EQ(s[0], (SpectrumVector{.ep = 3, .ef = 0, .np = 0, .nf = 0}));
  const TestSuite always_masked = SuiteOf(2, {{{0}, true}, {{0, 1}, false}});
  const auto t = ComputeSpectra(always_masked, 2);
  EXPECT_EQ(t[0].ep + t[0].ef, 0u);
}

TEST(ComputeSpectraTest, RejectsWrongWidth) {
  EXPECT_EQ(CodeOf([] { ComputeSpectra(FourMutants(), 3); }),
            ErrorCode::kInvalidArgument);
}

TEST(ComputeSpectraTest, CountLawsAgainstNaiveOracle) {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 64 + rng.UniformBelow(70);  // straddles word edges
    const std::size_t m = 1 + rng.UniformBelow(60);
    TestSuite suite;
    suite.unit_count = n;
    for (std::size_t i = 0; i < m; ++i) {
      suite.mutants.push_back({testing::RandomMask(n, rng), rng.UniformBelow(2) == 1});
    }
    const auto spectra = ComputeSpectra(suite, n);
    ASSERT_EQ(spectra.size(), n);
    for (std::size_t p = 0; p < n; ++p) {
      SpectrumVector naive;
      for (const auto& mutant : suite.mutants) {
        const bool unmasked = !mutant.mask.test(p);
        (unmasked ? (mutant.same_label ? naive.ep : naive.ef)
                  : (mutant.same_label ? naive.np : naive.nf))++;
      }
      ASSERT_EQ(spectra[p], naive);
      ASSERT_EQ(spectra[p].total(), m);
    }
  }
}

TEST(MeasureValueTest, HandEvaluatedExamples) {
  EXPECT_DOUBLE_EQ(MeasureValue(Measure::kOchiai, {1, 1, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(MeasureValue(Measure::kWongII, {3, 5, 0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(MeasureValue(Measure::kTarantula, {2, 1, 2, 1}), 0.5);
  EXPECT_DOUBLE_EQ(MeasureValue(Measure::kZoltar, {2, 2, 7, 0}), 0.5);
}

TEST(MeasureValueTest, ZeroConventions) {
  for (Measure m : {Measure::kOchiai, Measure::kTarantula, Measure::kZoltar}) {
    EXPECT_EQ(MeasureValue(m, {0, 0, 0, 0}), 0.0);
    EXPECT_EQ(MeasureValue(m, {4, 0, 2, 3}), 0.0);
  }
  EXPECT_EQ(MeasureValue(Measure::kTarantula, {0, 3, 0, 0}), 1.0);
}

// Independent evaluation of the four formulas, in long double.
long double Reference(Measure m, long double ep, long double ef, long double np,
                      long double nf) {
  switch (m) {
    case Measure::kOchiai:
      return ef == 0 ? 0 : ef / std::sqrt((ef + nf) * (ef + ep));
    case Measure::kTarantula: {
      const long double a = ef + nf == 0 ? 0 : ef / (ef + nf);
      const long double b = ep + np == 0 ? 0 : ep / (ep + np);
      return a + b == 0 ? 0 : a / (a + b);
    }
    case Measure::kZoltar:
      return ef == 0 ? 0 : ef / (ef + nf + ep + 10000 * nf * ep / ef);
    case Measure::kWongII:
      return ef - ep;
  }
  return NAN;
}

TEST(MeasureValueTest, MatchesReferenceOnSmallCounts) {
  for (int ep = 0; ep <= 10; ++ep)
    for (int ef = 0; ef <= 10; ++ef)
      for (int np = 0; np <= 10; ++np)
        for (int nf = 0; nf <= 10; ++nf)
          for (Measure m : kAllMeasures) {
            const SpectrumVector s{std::uint64_t(ep), std::uint64_t(ef),
                                   std::uint64_t(np), std::uint64_t(nf)};
            const double got = MeasureValue(m, s);
            ASSERT_LE(std::fabs(got - static_cast<double>(Reference(m, ep, ef, np, nf))),
                      1e-12)
                << MeasureName(m) << " " << ep << "," << ef << "," << np << "," << nf;
            if (m == Measure::kWongII) {
              ASSERT_LE(std::fabs(got), ep + ef + np + nf);
            } else {
              ASSERT_GE(got, 0.0);
              ASSERT_LE(got, 1.0);
            }
          }
}

TEST(OrientationTest, MaskingSwapsExecutedAndNotExecuted) {
  const SpectrumVector s{1, 2, 3, 4};
  EXPECT_EQ(Oriented(s, SpectrumRole::kPresence), s);
  EXPECT_EQ(Oriented(s, SpectrumRole::kMasking), (SpectrumVector{3, 4, 1, 2}));
}

TEST(RankPixelsTest, FourMutantExampleUnderBothRoles) {
  const auto spectra = ComputeSpectra(FourMutants(), 2);
  // Masking pixel 0 always coincides with a label change.
  const PixelRanking masking = RankPixels(spectra, Measure::kOchiai);
  EXPECT_EQ(masking[0].pixel, 0u);
  EXPECT_DOUBLE_EQ(masking[0].value, 1.0);
  EXPECT_DOUBLE_EQ(masking[1].value, 0.5);
  const PixelRanking presence = RankPixels(spectra, Measure::kOchiai, SpectrumRole::kPresence);
  EXPECT_EQ(presence[0].pixel, 1u);
  EXPECT_DOUBLE_EQ(presence[0].value, 0.5);
}

TEST(RankByValuesTest, OrderAndTies) {
  const std::vector<double> two = {0.9, 0.1};
  EXPECT_EQ(TopPixels(RankByValues(two), 2), (std::vector<PixelIndex>{0, 1}));
  const std::vector<double> flat(6, 0.3);
  EXPECT_EQ(TopPixels(RankByValues(flat), 6), (std::vector<PixelIndex>{0, 1, 2, 3, 4, 5}));
  const std::vector<double> mixed = {0.1, 0.5, 0.1, 0.5};
  EXPECT_EQ(TopPixels(RankByValues(mixed), 4), (std::vector<PixelIndex>{1, 3, 0, 2}));
}

TEST(RankByValuesTest, InvariantUnderIncreasingTransforms) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(100);
    for (double& v : values) v = static_cast<double>(rng.UniformBelow(20)) / 7.0 - 1.0;
    std::vector<double> affine(values), cubic(values), squashed(values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      affine[i] = 3.0 * values[i] + 11.0;
      cubic[i] = values[i] * values[i] * values[i];
      squashed[i] = std::atan(values[i]);
    }
    const auto base = TopPixels(RankByValues(values), 100);
    EXPECT_EQ(TopPixels(RankByValues(affine), 100), base);
    EXPECT_EQ(TopPixels(RankByValues(cubic), 100), base);
    EXPECT_EQ(TopPixels(RankByValues(squashed), 100), base);
  }
}

TEST(MeasureNamesTest, ParseIsForgiving) {
  EXPECT_EQ(ParseMeasure("Ochiai"), Measure::kOchiai);
  EXPECT_EQ(ParseMeasure("wongii"), Measure::kWongII);
  EXPECT_EQ(ParseMeasure("wong-ii"), Measure::kWongII);
  EXPECT_EQ(ParseMeasure("ZOLTAR"), Measure::kZoltar);
  EXPECT_FALSE(ParseMeasure("dstar").has_value());
  for (Measure m : kAllMeasures) EXPECT_EQ(ParseMeasure(MeasureName(m)), m);
  EXPECT_EQ(ParseSpectrumRole("presence"), SpectrumRole::kPresence);
  EXPECT_FALSE(ParseSpectrumRole("other").has_value());
}

}  // namespace
}  // namespace sflx
