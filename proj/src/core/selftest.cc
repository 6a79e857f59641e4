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

#include "sflx/selftest.h"

#include <bit>
#include <cmath>
#include <string>

#include "sflx/classifier.h"
#include "sflx/evaluation.h"
#include "sflx/explanation.h"
#include "sflx/mutation.h"
#include "sflx/rng.h"
#include "sflx/spectrum.h"

namespace sflx {
namespace {

// Written from the textbook formulas, sharing nothing with MeasureValue.
double Direct(Measure m, double ep, double ef, double np, double nf) {
  switch (m) {
    case Measure::kOchiai: {
      const double d = std::sqrt(ef + nf) * std::sqrt(ef + ep);
      return ef > 0 ? ef / d : 0.0;
    }
    case Measure::kTarantula: {
      const double f = ef + nf > 0 ? ef / (ef + nf) : 0.0;
      const double p = ep + np > 0 ? ep / (ep + np) : 0.0;
      return f + p > 0 ? f / (f + p) : 0.0;
    }
    case Measure::kZoltar:
      return ef > 0 ? ef / (ef + nf + ep + 10000 * nf * ep / ef) : 0.0;
    case Measure::kWongII:
      return ef - ep;
  }
  return NAN;
}

SelftestCheck MeasureOracle() {
  double worst = 0.0;
  int checked = 0;
  for (int ep = 0; ep <= 10; ++ep)
    for (int ef = 0; ef <= 10; ++ef)
      for (int np = 0; np <= 10; ++np)
        for (int nf = 0; nf <= 10; ++nf)
          for (Measure m : kAllMeasures) {
            const SpectrumVector s{static_cast<std::uint64_t>(ep),
                                   static_cast<std::uint64_t>(ef),
                                   static_cast<std::uint64_t>(np),
                                   static_cast<std::uint64_t>(nf)};
            const double diff =
                std::abs(MeasureValue(m, s) - Direct(m, ep, ef, np, nf));
            worst = std::max(worst, std::isnan(diff) ? INFINITY : diff);
            ++checked;
          }
  return {"measure-oracle", worst <= 1e-12,
          std::to_string(checked) + " evaluations, max |diff| " +
              std::to_string(worst)};
}

SelftestCheck TinyBruteForce() {
  constexpr int kSide = 3;
  constexpr std::size_t kN = kSide * kSide;
  const BackgroundColor bg = BackgroundColor::Black(1);
  std::vector<std::uint8_t> pixels(kN);
  for (std::size_t i = 0; i < kN; ++i) pixels[i] = static_cast<std::uint8_t>(20 + 10 * i);
  const Occluder occluder(Raster(kSide, kSide, 1, pixels), bg);

  Rng rng(0x5e1f7e57);
  int failures = 0;
  int cases = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Label> table(std::size_t{1} << kN);
    for (auto& label : table) label = rng.UniformBelow(2) ? "y" : "z";
    table.back() = "y";
    table.front() = "z";
    TruthTableClassifier classifier(kN, table, bg);
    MutationParams params;
    params.m = 400;
    params.seed = trial;
    const TestSuite suite = GenerateTestSuite(classifier, occluder, params);
    ExplainOptions options;
    options.prune = true;
    const BestExplanation best =
        ExplainBest(classifier, occluder, suite, kAllMeasures, options);
    const BruteForceResult oracle = BruteForceMinExplanation(kN, table);
    std::uint32_t kept = 0;
    for (PixelIndex p : best.explanation.pixels) kept |= 1u << p;
    ++cases;
    if (table[kept] != "y" ||
        std::popcount(kept) < oracle.min_size) {
      ++failures;
    }
  }
  return {"tiny-brute-force", failures == 0,
          std::to_string(cases) + " truth tables, " + std::to_string(failures) +
              " failures"};
}

}  // namespace

std::vector<SelftestCheck> RunSelftest() {
  return {MeasureOracle(), TinyBruteForce()};
}

}  // namespace sflx
