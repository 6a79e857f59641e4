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

#include "sflx/mutation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sflx/errors.h"
#include "sflx/rng.h"

namespace sflx {

void MutationParams::Validate() const {
  if (sigma0 && !(*sigma0 > 0.0 && *sigma0 < 1.0)) {
    ThrowInvalidArgument("sigma0 must lie in (0,1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    ThrowInvalidArgument("epsilon must lie in (0,1)");
  }
  if (m < 1) ThrowInvalidArgument("test suite size m must be >= 1");
  if (chunk < 1) ThrowInvalidArgument("chunk must be >= 1");
}

double NextSigma(double sigma, double epsilon, bool same_label) {
  return same_label ? std::min(sigma + epsilon, 1.0)
                    : std::max(sigma - epsilon, 0.0);
}

std::size_t MaskedCount(double sigma, std::size_t n) {
  const auto count = std::llround(sigma * static_cast<double>(n));
  return static_cast<std::size_t>(
      std::clamp<long long>(count, 0, static_cast<long long>(n)));
}

TestSuite GenerateTestSuite(Classifier& classifier, const Occluder& occluder,
                            const MutationParams& params) {
  params.Validate();
  const std::size_t n = occluder.unit_count();
  if (n == 0) ThrowInvalidArgument("image has no pixels");

  TestSuite suite;
  suite.params = params;
  suite.unit_count = n;
  suite.original_label = classifier.Classify(occluder.image());
  suite.mutants.reserve(params.m);
  suite.sigma_trace.reserve(params.m);

  Rng rng(params.seed);
  double sigma = params.sigma0 ? *params.sigma0 : rng.UniformOpenUnit();

  // Persistent permutation; each draw is a partial Fisher-Yates shuffle of
  // its first `count` slots, which yields a uniform subset every time.
  std::vector<PixelIndex> order(n);
  std::iota(order.begin(), order.end(), PixelIndex{0});

  std::vector<MaskSet> masks;
  std::vector<Raster> mutants;
  while (suite.mutants.size() < params.m) {
    const std::size_t batch =
        std::min(params.chunk, params.m - suite.mutants.size());
    masks.clear();
    mutants.clear();
    const double drawn_sigma = sigma;
    const std::size_t count = MaskedCount(sigma, n);
    for (std::size_t b = 0; b < batch; ++b) {
      MaskSet mask(n);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.UniformBelow(n - i);
        std::swap(order[i], order[j]);
        mask.set(order[i]);
      }
      mutants.push_back(occluder.Mask(mask));
      masks.push_back(std::move(mask));
    }
    const std::vector<Label> labels =
        batch == 1 ? std::vector<Label>{classifier.Classify(mutants.front())}
                   : classifier.ClassifyBatch(mutants);
    for (std::size_t b = 0; b < batch; ++b) {
      const bool same = labels[b] == suite.original_label;
      suite.sigma_trace.push_back(drawn_sigma);
      suite.mutants.push_back({std::move(masks[b]), same});
      sigma = NextSigma(sigma, params.epsilon, same);
    }
  }
  return suite;
}

std::pair<std::size_t, std::size_t> SuiteBalance(const TestSuite& suite) {
  const auto same = static_cast<std::size_t>(std::ranges::count_if(
      suite.mutants, [](const AnnotatedMutant& m) { return m.same_label; }));
  return {same, suite.mutants.size() - same};
}

}  // namespace sflx
