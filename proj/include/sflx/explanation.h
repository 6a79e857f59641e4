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

#ifndef SFLX_EXPLANATION_H_
#define SFLX_EXPLANATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sflx/classifier.h"
#include "sflx/mutation.h"
#include "sflx/raster.h"
#include "sflx/spectrum.h"

namespace sflx {

// How the shortest sufficient ranking prefix is located.
//   kLinear  one query per prefix length, in order.
//   kBinary  exponential probing then bisection; the same prefix as kLinear
//            whenever sufficiency is monotone along the ranking.
//   kAuto    kBinary above kAutoBinaryThreshold units, else kLinear.
enum class SearchMode { kLinear, kBinary, kAuto };

inline constexpr std::size_t kAutoBinaryThreshold = 4096;

std::string_view SearchModeName(SearchMode mode);
std::optional<SearchMode> ParseSearchMode(std::string_view name);

struct Explanation {
  std::vector<PixelIndex> pixels;  // units, in addition order
  Measure measure = Measure::kOchiai;
  Label sufficient_label;  // label of the image with only `pixels` kept
  std::size_t queries_used = 0;
  bool pruned = false;
};

// Classifies the image with only `units` kept and compares to `label`.
bool IsSufficient(Classifier& classifier, const Occluder& occluder,
                  std::span<const PixelIndex> units, const Label& label);

// Shortest ranking prefix whose kept-only image keeps the original label.
// The empty prefix is never tried. The original label is re-established
// first; when `expected_label` is given and differs, kClassifierIo is raised.
Explanation BuildExplanation(Classifier& classifier, const Occluder& occluder,
                             const PixelRanking& ranking, Measure measure,
                             SearchMode mode = SearchMode::kAuto,
                             const Label* expected_label = nullptr);

// Greedy removal in reverse addition order, repeated until no single pixel can
// be dropped. The input must be sufficient. May return an empty explanation.
Explanation PruneExplanation(Classifier& classifier, const Occluder& occluder,
                             const Explanation& explanation);

struct ExplainOptions {
  SearchMode search = SearchMode::kAuto;
  SpectrumRole role = SpectrumRole::kMasking;
  bool prune = false;
};

struct MeasureResult {
  Measure measure;
  PixelRanking ranking;
  Explanation explanation;
};

struct BestExplanation {
  Measure measure;
  Explanation explanation;
  std::vector<MeasureResult> per_measure;  // in request order
};

// Runs the explanation for every requested measure on the shared suite and
// keeps the smallest; ties go to the earlier measure in kAllMeasures order.
BestExplanation ExplainBest(Classifier& classifier, const Occluder& occluder,
                            const TestSuite& suite,
                            std::span<const Measure> measures,
                            const ExplainOptions& options = {});

}  // namespace sflx

#endif  // SFLX_EXPLANATION_H_
