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

#include <algorithm>
#include <cctype>
#include <string>

#include "sflx/errors.h"

namespace sflx {

std::string_view SearchModeName(SearchMode mode) {
  switch (mode) {
    case SearchMode::kLinear:
      return "linear";
    case SearchMode::kBinary:
      return "binary";
    case SearchMode::kAuto:
      return "auto";
  }
  return "auto";
}

std::optional<SearchMode> ParseSearchMode(std::string_view name) {
  if (name == "linear") return SearchMode::kLinear;
  if (name == "binary") return SearchMode::kBinary;
  if (name == "auto") return SearchMode::kAuto;
  return std::nullopt;
}

bool IsSufficient(Classifier& classifier, const Occluder& occluder,
                  std::span<const PixelIndex> units, const Label& label) {
  return classifier.Classify(occluder.KeepOnly(units)) == label;
}

Explanation BuildExplanation(Classifier& classifier, const Occluder& occluder,
                             const PixelRanking& ranking, Measure measure,
                             SearchMode mode, const Label* expected_label) {
  const std::size_t n = occluder.unit_count();
  if (ranking.size() != n) {
    ThrowInvalidArgument("ranking covers " + std::to_string(ranking.size()) +
                         " units, image has " + std::to_string(n));
  }
  const Label label = classifier.Classify(occluder.image());
  if (expected_label != nullptr && label != *expected_label) {
    throw Error(ErrorCode::kClassifierIo,
                "nondeterministic classifier: original image now labeled '" +
                    label + "', test suite recorded '" + *expected_label + "'");
  }
  if (mode == SearchMode::kAuto) {
    mode = n > kAutoBinaryThreshold ? SearchMode::kBinary : SearchMode::kLinear;
  }

  Explanation out;
  out.measure = measure;
  out.sufficient_label = label;
  const std::vector<PixelIndex> order = TopPixels(ranking, n);
  auto sufficient = [&](std::size_t length) {
    ++out.queries_used;
    return IsSufficient(classifier, occluder,
                        std::span<const PixelIndex>(order).first(length), label);
  };

  std::size_t length = 0;
  if (mode == SearchMode::kLinear) {
    for (std::size_t l = 1; l <= n; ++l) {
      if (sufficient(l)) {
        length = l;
        break;
      }
    }
  } else {
    // lo: longest prefix known insufficient (0 = untested empty prefix).
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t probe = 1;; probe = std::min(probe * 2, n)) {
      if (sufficient(probe)) {
        hi = probe;
        break;
      }
      lo = probe;
      if (probe == n) break;
    }
    if (hi != 0) {
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (sufficient(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      length = hi;
    }
  }
  if (length == 0) {
    // The full prefix is the original image itself.
    throw Error(ErrorCode::kClassifierIo,
                "nondeterministic classifier: the full image no longer "
                "reproduces label '" + label + "'");
  }
  out.pixels.assign(order.begin(), order.begin() + static_cast<long>(length));
  return out;
}

Explanation PruneExplanation(Classifier& classifier, const Occluder& occluder,
                             const Explanation& explanation) {
  Explanation out = explanation;
  out.pruned = true;
  const Label& label = explanation.sufficient_label;
  std::vector<PixelIndex> candidate;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = out.pixels.size(); i-- > 0;) {
      candidate = out.pixels;
      candidate.erase(candidate.begin() + static_cast<long>(i));
      ++out.queries_used;
      if (IsSufficient(classifier, occluder, candidate, label)) {
        out.pixels = std::move(candidate);
        changed = true;
      }
    }
  }
  return out;
}

BestExplanation ExplainBest(Classifier& classifier, const Occluder& occluder,
                            const TestSuite& suite,
                            std::span<const Measure> measures,
                            const ExplainOptions& options) {
  if (measures.empty()) ThrowInvalidArgument("no measure requested");
  const std::vector<SpectrumVector> spectra =
      ComputeSpectra(suite, occluder.unit_count());

  BestExplanation best;
  for (Measure measure : measures) {
    MeasureResult result{measure, RankPixels(spectra, measure, options.role), {}};
    result.explanation =
        BuildExplanation(classifier, occluder, result.ranking, measure,
                         options.search, &suite.original_label);
    if (options.prune) {
      result.explanation =
          PruneExplanation(classifier, occluder, result.explanation);
    }
    best.per_measure.push_back(std::move(result));
  }

  auto declared = [](Measure m) {
    return std::ranges::find(kAllMeasures, m) - kAllMeasures.begin();
  };
  const MeasureResult* winner = &best.per_measure.front();
  for (const MeasureResult& r : best.per_measure) {
    const std::size_t size = r.explanation.pixels.size();
    const std::size_t best_size = winner->explanation.pixels.size();
    if (size < best_size ||
        (size == best_size && declared(r.measure) < declared(winner->measure))) {
      winner = &r;
    }
  }
  best.measure = winner->measure;
  best.explanation = winner->explanation;
  return best;
}

}  // namespace sflx
