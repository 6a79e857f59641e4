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

#ifndef SFLX_SPECTRUM_H_
#define SFLX_SPECTRUM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sflx/mutation.h"
#include "sflx/raster.h"

namespace sflx {

// Per-pixel mutant counts. Passing = annotated y, failing = annotated not-y;
// "executed" = the pixel is left unmasked in the mutant.
struct SpectrumVector {
  std::uint64_t ep = 0;
  std::uint64_t ef = 0;
  std::uint64_t np = 0;
  std::uint64_t nf = 0;

  std::uint64_t total() const { return ep + ef + np + nf; }
  friend bool operator==(const SpectrumVector&, const SpectrumVector&) = default;
};

enum class Measure { kOchiai, kTarantula, kZoltar, kWongII };

// Declaration order; also the tie-break order for ExplainBest.
inline constexpr std::array<Measure, 4> kAllMeasures = {
    Measure::kOchiai, Measure::kTarantula, Measure::kZoltar, Measure::kWongII};

std::string_view MeasureName(Measure measure);
// Case-insensitive; accepts "wong-ii", "wongii", "wong2".
std::optional<Measure> ParseMeasure(std::string_view name);

// Which pixel state plays the role of an executed statement when scoring.
//   kMasking:  masked counts as executed. Scores pixels whose removal goes
//              with label changes; this is the default for ranking.
//   kPresence: unmasked counts as executed, i.e. the counts exactly as
//              ComputeSpectra stores them.
enum class SpectrumRole { kMasking, kPresence };

std::string_view SpectrumRoleName(SpectrumRole role);
std::optional<SpectrumRole> ParseSpectrumRole(std::string_view name);

// Counts as defined on SpectrumVector. Throws kInvalidArgument when a mask's
// length differs from n.
std::vector<SpectrumVector> ComputeSpectra(const TestSuite& suite, std::size_t n);

// Re-expresses a stored spectrum in the given role (swaps executed and
// not-executed for kMasking).
SpectrumVector Oriented(const SpectrumVector& s, SpectrumRole role);

// Suspiciousness with fixed zero conventions:
//   Ochiai    0 when ef = 0
//   Tarantula a ratio with a zero denominator is 0; 0 when both ratios are 0
//   Zoltar    0 when ef = 0
//   Wong-II   ef - ep
double MeasureValue(Measure measure, const SpectrumVector& s);

struct RankedPixel {
  PixelIndex pixel;
  double value;
};

// Descending by value, ties by ascending pixel index.
using PixelRanking = std::vector<RankedPixel>;

PixelRanking RankByValues(std::span<const double> values);
PixelRanking RankPixels(std::span<const SpectrumVector> spectra, Measure measure,
                        SpectrumRole role = SpectrumRole::kMasking);

// Pixel indices of the first `count` ranking entries.
std::vector<PixelIndex> TopPixels(const PixelRanking& ranking, std::size_t count);

}  // namespace sflx

#endif  // SFLX_SPECTRUM_H_
