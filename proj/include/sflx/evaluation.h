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

#ifndef SFLX_EVALUATION_H_
#define SFLX_EVALUATION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sflx/classifier.h"
#include "sflx/explanation.h"
#include "sflx/raster.h"
#include "sflx/spectrum.h"

namespace sflx {

// |pixels| / n. Throws kInvalidArgument for n == 0.
double ExplanationSize(const Explanation& explanation, std::size_t n);

struct DeletionResult {
  std::size_t flip_index = 0;  // ranked units masked at the first label change
  double flip_fraction = 1.0;  // flip_index / n, or 1.0 when never flipped
  bool flipped = false;
  std::size_t queries_used = 0;
};

// Masks ranked units cumulatively in ranking order until the label differs
// from the original one.
DeletionResult DeletionCurve(Classifier& classifier, const Occluder& occluder,
                             const PixelRanking& ranking);

// |a ∩ b| / |a ∪ b| over index sets (duplicates ignored); 0 when both empty.
double Iou(std::span<const PixelIndex> a, std::span<const PixelIndex> b);

struct GroundTruthMask {
  std::vector<PixelIndex> pixels;  // ascending
};

struct ChimeraSpec {
  Raster patch;
  MaskSet patch_mask;  // over patch pixels; the pasted region
  std::vector<Raster> backgrounds;
  std::uint64_t seed = 0;
  Label target;
};

struct ChimeraSample {
  Raster image;
  GroundTruthMask truth;
  std::size_t background_index = 0;
  int x = 0;  // top-left of the pasted patch
  int y = 0;
};

// Pastes the patch at a seeded uniform offset into every background and keeps
// the composites the classifier labels `target`. May return an empty list.
std::vector<ChimeraSample> ChimeraGenerate(const ChimeraSpec& spec,
                                           Classifier& classifier);

inline constexpr double kDefaultDetectionThresholds[] = {0.5, 0.6, 0.7};

struct DetectionReport {
  // IoU of the top-p% set with the truth, p = 1..100; index p-1.
  std::vector<double> iou_by_percent;
  double best_iou = 0.0;
  int best_percent = 0;
  double iou_at_truth_size = 0.0;  // top-|truth| set
  std::vector<double> thresholds;
  std::vector<bool> detected;                // best_iou >= threshold
  std::vector<bool> detected_at_truth_size;  // iou_at_truth_size >= threshold
};

// Number of top entries taken for p percent of n units (at least one).
std::size_t TopCountForPercent(int percent, std::size_t n);

DetectionReport TopKIouDetect(const PixelRanking& ranking,
                              std::span<const PixelIndex> truth,
                              std::span<const double> thresholds);

struct BruteForceResult {
  // Inclusion-minimal sufficient subsets as bitmasks of kept units.
  std::vector<std::uint32_t> minimal_sets;
  int min_size = -1;  // -1 when nothing is sufficient
};

inline constexpr std::size_t kBruteForceMaxUnits = 12;

// Exhaustive search over all 2^n subsets of kept units; n <= 12.
BruteForceResult BruteForceMinExplanation(
    std::size_t n, const std::function<bool(std::uint32_t kept)>& sufficient);

// Table form: table[kept bitmask] is the label of the image with exactly those
// units kept; sufficient means equal to table[all units].
BruteForceResult BruteForceMinExplanation(std::size_t n,
                                          std::span<const Label> table);

// Image with intensities uniform in [1,255] (never black) from Rng(seed).
Raster SyntheticImage(int width, int height, int channels, std::uint64_t seed);

// Empirical CDF over explanation sizes: sorted unique x, fraction <= x.
std::vector<std::pair<double, double>> SizeCdf(std::vector<double> sizes);

}  // namespace sflx

#endif  // SFLX_EVALUATION_H_
