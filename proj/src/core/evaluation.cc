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

#include "sflx/evaluation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>

#include "sflx/errors.h"
#include "sflx/rng.h"

namespace sflx {

double ExplanationSize(const Explanation& explanation, std::size_t n) {
  if (n == 0) ThrowInvalidArgument("explanation size needs n > 0");
  return static_cast<double>(explanation.pixels.size()) / static_cast<double>(n);
}

DeletionResult DeletionCurve(Classifier& classifier, const Occluder& occluder,
                             const PixelRanking& ranking) {
  const std::size_t n = occluder.unit_count();
  if (ranking.size() != n) ThrowInvalidArgument("ranking size mismatch");
  const Label label = classifier.Classify(occluder.image());
  DeletionResult result;
  MaskSet mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask.set(ranking[i].pixel);
    ++result.queries_used;
    if (classifier.Classify(occluder.Mask(mask)) != label) {
      result.flipped = true;
      result.flip_index = i + 1;
      result.flip_fraction =
          static_cast<double>(i + 1) / static_cast<double>(n);
      return result;
    }
  }
  result.flip_index = n;
  result.flip_fraction = 1.0;
  return result;
}

double Iou(std::span<const PixelIndex> a, std::span<const PixelIndex> b) {
  std::vector<PixelIndex> sa(a.begin(), a.end());
  std::vector<PixelIndex> sb(b.begin(), b.end());
  std::ranges::sort(sa);
  std::ranges::sort(sb);
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  std::vector<PixelIndex> inter;
  std::ranges::set_intersection(sa, sb, std::back_inserter(inter));
  const std::size_t uni = sa.size() + sb.size() - inter.size();
  if (uni == 0) return 0.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni);
}

std::vector<ChimeraSample> ChimeraGenerate(const ChimeraSpec& spec,
                                           Classifier& classifier) {
  const Raster& patch = spec.patch;
  if (patch.empty()) ThrowInvalidArgument("chimera: empty patch");
  if (spec.patch_mask.size() != patch.pixel_count()) {
    ThrowInvalidArgument("chimera: patch mask size mismatch");
  }
  const std::vector<PixelIndex> cells = spec.patch_mask.Indices();
  if (cells.empty()) ThrowInvalidArgument("chimera: patch mask is empty");

  Rng rng(spec.seed);
  std::vector<ChimeraSample> kept;
  for (std::size_t b = 0; b < spec.backgrounds.size(); ++b) {
    const Raster& background = spec.backgrounds[b];
    if (background.channels() != patch.channels() ||
        background.width() < patch.width() ||
        background.height() < patch.height()) {
      ThrowInvalidArgument("chimera: patch does not fit background " +
                           std::to_string(b));
    }
    ChimeraSample sample;
    sample.background_index = b;
    sample.x = static_cast<int>(
        rng.UniformBelow(background.width() - patch.width() + 1));
    sample.y = static_cast<int>(
        rng.UniformBelow(background.height() - patch.height() + 1));
    sample.image = background;
    for (PixelIndex p : cells) {
      const int px = static_cast<int>(p) % patch.width();
      const int py = static_cast<int>(p) / patch.width();
      const auto at = static_cast<PixelIndex>((sample.y + py) * background.width() +
                                              sample.x + px);
      std::ranges::copy(patch.pixel(p), sample.image.mutable_pixel(at).begin());
      sample.truth.pixels.push_back(at);
    }
    std::ranges::sort(sample.truth.pixels);
    if (classifier.Classify(sample.image) == spec.target) {
      kept.push_back(std::move(sample));
    }
  }
  return kept;
}

std::size_t TopCountForPercent(int percent, std::size_t n) {
  const auto count = std::llround(static_cast<double>(percent) *
                                  static_cast<double>(n) / 100.0);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(count, 1LL)),
                                 1, n);
}

DetectionReport TopKIouDetect(const PixelRanking& ranking,
                              std::span<const PixelIndex> truth,
                              std::span<const double> thresholds) {
  const std::size_t n = ranking.size();
  DetectionReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  if (n == 0) {
    report.detected.assign(thresholds.size(), false);
    report.detected_at_truth_size.assign(thresholds.size(), false);
    return report;
  }
  std::vector<bool> in_truth(n, false);
  std::size_t truth_size = 0;
  for (PixelIndex p : truth) {
    if (p >= n) ThrowInvalidArgument("truth pixel outside the ranking");
    if (!in_truth[p]) ++truth_size;
    in_truth[p] = true;
  }
  // hits[k] = |top-k ∩ truth|; IoU(top-k) = hits / (k + |truth| - hits).
  std::vector<std::size_t> hits(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    hits[k + 1] = hits[k] + (in_truth[ranking[k].pixel] ? 1 : 0);
  }
  auto iou_top = [&](std::size_t k) {
    const std::size_t uni = k + truth_size - hits[k];
    return uni == 0 ? 0.0
                    : static_cast<double>(hits[k]) / static_cast<double>(uni);
  };
  for (int percent = 1; percent <= 100; ++percent) {
    const double v = iou_top(TopCountForPercent(percent, n));
    report.iou_by_percent.push_back(v);
    if (v > report.best_iou) {
      report.best_iou = v;
      report.best_percent = percent;
    }
  }
  report.iou_at_truth_size = truth_size == 0 ? 0.0 : iou_top(truth_size);
  for (double t : thresholds) {
    report.detected.push_back(report.best_iou >= t);
    report.detected_at_truth_size.push_back(report.iou_at_truth_size >= t);
  }
  return report;
}

BruteForceResult BruteForceMinExplanation(
    std::size_t n, const std::function<bool(std::uint32_t kept)>& sufficient) {
  if (n > kBruteForceMaxUnits) {
    ThrowInvalidArgument("brute force is limited to " +
                         std::to_string(kBruteForceMaxUnits) + " units");
  }
  const std::uint32_t subsets = std::uint32_t{1} << n;
  std::vector<bool> ok(subsets);
  for (std::uint32_t s = 0; s < subsets; ++s) ok[s] = sufficient(s);

  BruteForceResult result;
  for (std::uint32_t s = 0; s < subsets; ++s) {
    if (!ok[s]) continue;
    // Inclusion-minimal iff no proper subset is sufficient; checking the
    // subsets one element smaller is not enough without monotonicity.
    bool minimal = true;
    for (std::uint32_t sub = (s - 1) & s; minimal; sub = (sub - 1) & s) {
      if (ok[sub]) minimal = false;
      if (sub == 0) break;
    }
    if (s == 0) minimal = true;
    if (!minimal) continue;
    result.minimal_sets.push_back(s);
    const int size = std::popcount(s);
    if (result.min_size < 0 || size < result.min_size) result.min_size = size;
  }
  return result;
}

BruteForceResult BruteForceMinExplanation(std::size_t n,
                                          std::span<const Label> table) {
  if (n > kBruteForceMaxUnits) {
    ThrowInvalidArgument("brute force is limited to " +
                         std::to_string(kBruteForceMaxUnits) + " units");
  }
  if (table.size() != (std::size_t{1} << n)) {
    ThrowInvalidArgument("truth table must have 2^n entries");
  }
  const Label& full = table.back();
  return BruteForceMinExplanation(
      n, [&](std::uint32_t kept) { return table[kept] == full; });
}

Raster SyntheticImage(int width, int height, int channels, std::uint64_t seed) {
  if (width <= 0 || height <= 0) ThrowInvalidArgument("empty synthetic image");
  Rng rng(seed);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height *
                                 static_cast<std::size_t>(std::max(channels, 0)));
  for (auto& v : data) v = static_cast<std::uint8_t>(1 + rng.UniformBelow(255));
  return Raster(width, height, channels, std::move(data));
}

std::vector<std::pair<double, double>> SizeCdf(std::vector<double> sizes) {
  std::vector<std::pair<double, double>> cdf;
  if (sizes.empty()) return cdf;
  std::ranges::sort(sizes);
  const double total = static_cast<double>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i + 1 < sizes.size() && sizes[i + 1] == sizes[i]) continue;
    cdf.emplace_back(sizes[i], static_cast<double>(i + 1) / total);
  }
  return cdf;
}

}  // namespace sflx
