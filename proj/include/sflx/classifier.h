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

#ifndef SFLX_CLASSIFIER_H_
#define SFLX_CLASSIFIER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sflx/raster.h"

namespace sflx {

// Class identity; compared by exact string equality.
using Label = std::string;

// Black-box classifier N[.]: one top label per image.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Label Classify(const Raster& image) = 0;

  // Element-wise equal to sequential Classify, order preserved.
  virtual std::vector<Label> ClassifyBatch(std::span<const Raster> images);

  // True when Classify may be called from several threads at once.
  virtual bool thread_safe() const { return true; }

  virtual std::string_view kind() const = 0;
};

// Synthetic monotone oracle: target label iff at least k pixels of the secret
// set are unmasked, where "unmasked" means some channel differs from bg.
class KOfSClassifier final : public Classifier {
 public:
  KOfSClassifier(std::vector<PixelIndex> secret, int k, BackgroundColor bg,
                 Label target = "y-target", Label other = "other");

  Label Classify(const Raster& image) override;
  std::string_view kind() const override { return "builtin-kofs"; }

  std::span<const PixelIndex> secret() const { return secret_; }
  int k() const { return k_; }
  const Label& target() const { return target_; }
  const Label& other() const { return other_; }
  std::size_t CountPresent(const Raster& image) const;

 private:
  std::vector<PixelIndex> secret_;
  int k_;
  BackgroundColor bg_;
  Label target_;
  Label other_;
};

// Linear threshold over raw intensities: "pos" iff sum_i w_i * byte_i >= t,
// one weight per data byte.
class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(std::vector<double> weights, double threshold,
                   Label positive = "pos", Label negative = "neg");

  // Weights drawn uniformly from [low, high) with Rng(seed).
  static LinearClassifier Random(std::size_t size, std::uint64_t seed,
                                 double threshold, double low = -1.0,
                                 double high = 1.0);

  Label Classify(const Raster& image) override;
  std::string_view kind() const override { return "builtin-linear"; }

  double Score(const Raster& image) const;
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  double threshold_;
  Label positive_;
  Label negative_;
};

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(Label label) : label_(std::move(label)) {}
  Label Classify(const Raster&) override { return label_; }
  std::string_view kind() const override { return "builtin-const"; }

 private:
  Label label_;
};

// Arbitrary classifier over tiny images (n <= 20) given as a table indexed by
// the bitmask of unmasked pixels (bit i set = pixel i differs from bg).
class TruthTableClassifier final : public Classifier {
 public:
  TruthTableClassifier(std::size_t pixel_count, std::vector<Label> table,
                       BackgroundColor bg);

  Label Classify(const Raster& image) override;
  std::string_view kind() const override { return "builtin-table"; }

  std::uint32_t PresentBits(const Raster& image) const;

 private:
  std::size_t n_;
  std::vector<Label> table_;
  BackgroundColor bg_;
};

// Position-independent patch detector: target iff at some placement at least
// `min_matches` of the patch's masked-in pixels appear with their exact colors
// and differ from bg.
class PatchClassifier final : public Classifier {
 public:
  PatchClassifier(Raster patch, MaskSet patch_mask, double min_fraction,
                  BackgroundColor bg, Label target = "target",
                  Label other = "other");

  Label Classify(const Raster& image) override;
  std::string_view kind() const override { return "builtin-patch"; }

  std::size_t min_matches() const { return min_matches_; }

 private:
  Raster patch_;
  std::vector<PixelIndex> cells_;  // patch pixels that take part in matching
  std::size_t min_matches_;
  BackgroundColor bg_;
  Label target_;
  Label other_;
};

// Builds a classifier from a spec string:
//   builtin:kofs:k=<k>:s=<i,j,...>[:target=<l>][:other=<l>][:bg=<c>]
//   builtin:linear:t=<threshold>:(w=<w,w,...>|seed=<s>:size=<n>)[:pos=..][:neg=..]
//   builtin:const:label=<l>
//   builtin:patch:file=<path>[:mask=<path>][:frac=<f>][:target=..][:other=..][:bg=<c>]
//   proc:<shell command line>
// `default_bg` is used when the classifier string needs a background and names none.
std::unique_ptr<Classifier> MakeClassifier(std::string_view spec,
                                           const BackgroundColor& default_bg);

}  // namespace sflx

#endif  // SFLX_CLASSIFIER_H_
