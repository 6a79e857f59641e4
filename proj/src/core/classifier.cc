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

#include "sflx/classifier.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "sflx/errors.h"
#include "sflx/external_classifier.h"
#include "sflx/image_io.h"
#include "sflx/rng.h"

namespace sflx {

std::vector<Label> Classifier::ClassifyBatch(std::span<const Raster> images) {
  std::vector<Label> labels;
  labels.reserve(images.size());
  for (const Raster& image : images) labels.push_back(Classify(image));
  return labels;
}

KOfSClassifier::KOfSClassifier(std::vector<PixelIndex> secret, int k,
                               BackgroundColor bg, Label target, Label other)
    : secret_(std::move(secret)),
      k_(k),
      bg_(std::move(bg)),
      target_(std::move(target)),
      other_(std::move(other)) {
  std::ranges::sort(secret_);
  secret_.erase(std::unique(secret_.begin(), secret_.end()), secret_.end());
  if (k_ < 0) ThrowInvalidArgument("kofs: k must be >= 0");
  if (bg_.channels() == 0) ThrowInvalidArgument("kofs: empty background");
}

std::size_t KOfSClassifier::CountPresent(const Raster& image) const {
  const BackgroundColor bg = bg_.ForChannels(image.channels());
  std::size_t present = 0;
  for (PixelIndex p : secret_) {
    if (p >= image.pixel_count()) {
      ThrowInvalidArgument("kofs: secret pixel " + std::to_string(p) +
                           " outside the image");
    }
    if (bg.Differs(image.pixel(p))) ++present;
  }
  return present;
}

Label KOfSClassifier::Classify(const Raster& image) {
  return CountPresent(image) >= static_cast<std::size_t>(k_) ? target_ : other_;
}

LinearClassifier::LinearClassifier(std::vector<double> weights,
                                   double threshold, Label positive,
                                   Label negative)
    : weights_(std::move(weights)),
      threshold_(threshold),
      positive_(std::move(positive)),
      negative_(std::move(negative)) {
  if (weights_.empty()) ThrowInvalidArgument("linear: no weights");
}

LinearClassifier LinearClassifier::Random(std::size_t size, std::uint64_t seed,
                                          double threshold, double low,
                                          double high) {
  Rng rng(seed);
  std::vector<double> weights(size);
  for (double& w : weights) w = low + (high - low) * rng.UniformUnit();
  return LinearClassifier(std::move(weights), threshold);
}

double LinearClassifier::Score(const Raster& image) const {
  if (image.data().size() != weights_.size()) {
    ThrowInvalidArgument("linear: image has " +
                         std::to_string(image.data().size()) +
                         " intensities, classifier expects " +
                         std::to_string(weights_.size()));
  }
  double sum = 0.0;
  const auto data = image.data();
  for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * data[i];
  return sum;
}

Label LinearClassifier::Classify(const Raster& image) {
  return Score(image) >= threshold_ ? positive_ : negative_;
}

TruthTableClassifier::TruthTableClassifier(std::size_t pixel_count,
                                           std::vector<Label> table,
                                           BackgroundColor bg)
    : n_(pixel_count), table_(std::move(table)), bg_(std::move(bg)) {
  if (n_ == 0 || n_ > 20) ThrowInvalidArgument("truth table: need 1..20 pixels");
  if (table_.size() != (std::size_t{1} << n_)) {
    ThrowInvalidArgument("truth table must have 2^n entries");
  }
}

std::uint32_t TruthTableClassifier::PresentBits(const Raster& image) const {
  if (image.pixel_count() != n_) {
    ThrowInvalidArgument("truth table: image pixel count mismatch");
  }
  const BackgroundColor bg = bg_.ForChannels(image.channels());
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (bg.Differs(image.pixel(static_cast<PixelIndex>(i)))) bits |= 1u << i;
  }
  return bits;
}

Label TruthTableClassifier::Classify(const Raster& image) {
  return table_[PresentBits(image)];
}

PatchClassifier::PatchClassifier(Raster patch, MaskSet patch_mask,
                                 double min_fraction, BackgroundColor bg,
                                 Label target, Label other)
    : patch_(std::move(patch)),
      bg_(bg.ForChannels(patch_.channels())),
      target_(std::move(target)),
      other_(std::move(other)) {
  if (patch_mask.size() != patch_.pixel_count()) {
    ThrowInvalidArgument("patch mask size does not match patch");
  }
  if (!(min_fraction > 0.0 && min_fraction <= 1.0)) {
    ThrowInvalidArgument("patch: fraction must be in (0,1]");
  }
  // Pixels equal to the background can never be observed as present.
  for (PixelIndex p : patch_mask.Indices()) {
    if (bg_.Differs(patch_.pixel(p))) cells_.push_back(p);
  }
  if (cells_.empty()) ThrowInvalidArgument("patch has no visible pixels");
  min_matches_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(min_fraction * cells_.size() - 1e-9)));
}

Label PatchClassifier::Classify(const Raster& image) {
  if (image.channels() != patch_.channels()) {
    ThrowInvalidArgument("patch: channel count mismatch");
  }
  const int pw = patch_.width();
  const int ph = patch_.height();
  if (image.width() < pw || image.height() < ph) return other_;
  const int c = image.channels();
  const auto img = image.data();
  const auto pat = patch_.data();
  for (int oy = 0; oy + ph <= image.height(); ++oy) {
    for (int ox = 0; ox + pw <= image.width(); ++ox) {
      std::size_t matches = 0;
      std::size_t remaining = cells_.size();
      for (PixelIndex p : cells_) {
        const int px = static_cast<int>(p) % pw;
        const int py = static_cast<int>(p) / pw;
        const std::size_t at =
            (static_cast<std::size_t>(oy + py) * image.width() + ox + px) * c;
        if (std::equal(pat.begin() + static_cast<std::size_t>(p) * c,
                       pat.begin() + static_cast<std::size_t>(p + 1) * c,
                       img.begin() + at)) {
          if (++matches >= min_matches_) return target_;
        }
        --remaining;
        if (matches + remaining < min_matches_) break;
      }
    }
  }
  return other_;
}

namespace {

std::map<std::string, std::string> ParseOptions(std::string_view rest,
                                                std::string_view kind) {
  std::map<std::string, std::string> out;
  std::stringstream stream{std::string(rest)};
  std::string item;
  while (std::getline(stream, item, ':')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      ThrowInvalidArgument(std::string(kind) + ": expected key=value, got '" +
                           item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string& text, const std::string& what) {
  T value{};
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    ThrowInvalidArgument("bad value for " + what + ": '" + text + "'");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(ParseNumber<T>(item, what));
  return out;
}

const std::string& Required(const std::map<std::string, std::string>& opts,
                            const std::string& key, std::string_view kind) {
  const auto it = opts.find(key);
  if (it == opts.end()) {
    ThrowInvalidArgument(std::string(kind) + ": missing '" + key + "='");
  }
  return it->second;
}

std::string Optional(const std::map<std::string, std::string>& opts,
                     const std::string& key, std::string fallback) {
  const auto it = opts.find(key);
  return it == opts.end() ? std::move(fallback) : it->second;
}

void CheckKeys(const std::map<std::string, std::string>& opts,
               std::initializer_list<std::string_view> allowed,
               std::string_view kind) {
  for (const auto& [key, value] : opts) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      ThrowInvalidArgument(std::string(kind) + ": unknown option '" + key + "'");
    }
  }
}

}  // namespace

std::unique_ptr<Classifier> MakeClassifier(std::string_view spec,
                                           const BackgroundColor& default_bg) {
  if (spec.starts_with("proc:")) {
    const std::string command(spec.substr(5));
    if (command.empty()) ThrowInvalidArgument("proc: empty command line");
    return std::make_unique<ExternalProcessClassifier>(command);
  }
  if (!spec.starts_with("builtin:")) {
    ThrowInvalidArgument("classifier spec must start with 'builtin:' or "
                         "'proc:': '" + std::string(spec) + "'");
  }
  const std::string_view body = spec.substr(8);
  const std::string_view kind = body.substr(0, body.find(':'));
  const std::string_view rest =
      kind.size() < body.size() ? body.substr(kind.size() + 1) : std::string_view();
  const auto opts = ParseOptions(rest, kind);
  auto background = [&] {
    return opts.contains("bg") ? BackgroundColor::Parse(opts.at("bg"))
                               : default_bg;
  };

  if (kind == "kofs") {
    CheckKeys(opts, {"k", "s", "target", "other", "bg"}, kind);
    return std::make_unique<KOfSClassifier>(
        ParseList<PixelIndex>(Required(opts, "s", kind), "s"),
        ParseNumber<int>(Required(opts, "k", kind), "k"), background(),
        Optional(opts, "target", "y-target"), Optional(opts, "other", "other"));
  }
  if (kind == "linear") {
    CheckKeys(opts, {"t", "w", "seed", "size", "pos", "neg"}, kind);
    const double t = ParseNumber<double>(Required(opts, "t", kind), "t");
    std::vector<double> weights;
    if (opts.contains("w")) {
      weights = ParseList<double>(opts.at("w"), "w");
    } else {
      const LinearClassifier random = LinearClassifier::Random(
          ParseNumber<std::size_t>(Required(opts, "size", kind), "size"),
          ParseNumber<std::uint64_t>(Required(opts, "seed", kind), "seed"), t);
      weights.assign(random.weights().begin(), random.weights().end());
    }
    return std::make_unique<LinearClassifier>(std::move(weights), t,
                                              Optional(opts, "pos", "pos"),
                                              Optional(opts, "neg", "neg"));
  }
  if (kind == "const") {
    CheckKeys(opts, {"label"}, kind);
    return std::make_unique<ConstantClassifier>(Required(opts, "label", kind));
  }
  if (kind == "patch") {
    CheckKeys(opts, {"file", "mask", "frac", "target", "other", "bg"}, kind);
    Raster patch = LoadImage(Required(opts, "file", kind));
    MaskSet mask(patch.pixel_count());
    if (opts.contains("mask")) {
      const Raster m = LoadImage(opts.at("mask"));
      if (m.width() != patch.width() || m.height() != patch.height()) {
        ThrowInvalidArgument("patch: mask size differs from patch");
      }
      for (PixelIndex p = 0; p < m.pixel_count(); ++p) {
        const auto px = m.pixel(p);
        if (std::any_of(px.begin(), px.end(), [](auto v) { return v != 0; })) {
          mask.set(p);
        }
      }
    } else {
      mask = mask.Complement();
    }
    const double frac =
        ParseNumber<double>(Optional(opts, "frac", "0.5"), "frac");
    return std::make_unique<PatchClassifier>(
        std::move(patch), std::move(mask), frac, background(),
        Optional(opts, "target", "target"), Optional(opts, "other", "other"));
  }
  ThrowInvalidArgument("unknown builtin classifier '" + std::string(kind) + "'");
}

}  // namespace sflx
