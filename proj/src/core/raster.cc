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

#include "sflx/raster.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

#include "sflx/errors.h"

namespace sflx {

Raster::Raster(int width, int height, int channels,
               std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    ThrowInvalidArgument("raster dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    ThrowInvalidArgument("raster channels must be 1 or 3, got " +
                         std::to_string(channels));
  }
  const std::size_t expected = static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(channels);
  if (data_.size() != expected) {
    ThrowInvalidArgument("raster data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(expected));
  }
}

Raster Raster::Filled(int width, int height,
                      std::span<const std::uint8_t> color) {
  const int channels = static_cast<int>(color.size());
  std::vector<std::uint8_t> data;
  if (width > 0 && height > 0) {
    data.reserve(static_cast<std::size_t>(width) * height * color.size());
    for (long i = 0; i < static_cast<long>(width) * height; ++i) {
      data.insert(data.end(), color.begin(), color.end());
    }
  }
  return Raster(width, height, channels, std::move(data));
}

BackgroundColor BackgroundColor::Parse(const std::string& text) {
  std::vector<std::uint8_t> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    int v = -1;
    const auto [end, ec] =
        std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size() || v < 0 ||
        v > 255) {
      ThrowInvalidArgument("bad background color component '" + item + "'");
    }
    values.push_back(static_cast<std::uint8_t>(v));
  }
  if (values.size() != 1 && values.size() != 3) {
    ThrowInvalidArgument("background color needs 1 or 3 components: '" +
                         text + "'");
  }
  return BackgroundColor(std::move(values));
}

BackgroundColor BackgroundColor::ForChannels(int channels) const {
  if (channels == this->channels()) return *this;
  if (values_.size() == 1) {
    return BackgroundColor(std::vector<std::uint8_t>(channels, values_[0]));
  }
  ThrowInvalidArgument("background color has " +
                       std::to_string(this->channels()) +
                       " channels, image has " + std::to_string(channels));
}

bool BackgroundColor::Differs(std::span<const std::uint8_t> pixel) const {
  return !std::equal(pixel.begin(), pixel.end(), values_.begin(),
                     values_.end());
}

MaskSet::MaskSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

MaskSet MaskSet::FromIndices(std::size_t size, std::span<const PixelIndex> set) {
  MaskSet mask(size);
  for (PixelIndex i : set) {
    if (i >= size) {
      ThrowInvalidArgument("pixel index " + std::to_string(i) +
                           " out of range for " + std::to_string(size));
    }
    mask.set(i);
  }
  return mask;
}

std::size_t MaskSet::count() const {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

MaskSet MaskSet::Complement() const {
  MaskSet out(size_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = ~words_[w];
  if (size_ % 64 != 0 && !out.words_.empty()) {
    out.words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
  return out;
}

MaskSet MaskSet::Union(const MaskSet& other) const {
  if (other.size_ != size_) ThrowInvalidArgument("mask size mismatch");
  MaskSet out = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] |= other.words_[w];
  return out;
}

std::vector<PixelIndex> MaskSet::Indices() const {
  std::vector<PixelIndex> out;
  out.reserve(count());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      const int b = std::countr_zero(bits);
      out.push_back(static_cast<PixelIndex>(w * 64 + b));
      bits &= bits - 1;
    }
  }
  return out;
}

std::vector<std::uint8_t> MaskSet::ToBytes() const {
  std::vector<std::uint8_t> bytes((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(words_[i / 8] >> ((i % 8) * 8));
  }
  return bytes;
}

MaskSet MaskSet::FromBytes(std::size_t size,
                           std::span<const std::uint8_t> bytes) {
  if (bytes.size() != (size + 7) / 8) {
    ThrowInvalidArgument("mask byte length does not match mask size");
  }
  MaskSet mask(size);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    mask.words_[i / 8] |= std::uint64_t{bytes[i]} << ((i % 8) * 8);
  }
  if (mask.count() != 0 && mask.Indices().back() >= size) {
    ThrowInvalidArgument("mask bytes set bits beyond mask size");
  }
  return mask;
}

Raster ApplyMask(const Raster& image, const MaskSet& mask,
                 const BackgroundColor& bg) {
  if (mask.size() != image.pixel_count()) {
    ThrowInvalidArgument("mask length " + std::to_string(mask.size()) +
                         " does not match pixel count " +
                         std::to_string(image.pixel_count()));
  }
  if (bg.channels() != image.channels()) {
    ThrowInvalidArgument("background color channel count mismatch");
  }
  Raster out = image;
  for (PixelIndex i : mask.Indices()) {
    std::ranges::copy(bg.values(), out.mutable_pixel(i).begin());
  }
  return out;
}

Raster KeepOnly(const Raster& image, std::span<const PixelIndex> keep,
                const BackgroundColor& bg) {
  const MaskSet kept = MaskSet::FromIndices(image.pixel_count(), keep);
  return ApplyMask(image, kept.Complement(), bg);
}

PixelGrid::PixelGrid(int width, int height, int cell_size)
    : width_(width), height_(height), cell_(cell_size) {
  if (width <= 0 || height <= 0) ThrowInvalidArgument("empty grid");
  if (cell_size < 1) ThrowInvalidArgument("cell size must be >= 1");
  cols_ = (width + cell_size - 1) / cell_size;
  rows_ = (height + cell_size - 1) / cell_size;
}

PixelIndex PixelGrid::UnitOf(PixelIndex pixel) const {
  const int x = static_cast<int>(pixel) % width_;
  const int y = static_cast<int>(pixel) / width_;
  return static_cast<PixelIndex>((y / cell_) * cols_ + x / cell_);
}

std::vector<PixelIndex> PixelGrid::PixelsOf(PixelIndex unit) const {
  const int x0 = UnitColumn(unit) * cell_;
  const int y0 = UnitRow(unit) * cell_;
  std::vector<PixelIndex> out;
  for (int y = y0; y < std::min(y0 + cell_, height_); ++y) {
    for (int x = x0; x < std::min(x0 + cell_, width_); ++x) {
      out.push_back(static_cast<PixelIndex>(y * width_ + x));
    }
  }
  return out;
}

MaskSet PixelGrid::ExpandMask(const MaskSet& unit_mask) const {
  if (unit_mask.size() != unit_count()) {
    ThrowInvalidArgument("unit mask length " +
                         std::to_string(unit_mask.size()) +
                         " does not match unit count " +
                         std::to_string(unit_count()));
  }
  if (cell_ == 1) return unit_mask;
  MaskSet out(pixel_count());
  for (PixelIndex unit : unit_mask.Indices()) {
    for (PixelIndex p : PixelsOf(unit)) out.set(p);
  }
  return out;
}

std::vector<PixelIndex> PixelGrid::UnitsCovering(
    std::span<const PixelIndex> pixels) const {
  std::vector<PixelIndex> out;
  out.reserve(pixels.size());
  for (PixelIndex p : pixels) {
    if (p >= pixel_count()) ThrowInvalidArgument("pixel index out of range");
    out.push_back(UnitOf(p));
  }
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Occluder::Occluder(Raster image, BackgroundColor bg, int cell_size)
    : image_(std::move(image)),
      bg_(bg.ForChannels(image_.channels())),
      grid_(image_.width(), image_.height(), cell_size) {}

Raster Occluder::Mask(const MaskSet& unit_mask) const {
  return ApplyMask(image_, grid_.ExpandMask(unit_mask), bg_);
}

Raster Occluder::KeepOnly(std::span<const PixelIndex> units) const {
  return Mask(MaskSet::FromIndices(unit_count(), units).Complement());
}

}  // namespace sflx
