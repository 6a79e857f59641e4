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

#ifndef SFLX_RASTER_H_
#define SFLX_RASTER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sflx {

// Index into the pixel space [0, width*height). A pixel spans all channels.
using PixelIndex = std::uint32_t;

// 8-bit raster, row-major from the top-left corner, channels interleaved.
class Raster {
 public:
  Raster() = default;
  // Throws kInvalidArgument unless data.size() == width*height*channels and
  // channels is 1 or 3.
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  static Raster Filled(int width, int height,
                       std::span<const std::uint8_t> color);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return data_.empty(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> mutable_data() { return data_; }

  std::span<const std::uint8_t> pixel(PixelIndex index) const {
    return std::span<const std::uint8_t>(data_).subspan(
        static_cast<std::size_t>(index) * channels_, channels_);
  }
  std::span<std::uint8_t> mutable_pixel(PixelIndex index) {
    return std::span<std::uint8_t>(data_).subspan(
        static_cast<std::size_t>(index) * channels_, channels_);
  }

  bool SameShape(const Raster& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Replacement color for masked pixels, one byte per channel.
class BackgroundColor {
 public:
  BackgroundColor() = default;
  explicit BackgroundColor(std::vector<std::uint8_t> values)
      : values_(std::move(values)) {}

  static BackgroundColor Black(int channels) {
    return BackgroundColor(std::vector<std::uint8_t>(channels, 0));
  }

  // Parses "v" or "v,v,v" (each 0..255).
  static BackgroundColor Parse(const std::string& text);

  int channels() const { return static_cast<int>(values_.size()); }
  std::span<const std::uint8_t> values() const { return values_; }

  // Broadcasts a one-value color to `channels`; otherwise requires a match.
  BackgroundColor ForChannels(int channels) const;

  // True when any channel of `pixel` differs from this color.
  bool Differs(std::span<const std::uint8_t> pixel) const;

  friend bool operator==(const BackgroundColor&,
                         const BackgroundColor&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

// Fixed-size bitset over pixel (or cell) indices; set bits are masked.
class MaskSet {
 public:
  MaskSet() = default;
  explicit MaskSet(std::size_t size);
  static MaskSet FromIndices(std::size_t size, std::span<const PixelIndex> set);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  std::size_t count() const;

  MaskSet Complement() const;
  MaskSet Union(const MaskSet& other) const;
  std::vector<PixelIndex> Indices() const;

  // Little-endian byte image of the bitset: bit i lives in byte i/8 at
  // position i%8. Trailing bits of the last byte are zero.
  std::vector<std::uint8_t> ToBytes() const;
  static MaskSet FromBytes(std::size_t size, std::span<const std::uint8_t> bytes);

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const MaskSet&, const MaskSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Returns `image` with every masked pixel replaced by `bg`.
Raster ApplyMask(const Raster& image, const MaskSet& mask,
                 const BackgroundColor& bg);

// Returns `image` with every pixel outside `keep` replaced by `bg`.
Raster KeepOnly(const Raster& image, std::span<const PixelIndex> keep,
                const BackgroundColor& bg);

// Partition of the pixel grid into g x g cells; cells on the right and bottom
// edges may be smaller. With cell size 1 cells and pixels coincide.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, int cell_size = 1);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_size() const { return cell_; }
  int columns() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t unit_count() const {
    return static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  // Row/column of a unit in cell coordinates.
  int UnitRow(PixelIndex unit) const { return static_cast<int>(unit) / cols_; }
  int UnitColumn(PixelIndex unit) const {
    return static_cast<int>(unit) % cols_;
  }

  PixelIndex UnitOf(PixelIndex pixel) const;
  std::vector<PixelIndex> PixelsOf(PixelIndex unit) const;

  MaskSet ExpandMask(const MaskSet& unit_mask) const;
  // Every unit containing at least one of `pixels`, ascending.
  std::vector<PixelIndex> UnitsCovering(std::span<const PixelIndex> pixels) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int cell_ = 1;
  int cols_ = 0;
  int rows_ = 0;
};

// An image bundled with its masking parameters. All explanation machinery
// works in unit space through this type.
class Occluder {
 public:
  Occluder(Raster image, BackgroundColor bg, int cell_size = 1);

  const Raster& image() const { return image_; }
  const BackgroundColor& background() const { return bg_; }
  const PixelGrid& grid() const { return grid_; }
  std::size_t unit_count() const { return grid_.unit_count(); }

  Raster Mask(const MaskSet& unit_mask) const;
  Raster KeepOnly(std::span<const PixelIndex> units) const;

 private:
  Raster image_;
  BackgroundColor bg_;
  PixelGrid grid_;
};

}  // namespace sflx

#endif  // SFLX_RASTER_H_
