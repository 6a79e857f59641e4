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

#ifndef SFLX_IMAGE_IO_H_
#define SFLX_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "sflx/raster.h"

namespace sflx {

// Supported: PNG (8-bit gray, RGB, palette expanded to RGB) and binary
// PGM/PPM (P5/P6, maxval 255). The format is sniffed from the file contents.
// Anything else raises kUnsupportedFormat; unreadable files raise kIo.
Raster LoadImage(const std::filesystem::path& path);
Raster DecodeImage(std::span<const std::uint8_t> bytes);

// Format chosen from the extension: .png, .pgm, .ppm (.pnm picks by
// channel count). Written atomically.
void SaveImage(const Raster& raster, const std::filesystem::path& path);

std::vector<std::uint8_t> EncodePng(const Raster& raster);
std::vector<std::uint8_t> EncodePnm(const Raster& raster);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sflx

#endif  // SFLX_IMAGE_IO_H_
