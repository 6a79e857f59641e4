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

#include "sflx/image_io.h"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "sflx/errors.h"

namespace sflx {
namespace {

[[noreturn]] void Unsupported(const std::string& what) {
  throw Error(ErrorCode::kUnsupportedFormat, what);
}

bool IsPng(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSignature[8] = {0x89, 'P',  'N',  'G',
                                                 '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(kSignature, kSignature + 8, bytes.begin());
}

Raster DecodePng(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    Unsupported(std::string("cannot decode PNG: ") + image.message);
  }
  // The simplified API reports the file's own format before any conversion.
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    Unsupported("16-bit PNG is not supported");
  }
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    Unsupported("PNG with alpha channel is not supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    Unsupported("cannot decode PNG: " + message);
  }
  return Raster(static_cast<int>(image.width), static_cast<int>(image.height),
                channels, std::move(data));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string PnmToken(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  return token;
}

int PnmInt(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  const std::string token = PnmToken(bytes, pos);
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit) ||
      token.size() > 9) {
    Unsupported("malformed PNM header");
  }
  return std::stoi(token);
}

Raster DecodePnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  const int channels = bytes[1] == '5' ? 1 : 3;
  const int width = PnmInt(bytes, pos);
  const int height = PnmInt(bytes, pos);
  const int maxval = PnmInt(bytes, pos);
  if (maxval != 255) {
    Unsupported("PNM maxval " + std::to_string(maxval) + " is not supported");
  }
  if (width <= 0 || height <= 0) Unsupported("PNM has empty dimensions");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    Unsupported("malformed PNM header");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t length = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - pos < length) Unsupported("truncated PNM raster");
  std::vector<std::uint8_t> data(bytes.begin() + pos,
                                 bytes.begin() + pos + length);
  return Raster(width, height, channels, std::move(data));
}

std::string Lowercase(std::string s) {
  std::ranges::transform(s, s.begin(),
                         [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Raster DecodeImage(std::span<const std::uint8_t> bytes) {
  if (IsPng(bytes)) return DecodePng(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '6')) {
    return DecodePnm(bytes);
  }
  Unsupported("unrecognized image format");
}

Raster LoadImage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read image " + path.string());
  return DecodeImage(bytes);
}

std::vector<std::uint8_t> EncodePng(const Raster& raster) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = raster.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0,
                                 raster.data().data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0,
                                 raster.data().data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> EncodePnm(const Raster& raster) {
  const std::string header = std::string(raster.channels() == 1 ? "P5" : "P6") +
                             "\n" + std::to_string(raster.width()) + " " +
                             std::to_string(raster.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.data().begin(), raster.data().end());
  return out;
}

void SaveImage(const Raster& raster, const std::filesystem::path& path) {
  if (raster.empty()) ThrowInvalidArgument("cannot save an empty raster");
  const std::string ext = Lowercase(path.extension().string());
  std::vector<std::uint8_t> bytes;
  if (ext == ".png") {
    bytes = EncodePng(raster);
  } else if (ext == ".pnm" || (ext == ".pgm" && raster.channels() == 1) ||
             (ext == ".ppm" && raster.channels() == 3)) {
    bytes = EncodePnm(raster);
  } else {
    Unsupported("cannot write " + std::to_string(raster.channels()) +
                "-channel raster as '" + ext + "'");
  }
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot replace " + path.string());
  }
}

}  // namespace sflx
