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

#include "sflx/artifacts.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "sflx/errors.h"

namespace sflx {
namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int Sextet(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) ThrowInvalidArgument("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::array<int, 4> s{};
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        s[j] = 0;
        ++pad;
      } else {
        s[j] = Sextet(c);
        if (s[j] < 0 || pad > 0) ThrowInvalidArgument("invalid base64");
      }
    }
    const std::uint32_t v = (s[0] << 18) | (s[1] << 12) | (s[2] << 6) | s[3];
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string FormatDouble(double value) {
  std::array<char, 32> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string RankingCsv(const PixelRanking& ranking, const PixelGrid& grid,
                       Measure measure) {
  std::string out = "pixel,row,col,measure,value,rank\n";
  const std::string name(MeasureName(measure));
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    const PixelIndex p = ranking[r].pixel;
    out += std::to_string(p) + ',' + std::to_string(grid.UnitRow(p)) + ',' +
           std::to_string(grid.UnitColumn(p)) + ',' + name + ',' +
           FormatDouble(ranking[r].value) + ',' + std::to_string(r + 1) + '\n';
  }
  return out;
}

Raster RankingHeatmap(const PixelRanking& ranking, const PixelGrid& grid) {
  if (ranking.size() != grid.unit_count()) {
    ThrowInvalidArgument("ranking does not cover the grid");
  }
  std::vector<std::uint8_t> data(grid.pixel_count(), 0);
  if (!ranking.empty()) {
    const auto [lo, hi] = std::ranges::minmax(
        ranking, {}, [](const RankedPixel& r) { return r.value; });
    const double span = hi.value - lo.value;
    if (span > 0.0) {
      for (const RankedPixel& r : ranking) {
        const auto level = static_cast<std::uint8_t>(
            std::lround((r.value - lo.value) / span * 255.0));
        for (PixelIndex p : grid.PixelsOf(r.pixel)) data[p] = level;
      }
    }
  }
  return Raster(grid.width(), grid.height(), 1, std::move(data));
}

nlohmann::ordered_json ExplanationJson(const Explanation& explanation,
                                       std::size_t unit_count) {
  nlohmann::ordered_json j;
  j["measure"] = std::string(MeasureName(explanation.measure));
  j["pixel_indices"] = explanation.pixels;
  j["size_fraction"] =
      unit_count == 0 ? 0.0
                      : static_cast<double>(explanation.pixels.size()) /
                            static_cast<double>(unit_count);
  j["sufficient_label"] = explanation.sufficient_label;
  j["queries_used"] = explanation.queries_used;
  j["pruned"] = explanation.pruned;
  return j;
}

nlohmann::ordered_json SuiteJson(const TestSuite& suite) {
  nlohmann::ordered_json params;
  if (suite.params.sigma0) {
    params["sigma0"] = *suite.params.sigma0;
  } else {
    params["sigma0"] = "random";
  }
  params["epsilon"] = suite.params.epsilon;
  params["m"] = suite.params.m;
  params["seed"] = suite.params.seed;
  params["chunk"] = suite.params.chunk;

  nlohmann::ordered_json j;
  j["params"] = params;
  j["original_label"] = suite.original_label;
  j["unit_count"] = suite.unit_count;
  auto& mutants = j["mutants"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < suite.mutants.size(); ++i) {
    const AnnotatedMutant& m = suite.mutants[i];
    nlohmann::ordered_json row;
    row["mask"] = Base64Encode(m.mask.ToBytes());
    row["same_label"] = m.same_label;
    if (i < suite.sigma_trace.size()) row["sigma"] = suite.sigma_trace[i];
    mutants.push_back(std::move(row));
  }
  return j;
}

TestSuite SuiteFromJson(const nlohmann::ordered_json& json) {
  try {
    TestSuite suite;
    const auto& params = json.at("params");
    if (params.at("sigma0").is_string()) {
      suite.params.sigma0.reset();
    } else {
      suite.params.sigma0 = params.at("sigma0").get<double>();
    }
    suite.params.epsilon = params.at("epsilon").get<double>();
    suite.params.m = params.at("m").get<std::size_t>();
    suite.params.seed = params.at("seed").get<std::uint64_t>();
    suite.params.chunk = params.value("chunk", std::size_t{1});
    suite.original_label = json.at("original_label").get<std::string>();
    suite.unit_count = json.at("unit_count").get<std::size_t>();
    for (const auto& row : json.at("mutants")) {
      const auto bytes = Base64Decode(row.at("mask").get<std::string>());
      suite.mutants.push_back(
          {MaskSet::FromBytes(suite.unit_count, bytes), row.at("same_label").get<bool>()});
      if (row.contains("sigma")) suite.sigma_trace.push_back(row["sigma"].get<double>());
    }
    return suite;
  } catch (const nlohmann::json::exception& e) {
    ThrowInvalidArgument(std::string("malformed test suite JSON: ") + e.what());
  }
}

nlohmann::ordered_json DeletionJson(const DeletionResult& result) {
  nlohmann::ordered_json j;
  j["flipped"] = result.flipped;
  j["flip_index"] = result.flip_index;
  j["flip_fraction"] = result.flip_fraction;
  j["queries_used"] = result.queries_used;
  return j;
}

nlohmann::ordered_json DetectionJson(const DetectionReport& report) {
  nlohmann::ordered_json j;
  j["best_iou"] = report.best_iou;
  j["best_percent"] = report.best_percent;
  j["iou_at_truth_size"] = report.iou_at_truth_size;
  auto& thresholds = j["thresholds"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    thresholds.push_back({{"threshold", report.thresholds[i]},
                          {"detected", static_cast<bool>(report.detected[i])},
                          {"detected_at_truth_size",
                           static_cast<bool>(report.detected_at_truth_size[i])}});
  }
  j["iou_by_percent"] = report.iou_by_percent;
  return j;
}

}  // namespace sflx
