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

// Serialized forms of run results. Everything here is deterministic: numbers
// are printed in shortest round-trip form and no timestamps are recorded.

#ifndef SFLX_ARTIFACTS_H_
#define SFLX_ARTIFACTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sflx/evaluation.h"
#include "sflx/explanation.h"
#include "sflx/mutation.h"
#include "sflx/raster.h"
#include "sflx/spectrum.h"

namespace sflx {

std::string Base64Encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> Base64Decode(std::string_view text);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

// Header "pixel,row,col,measure,value,rank"; rows in ranking order, rank is
// 1-based; row/col are unit coordinates.
std::string RankingCsv(const PixelRanking& ranking, const PixelGrid& grid,
                       Measure measure);

// Min-max normalized gray image at full resolution, highest value = 255.
// A constant ranking renders all zero.
Raster RankingHeatmap(const PixelRanking& ranking, const PixelGrid& grid);

// {measure, pixel_indices, size_fraction, sufficient_label, queries_used,
//  pruned}
nlohmann::ordered_json ExplanationJson(const Explanation& explanation,
                                       std::size_t unit_count);

// {params, original_label, unit_count, mutants: [{mask, same_label}]}, masks
// base64 of MaskSet::ToBytes.
nlohmann::ordered_json SuiteJson(const TestSuite& suite);
TestSuite SuiteFromJson(const nlohmann::ordered_json& json);

nlohmann::ordered_json DeletionJson(const DeletionResult& result);
nlohmann::ordered_json DetectionJson(const DetectionReport& report);

}  // namespace sflx

#endif  // SFLX_ARTIFACTS_H_
