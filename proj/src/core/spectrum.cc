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

#include "sflx/spectrum.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "sflx/errors.h"

namespace sflx {
namespace {

std::string Lower(std::string_view text) {
  std::string out(text);
  std::ranges::transform(out, out.begin(),
                         [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view MeasureName(Measure measure) {
  switch (measure) {
    case Measure::kOchiai:
      return "ochiai";
    case Measure::kTarantula:
      return "tarantula";
    case Measure::kZoltar:
      return "zoltar";
    case Measure::kWongII:
      return "wong-ii";
  }
  return "unknown";
}

std::optional<Measure> ParseMeasure(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "ochiai") return Measure::kOchiai;
  if (n == "tarantula") return Measure::kTarantula;
  if (n == "zoltar") return Measure::kZoltar;
  if (n == "wong-ii" || n == "wongii" || n == "wong2" || n == "wong_ii") {
    return Measure::kWongII;
  }
  return std::nullopt;
}

std::string_view SpectrumRoleName(SpectrumRole role) {
  return role == SpectrumRole::kMasking ? "masking" : "presence";
}

std::optional<SpectrumRole> ParseSpectrumRole(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "masking") return SpectrumRole::kMasking;
  if (n == "presence") return SpectrumRole::kPresence;
  return std::nullopt;
}

std::vector<SpectrumVector> ComputeSpectra(const TestSuite& suite,
                                           std::size_t n) {
  // Count masked occurrences per class word by word, then derive the rest.
  std::vector<std::uint64_t> masked_same(n, 0);
  std::vector<std::uint64_t> masked_diff(n, 0);
  std::uint64_t same_total = 0;
  for (const AnnotatedMutant& mutant : suite.mutants) {
    if (mutant.mask.size() != n) {
      ThrowInvalidArgument("mutant mask length " +
                           std::to_string(mutant.mask.size()) +
                           " does not match pixel count " + std::to_string(n));
    }
    auto& counts = mutant.same_label ? masked_same : masked_diff;
    same_total += mutant.same_label ? 1 : 0;
    const auto words = mutant.mask.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        ++counts[w * 64 + std::countr_zero(bits)];
        bits &= bits - 1;
      }
    }
  }
  const std::uint64_t diff_total = suite.mutants.size() - same_total;
  std::vector<SpectrumVector> spectra(n);
  for (std::size_t i = 0; i < n; ++i) {
    spectra[i].np = masked_same[i];
    spectra[i].nf = masked_diff[i];
    spectra[i].ep = same_total - masked_same[i];
    spectra[i].ef = diff_total - masked_diff[i];
  }
  return spectra;
}

SpectrumVector Oriented(const SpectrumVector& s, SpectrumRole role) {
  if (role == SpectrumRole::kPresence) return s;
  return SpectrumVector{.ep = s.np, .ef = s.nf, .np = s.ep, .nf = s.ef};
}

double MeasureValue(Measure measure, const SpectrumVector& s) {
  const double ep = static_cast<double>(s.ep);
  const double ef = static_cast<double>(s.ef);
  const double np = static_cast<double>(s.np);
  const double nf = static_cast<double>(s.nf);
  switch (measure) {
    case Measure::kOchiai:
      if (s.ef == 0) return 0.0;
      return ef / std::sqrt((ef + nf) * (ef + ep));
    case Measure::kTarantula: {
      const double fail = (s.ef + s.nf) == 0 ? 0.0 : ef / (ef + nf);
      const double pass = (s.ep + s.np) == 0 ? 0.0 : ep / (ep + np);
      if (fail == 0.0 && pass == 0.0) return 0.0;
      return fail / (fail + pass);
    }
    case Measure::kZoltar:
      if (s.ef == 0) return 0.0;
      return ef / (ef + nf + ep + 10000.0 * nf * ep / ef);
    case Measure::kWongII:
      return ef - ep;
  }
  return 0.0;
}

PixelRanking RankByValues(std::span<const double> values) {
  PixelRanking ranking(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ranking[i] = {static_cast<PixelIndex>(i), values[i]};
  }
  std::ranges::stable_sort(ranking, [](const RankedPixel& a, const RankedPixel& b) {
    return a.value > b.value;
  });
  return ranking;
}

PixelRanking RankPixels(std::span<const SpectrumVector> spectra,
                        Measure measure, SpectrumRole role) {
  std::vector<double> values(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    values[i] = MeasureValue(measure, Oriented(spectra[i], role));
  }
  return RankByValues(values);
}

std::vector<PixelIndex> TopPixels(const PixelRanking& ranking,
                                  std::size_t count) {
  count = std::min(count, ranking.size());
  std::vector<PixelIndex> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = ranking[i].pixel;
  return out;
}

}  // namespace sflx
