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

#ifndef SFLX_MUTATION_H_
#define SFLX_MUTATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sflx/classifier.h"
#include "sflx/raster.h"

namespace sflx {

struct MutationParams {
  // Initial masked fraction; nullopt draws it uniformly from (0,1).
  std::optional<double> sigma0 = 1.0 / 5.0;
  double epsilon = 1.0 / 6.0;
  std::size_t m = 2000;
  std::uint64_t seed = 0;
  // Mutants drawn per sigma update. 1 is the exact feedback loop; larger
  // values batch classifier calls at the cost of a lagging sigma.
  std::size_t chunk = 1;

  // Throws kInvalidArgument on out-of-range values.
  void Validate() const;
};

struct AnnotatedMutant {
  MaskSet mask;     // over units
  bool same_label;  // classified like the original image
};

struct TestSuite {
  Label original_label;
  std::vector<AnnotatedMutant> mutants;
  MutationParams params;
  std::size_t unit_count = 0;
  // sigma used for each mutant, in generation order.
  std::vector<double> sigma_trace;
};

// Sigma feedback step: shrink by epsilon after a label change, grow after a
// kept label, clamped to [0,1].
double NextSigma(double sigma, double epsilon, bool same_label);

// round(sigma*n), halves away from zero.
std::size_t MaskedCount(double sigma, std::size_t n);

// Generates m annotated mutants of the occluder's image. Fully determined by
// (image, params, classifier).
TestSuite GenerateTestSuite(Classifier& classifier, const Occluder& occluder,
                            const MutationParams& params);

// (count annotated y, count annotated not-y).
std::pair<std::size_t, std::size_t> SuiteBalance(const TestSuite& suite);

}  // namespace sflx

#endif  // SFLX_MUTATION_H_
