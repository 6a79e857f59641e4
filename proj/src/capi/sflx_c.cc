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

#include "sflx/sflx.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"
#include "sflx/artifacts.h"
#include "sflx/classifier.h"
#include "sflx/errors.h"
#include "sflx/evaluation.h"
#include "sflx/explanation.h"
#include "sflx/image_io.h"
#include "sflx/mutation.h"
#include "sflx/raster.h"
#include "sflx/selftest.h"
#include "sflx/spectrum.h"

struct sflx_raster {
  sflx::Raster raster;
};

struct sflx_classifier {
  std::unique_ptr<sflx::Classifier> classifier;
};

struct sflx_suite {
  std::shared_ptr<const sflx::Occluder> occluder;
  sflx::TestSuite suite;
};

struct sflx_ranking {
  std::shared_ptr<const sflx::Occluder> occluder;
  sflx::Label original_label;
  sflx::Measure measure;
  sflx::PixelRanking ranking;
};

struct sflx_explanation {
  std::shared_ptr<const sflx::Occluder> occluder;
  sflx::Explanation explanation;
};

struct sflx_best {
  sflx::Measure measure;
  std::unique_ptr<sflx_explanation> best;
  std::vector<std::unique_ptr<sflx_ranking>> rankings;
  std::vector<std::unique_ptr<sflx_explanation>> explanations;
};

struct sflx_chimera {
  std::vector<sflx::ChimeraSample> samples;
  std::vector<sflx_raster> images;
};

namespace {

thread_local std::string g_last_error;

sflx_status Report(sflx_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

sflx_status FromCode(sflx::ErrorCode code) {
  switch (code) {
    case sflx::ErrorCode::kInvalidArgument:
      return SFLX_ERR_INVALID_ARGUMENT;
    case sflx::ErrorCode::kUnsupportedFormat:
      return SFLX_ERR_UNSUPPORTED_FORMAT;
    case sflx::ErrorCode::kIo:
      return SFLX_ERR_IO;
    case sflx::ErrorCode::kClassifierIo:
      return SFLX_ERR_CLASSIFIER_IO;
  }
  return SFLX_ERR_INTERNAL;
}

// Runs `body`, translating every exception into a status code.
template <typename Body>
sflx_status Guard(Body&& body) {
  try {
    body();
    return SFLX_OK;
  } catch (const sflx::Error& e) {
    return Report(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Report(SFLX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Report(SFLX_ERR_INTERNAL, e.what());
  } catch (...) {
    return Report(SFLX_ERR_INTERNAL, "unknown error");
  }
}

void Require(bool condition, const char* what) {
  if (!condition) sflx::ThrowInvalidArgument(what);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

sflx_options Defaults() {
  sflx_options o;
  sflx_options_default(&o);
  return o;
}

sflx::BackgroundColor Background(const sflx_options& o) {
  Require(o.bg_channels == 1 || o.bg_channels == 3,
          "bg_channels must be 1 or 3");
  return sflx::BackgroundColor(
      std::vector<std::uint8_t>(o.bg, o.bg + o.bg_channels));
}

sflx::MutationParams Params(const sflx_options& o) {
  sflx::MutationParams p;
  p.sigma0 = o.sigma0_random ? std::nullopt : std::optional<double>(o.sigma0);
  p.epsilon = o.epsilon;
  p.m = static_cast<std::size_t>(o.m);
  p.seed = o.seed;
  p.chunk = o.chunk;
  return p;
}

sflx::SearchMode Search(sflx_search_mode mode) {
  switch (mode) {
    case SFLX_SEARCH_LINEAR:
      return sflx::SearchMode::kLinear;
    case SFLX_SEARCH_BINARY:
      return sflx::SearchMode::kBinary;
    case SFLX_SEARCH_AUTO:
      return sflx::SearchMode::kAuto;
  }
  sflx::ThrowInvalidArgument("unknown search mode");
}

sflx::SpectrumRole Role(sflx_spectrum_role role) {
  switch (role) {
    case SFLX_ROLE_MASKING:
      return sflx::SpectrumRole::kMasking;
    case SFLX_ROLE_PRESENCE:
      return sflx::SpectrumRole::kPresence;
  }
  sflx::ThrowInvalidArgument("unknown spectrum role");
}

sflx::Measure ToMeasure(sflx_measure m) {
  Require(m >= SFLX_MEASURE_OCHIAI && m <= SFLX_MEASURE_WONG_II,
          "unknown measure");
  return sflx::kAllMeasures[static_cast<int>(m)];
}

sflx_measure FromMeasure(sflx::Measure m) {
  return static_cast<sflx_measure>(
      std::ranges::find(sflx::kAllMeasures, m) - sflx::kAllMeasures.begin());
}

sflx::MaskSet MaskFromRaster(const sflx::Raster& mask) {
  sflx::MaskSet out(mask.pixel_count());
  for (sflx::PixelIndex p = 0; p < mask.pixel_count(); ++p) {
    for (std::uint8_t v : mask.pixel(p)) {
      if (v != 0) {
        out.set(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* sflx_version(void) { return "1.0.0"; }

const char* sflx_last_error(void) { return g_last_error.c_str(); }

const char* sflx_status_name(sflx_status status) {
  switch (status) {
    case SFLX_OK:
      return "ok";
    case SFLX_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case SFLX_ERR_UNSUPPORTED_FORMAT:
      return "unsupported-format";
    case SFLX_ERR_IO:
      return "io";
    case SFLX_ERR_CLASSIFIER_IO:
      return "classifier-io";
    case SFLX_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

void sflx_string_free(char* s) { std::free(s); }

void sflx_options_default(sflx_options* options) {
  if (options == nullptr) return;
  *options = sflx_options{};
  options->sigma0 = 1.0 / 5.0;
  options->sigma0_random = 0;
  options->epsilon = 1.0 / 6.0;
  options->m = 2000;
  options->seed = 0;
  options->chunk = 1;
  options->cell_size = 1;
  options->role = SFLX_ROLE_MASKING;
  options->search = SFLX_SEARCH_AUTO;
  options->prune = 0;
  options->bg[0] = options->bg[1] = options->bg[2] = 0;
  options->bg_channels = 1;
}

sflx_status sflx_measure_parse(const char* name, sflx_measure* out) {
  return Guard([&] {
    Require(name != nullptr && out != nullptr, "null argument");
    const auto m = sflx::ParseMeasure(name);
    if (!m) sflx::ThrowInvalidArgument(std::string("unknown measure '") + name + "'");
    *out = FromMeasure(*m);
  });
}

const char* sflx_measure_name(sflx_measure measure) {
  if (measure < SFLX_MEASURE_OCHIAI || measure > SFLX_MEASURE_WONG_II) {
    return "unknown";
  }
  return sflx::MeasureName(sflx::kAllMeasures[measure]).data();
}

sflx_status sflx_measure_value(sflx_measure measure, uint64_t ep, uint64_t ef,
                               uint64_t np, uint64_t nf, double* out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = sflx::MeasureValue(ToMeasure(measure), {ep, ef, np, nf});
  });
}

sflx_status sflx_raster_create(uint32_t width, uint32_t height,
                               uint32_t channels, const uint8_t* data,
                               size_t length, sflx_raster** out) {
  return Guard([&] {
    Require(out != nullptr && (data != nullptr || length == 0), "null argument");
    *out = new sflx_raster{sflx::Raster(static_cast<int>(width),
                                        static_cast<int>(height),
                                        static_cast<int>(channels),
                                        std::vector<std::uint8_t>(data, data + length))};
  });
}

sflx_status sflx_raster_synthetic(uint32_t width, uint32_t height,
                                  uint32_t channels, uint64_t seed,
                                  sflx_raster** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = new sflx_raster{sflx::SyntheticImage(static_cast<int>(width),
                                                static_cast<int>(height),
                                                static_cast<int>(channels), seed)};
  });
}

sflx_status sflx_raster_load(const char* path, sflx_raster** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new sflx_raster{sflx::LoadImage(path)};
  });
}

sflx_status sflx_raster_save(const sflx_raster* raster, const char* path) {
  return Guard([&] {
    Require(raster != nullptr && path != nullptr, "null argument");
    sflx::SaveImage(raster->raster, path);
  });
}

void sflx_raster_free(sflx_raster* raster) { delete raster; }

void sflx_raster_shape(const sflx_raster* raster, uint32_t* width,
                       uint32_t* height, uint32_t* channels) {
  if (raster == nullptr) return;
  if (width) *width = static_cast<uint32_t>(raster->raster.width());
  if (height) *height = static_cast<uint32_t>(raster->raster.height());
  if (channels) *channels = static_cast<uint32_t>(raster->raster.channels());
}

const uint8_t* sflx_raster_data(const sflx_raster* raster, size_t* length) {
  if (raster == nullptr) return nullptr;
  if (length) *length = raster->raster.data().size();
  return raster->raster.data().data();
}

sflx_status sflx_raster_apply_mask(const sflx_raster* raster,
                                   const uint32_t* masked, size_t count,
                                   const sflx_options* options,
                                   sflx_raster** out) {
  return Guard([&] {
    Require(raster != nullptr && out != nullptr &&
                (masked != nullptr || count == 0),
            "null argument");
    const sflx_options o = options ? *options : Defaults();
    const sflx::MaskSet mask = sflx::MaskSet::FromIndices(
        raster->raster.pixel_count(), std::span<const uint32_t>(masked, count));
    *out = new sflx_raster{sflx::ApplyMask(
        raster->raster, mask, Background(o).ForChannels(raster->raster.channels()))};
  });
}

sflx_status sflx_raster_keep_only(const sflx_raster* raster,
                                  const uint32_t* keep, size_t count,
                                  const sflx_options* options,
                                  sflx_raster** out) {
  return Guard([&] {
    Require(raster != nullptr && out != nullptr && (keep != nullptr || count == 0),
            "null argument");
    const sflx_options o = options ? *options : Defaults();
    *out = new sflx_raster{sflx::KeepOnly(
        raster->raster, std::span<const uint32_t>(keep, count),
        Background(o).ForChannels(raster->raster.channels()))};
  });
}

sflx_status sflx_classifier_create(const char* spec,
                                   const sflx_options* options,
                                   sflx_classifier** out) {
  return Guard([&] {
    Require(spec != nullptr && out != nullptr, "null argument");
    const sflx_options o = options ? *options : Defaults();
    *out = new sflx_classifier{sflx::MakeClassifier(spec, Background(o))};
  });
}

sflx_status sflx_classifier_create_patch(const sflx_raster* patch,
                                         const sflx_raster* mask,
                                         double min_fraction,
                                         const char* target, const char* other,
                                         const sflx_options* options,
                                         sflx_classifier** out) {
  return Guard([&] {
    Require(patch != nullptr && out != nullptr, "null argument");
    const sflx_options o = options ? *options : Defaults();
    sflx::MaskSet m = mask ? MaskFromRaster(mask->raster)
                           : sflx::MaskSet(patch->raster.pixel_count()).Complement();
    *out = new sflx_classifier{std::make_unique<sflx::PatchClassifier>(
        patch->raster, std::move(m), min_fraction, Background(o),
        target ? target : "target", other ? other : "other")};
  });
}

void sflx_classifier_free(sflx_classifier* classifier) { delete classifier; }

sflx_status sflx_classifier_classify(sflx_classifier* classifier,
                                     const sflx_raster* image, char** label) {
  return Guard([&] {
    Require(classifier != nullptr && image != nullptr && label != nullptr,
            "null argument");
    *label = CopyString(classifier->classifier->Classify(image->raster));
  });
}

sflx_status sflx_suite_generate(sflx_classifier* classifier,
                                const sflx_raster* image,
                                const sflx_options* options, sflx_suite** out) {
  return Guard([&] {
    Require(classifier != nullptr && image != nullptr && out != nullptr,
            "null argument");
    const sflx_options o = options ? *options : Defaults();
    auto occluder = std::make_shared<const sflx::Occluder>(
        image->raster, Background(o), static_cast<int>(o.cell_size));
    auto suite = std::make_unique<sflx_suite>();
    suite->suite =
        sflx::GenerateTestSuite(*classifier->classifier, *occluder, Params(o));
    suite->occluder = std::move(occluder);
    *out = suite.release();
  });
}

void sflx_suite_free(sflx_suite* suite) { delete suite; }

uint64_t sflx_suite_size(const sflx_suite* suite) {
  return suite ? suite->suite.mutants.size() : 0;
}

uint64_t sflx_suite_unit_count(const sflx_suite* suite) {
  return suite ? suite->suite.unit_count : 0;
}

const char* sflx_suite_original_label(const sflx_suite* suite) {
  return suite ? suite->suite.original_label.c_str() : nullptr;
}

void sflx_suite_balance(const sflx_suite* suite, uint64_t* same,
                        uint64_t* different) {
  if (suite == nullptr) return;
  const auto [y, not_y] = sflx::SuiteBalance(suite->suite);
  if (same) *same = y;
  if (different) *different = not_y;
}

sflx_status sflx_suite_to_json(const sflx_suite* suite, char** json) {
  return Guard([&] {
    Require(suite != nullptr && json != nullptr, "null argument");
    *json = CopyString(sflx::SuiteJson(suite->suite).dump());
  });
}

sflx_status sflx_suite_write_json(const sflx_suite* suite, const char* path) {
  return Guard([&] {
    Require(suite != nullptr && path != nullptr, "null argument");
    sflx::WriteFileAtomic(path, sflx::SuiteJson(suite->suite).dump() + "\n");
  });
}

sflx_status sflx_ranking_compute(const sflx_suite* suite, sflx_measure measure,
                                 const sflx_options* options,
                                 sflx_ranking** out) {
  return Guard([&] {
    Require(suite != nullptr && out != nullptr, "null argument");
    const sflx_options o = options ? *options : Defaults();
    const auto spectra =
        sflx::ComputeSpectra(suite->suite, suite->occluder->unit_count());
    auto ranking = std::make_unique<sflx_ranking>();
    ranking->occluder = suite->occluder;
    ranking->original_label = suite->suite.original_label;
    ranking->measure = ToMeasure(measure);
    ranking->ranking = sflx::RankPixels(spectra, ranking->measure, Role(o.role));
    *out = ranking.release();
  });
}

void sflx_ranking_free(sflx_ranking* ranking) { delete ranking; }

uint64_t sflx_ranking_size(const sflx_ranking* ranking) {
  return ranking ? ranking->ranking.size() : 0;
}

sflx_status sflx_ranking_entry(const sflx_ranking* ranking, uint64_t rank,
                               uint32_t* pixel, double* value) {
  return Guard([&] {
    Require(ranking != nullptr, "null ranking");
    Require(rank < ranking->ranking.size(), "rank out of range");
    if (pixel) *pixel = ranking->ranking[rank].pixel;
    if (value) *value = ranking->ranking[rank].value;
  });
}

sflx_status sflx_ranking_write_csv(const sflx_ranking* ranking,
                                   const char* path) {
  return Guard([&] {
    Require(ranking != nullptr && path != nullptr, "null argument");
    sflx::WriteFileAtomic(path, sflx::RankingCsv(ranking->ranking,
                                                 ranking->occluder->grid(),
                                                 ranking->measure));
  });
}

sflx_status sflx_ranking_write_heatmap(const sflx_ranking* ranking,
                                       const char* path) {
  return Guard([&] {
    Require(ranking != nullptr && path != nullptr, "null argument");
    sflx::SaveImage(
        sflx::RankingHeatmap(ranking->ranking, ranking->occluder->grid()), path);
  });
}

sflx_status sflx_explanation_build(sflx_classifier* classifier,
                                   const sflx_ranking* ranking,
                                   const sflx_options* options,
                                   sflx_explanation** out) {
  return Guard([&] {
    Require(classifier != nullptr && ranking != nullptr && out != nullptr,
            "null argument");
    const sflx_options o = options ? *options : Defaults();
    auto e = std::make_unique<sflx_explanation>();
    e->occluder = ranking->occluder;
    e->explanation = sflx::BuildExplanation(
        *classifier->classifier, *ranking->occluder, ranking->ranking,
        ranking->measure, Search(o.search), &ranking->original_label);
    if (o.prune) {
      e->explanation = sflx::PruneExplanation(*classifier->classifier,
                                              *ranking->occluder, e->explanation);
    }
    *out = e.release();
  });
}

sflx_status sflx_explanation_prune(sflx_classifier* classifier,
                                   const sflx_explanation* explanation,
                                   sflx_explanation** out) {
  return Guard([&] {
    Require(classifier != nullptr && explanation != nullptr && out != nullptr,
            "null argument");
    auto e = std::make_unique<sflx_explanation>();
    e->occluder = explanation->occluder;
    e->explanation = sflx::PruneExplanation(
        *classifier->classifier, *explanation->occluder, explanation->explanation);
    *out = e.release();
  });
}

void sflx_explanation_free(sflx_explanation* explanation) { delete explanation; }

const uint32_t* sflx_explanation_pixels(const sflx_explanation* explanation,
                                        size_t* count) {
  if (explanation == nullptr) return nullptr;
  if (count) *count = explanation->explanation.pixels.size();
  return explanation->explanation.pixels.data();
}

sflx_measure sflx_explanation_measure(const sflx_explanation* explanation) {
  return explanation ? FromMeasure(explanation->explanation.measure)
                     : SFLX_MEASURE_OCHIAI;
}

const char* sflx_explanation_label(const sflx_explanation* explanation) {
  return explanation ? explanation->explanation.sufficient_label.c_str() : nullptr;
}

uint64_t sflx_explanation_queries(const sflx_explanation* explanation) {
  return explanation ? explanation->explanation.queries_used : 0;
}

int sflx_explanation_pruned(const sflx_explanation* explanation) {
  return explanation && explanation->explanation.pruned ? 1 : 0;
}

double sflx_explanation_size_fraction(const sflx_explanation* explanation) {
  if (explanation == nullptr) return 0.0;
  return static_cast<double>(explanation->explanation.pixels.size()) /
         static_cast<double>(explanation->occluder->unit_count());
}

sflx_status sflx_explanation_verify(sflx_classifier* classifier,
                                    const sflx_explanation* explanation,
                                    int* sufficient) {
  return Guard([&] {
    Require(classifier != nullptr && explanation != nullptr && sufficient != nullptr,
            "null argument");
    *sufficient = sflx::IsSufficient(*classifier->classifier,
                                     *explanation->occluder,
                                     explanation->explanation.pixels,
                                     explanation->explanation.sufficient_label)
                      ? 1
                      : 0;
  });
}

sflx_status sflx_explanation_to_json(const sflx_explanation* explanation,
                                     char** json) {
  return Guard([&] {
    Require(explanation != nullptr && json != nullptr, "null argument");
    *json = CopyString(sflx::ExplanationJson(explanation->explanation,
                                             explanation->occluder->unit_count())
                           .dump());
  });
}

sflx_status sflx_explanation_write_json(const sflx_explanation* explanation,
                                        const char* path) {
  return Guard([&] {
    Require(explanation != nullptr && path != nullptr, "null argument");
    sflx::WriteFileAtomic(path, sflx::ExplanationJson(
                                    explanation->explanation,
                                    explanation->occluder->unit_count())
                                        .dump(2) +
                                    "\n");
  });
}

sflx_status sflx_explanation_write_overlay(const sflx_explanation* explanation,
                                           const char* path) {
  return Guard([&] {
    Require(explanation != nullptr && path != nullptr, "null argument");
    sflx::SaveImage(explanation->occluder->KeepOnly(explanation->explanation.pixels),
                    path);
  });
}

sflx_status sflx_explain_best(sflx_classifier* classifier,
                              const sflx_suite* suite,
                              const sflx_measure* measures, size_t count,
                              const sflx_options* options, sflx_best** out) {
  return Guard([&] {
    Require(classifier != nullptr && suite != nullptr && measures != nullptr &&
                out != nullptr,
            "null argument");
    const sflx_options o = options ? *options : Defaults();
    std::vector<sflx::Measure> list;
    for (size_t i = 0; i < count; ++i) list.push_back(ToMeasure(measures[i]));
    sflx::ExplainOptions eo;
    eo.search = Search(o.search);
    eo.role = Role(o.role);
    eo.prune = o.prune != 0;
    sflx::BestExplanation result = sflx::ExplainBest(
        *classifier->classifier, *suite->occluder, suite->suite, list, eo);

    auto best = std::make_unique<sflx_best>();
    best->measure = result.measure;
    best->best = std::make_unique<sflx_explanation>(
        sflx_explanation{suite->occluder, result.explanation});
    for (sflx::MeasureResult& r : result.per_measure) {
      best->rankings.push_back(std::make_unique<sflx_ranking>(
          sflx_ranking{suite->occluder, suite->suite.original_label, r.measure,
                       std::move(r.ranking)}));
      best->explanations.push_back(std::make_unique<sflx_explanation>(
          sflx_explanation{suite->occluder, std::move(r.explanation)}));
    }
    *out = best.release();
  });
}

void sflx_best_free(sflx_best* best) { delete best; }

sflx_measure sflx_best_measure(const sflx_best* best) {
  return best ? FromMeasure(best->measure) : SFLX_MEASURE_OCHIAI;
}

const sflx_explanation* sflx_best_explanation(const sflx_best* best) {
  return best ? best->best.get() : nullptr;
}

size_t sflx_best_count(const sflx_best* best) {
  return best ? best->rankings.size() : 0;
}

const sflx_ranking* sflx_best_ranking_at(const sflx_best* best, size_t index) {
  if (best == nullptr || index >= best->rankings.size()) return nullptr;
  return best->rankings[index].get();
}

const sflx_explanation* sflx_best_explanation_at(const sflx_best* best,
                                                 size_t index) {
  if (best == nullptr || index >= best->explanations.size()) return nullptr;
  return best->explanations[index].get();
}

sflx_status sflx_deletion_curve(sflx_classifier* classifier,
                                const sflx_ranking* ranking,
                                sflx_deletion* out) {
  return Guard([&] {
    Require(classifier != nullptr && ranking != nullptr && out != nullptr,
            "null argument");
    const sflx::DeletionResult r = sflx::DeletionCurve(
        *classifier->classifier, *ranking->occluder, ranking->ranking);
    out->flip_index = r.flip_index;
    out->flip_fraction = r.flip_fraction;
    out->flipped = r.flipped ? 1 : 0;
    out->queries_used = r.queries_used;
  });
}

double sflx_iou(const uint32_t* a, size_t a_count, const uint32_t* b,
                size_t b_count) {
  return sflx::Iou(std::span<const uint32_t>(a, a ? a_count : 0),
                   std::span<const uint32_t>(b, b ? b_count : 0));
}

sflx_status sflx_topk_detect(const sflx_ranking* ranking, const uint32_t* truth,
                             size_t truth_count, const double* thresholds,
                             size_t threshold_count, sflx_detection* out,
                             int* detected, int* detected_at_truth_size,
                             double* iou_by_percent) {
  return Guard([&] {
    Require(ranking != nullptr && out != nullptr &&
                (truth != nullptr || truth_count == 0) &&
                (thresholds != nullptr || threshold_count == 0),
            "null argument");
    const sflx::DetectionReport r = sflx::TopKIouDetect(
        ranking->ranking, std::span<const uint32_t>(truth, truth_count),
        std::span<const double>(thresholds, threshold_count));
    out->best_iou = r.best_iou;
    out->best_percent = r.best_percent;
    out->iou_at_truth_size = r.iou_at_truth_size;
    for (size_t i = 0; i < threshold_count; ++i) {
      if (detected) detected[i] = r.detected[i] ? 1 : 0;
      if (detected_at_truth_size) {
        detected_at_truth_size[i] = r.detected_at_truth_size[i] ? 1 : 0;
      }
    }
    if (iou_by_percent) {
      std::copy(r.iou_by_percent.begin(), r.iou_by_percent.end(), iou_by_percent);
    }
  });
}

sflx_status sflx_size_cdf(const double* sizes, size_t count, double* xs,
                          double* ys, size_t* points) {
  return Guard([&] {
    Require((sizes != nullptr || count == 0) && xs != nullptr && ys != nullptr &&
                points != nullptr,
            "null argument");
    const auto cdf = sflx::SizeCdf(std::vector<double>(sizes, sizes + count));
    for (size_t i = 0; i < cdf.size(); ++i) {
      xs[i] = cdf[i].first;
      ys[i] = cdf[i].second;
    }
    *points = cdf.size();
  });
}

sflx_status sflx_brute_force_min(uint32_t n, const uint8_t* sufficient,
                                 int32_t* min_size, uint32_t* minimal_sets,
                                 size_t capacity, size_t* count) {
  return Guard([&] {
    Require(sufficient != nullptr && min_size != nullptr, "null argument");
    const sflx::BruteForceResult r = sflx::BruteForceMinExplanation(
        n, [&](std::uint32_t kept) { return sufficient[kept] != 0; });
    *min_size = r.min_size;
    if (count) *count = r.minimal_sets.size();
    for (size_t i = 0; minimal_sets && i < capacity && i < r.minimal_sets.size();
         ++i) {
      minimal_sets[i] = r.minimal_sets[i];
    }
  });
}

sflx_status sflx_chimera_generate(const sflx_raster* patch,
                                  const sflx_raster* mask,
                                  const sflx_raster* const* backgrounds,
                                  size_t background_count, uint64_t seed,
                                  const char* target,
                                  sflx_classifier* classifier,
                                  sflx_chimera** out) {
  return Guard([&] {
    Require(patch != nullptr && classifier != nullptr && target != nullptr &&
                out != nullptr && (backgrounds != nullptr || background_count == 0),
            "null argument");
    sflx::ChimeraSpec spec;
    spec.patch = patch->raster;
    spec.patch_mask = mask ? MaskFromRaster(mask->raster)
                           : sflx::MaskSet(patch->raster.pixel_count()).Complement();
    for (size_t i = 0; i < background_count; ++i) {
      Require(backgrounds[i] != nullptr, "null background");
      spec.backgrounds.push_back(backgrounds[i]->raster);
    }
    spec.seed = seed;
    spec.target = target;
    auto chimera = std::make_unique<sflx_chimera>();
    chimera->samples = sflx::ChimeraGenerate(spec, *classifier->classifier);
    for (const auto& s : chimera->samples) chimera->images.push_back({s.image});
    *out = chimera.release();
  });
}

void sflx_chimera_free(sflx_chimera* chimera) { delete chimera; }

size_t sflx_chimera_count(const sflx_chimera* chimera) {
  return chimera ? chimera->samples.size() : 0;
}

const sflx_raster* sflx_chimera_image(const sflx_chimera* chimera,
                                      size_t index) {
  if (chimera == nullptr || index >= chimera->images.size()) return nullptr;
  return &chimera->images[index];
}

const uint32_t* sflx_chimera_truth(const sflx_chimera* chimera, size_t index,
                                   size_t* count) {
  if (chimera == nullptr || index >= chimera->samples.size()) return nullptr;
  const auto& pixels = chimera->samples[index].truth.pixels;
  if (count) *count = pixels.size();
  return pixels.data();
}

void sflx_chimera_placement(const sflx_chimera* chimera, size_t index,
                            size_t* background_index, int32_t* x, int32_t* y) {
  if (chimera == nullptr || index >= chimera->samples.size()) return;
  const auto& s = chimera->samples[index];
  if (background_index) *background_index = s.background_index;
  if (x) *x = s.x;
  if (y) *y = s.y;
}

sflx_status sflx_selftest(int* passed, char** report) {
  return Guard([&] {
    Require(passed != nullptr, "null argument");
    const auto checks = sflx::RunSelftest();
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    bool ok = true;
    for (const auto& c : checks) {
      j.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      ok = ok && c.passed;
    }
    *passed = ok ? 1 : 0;
    if (report) *report = CopyString(j.dump(2));
  });
}

sflx_status sflx_write_file(const char* path, const char* bytes, size_t length) {
  return Guard([&] {
    Require(path != nullptr && (bytes != nullptr || length == 0), "null argument");
    sflx::WriteFileAtomic(path, std::string_view(bytes, length));
  });
}

}  // extern "C"
