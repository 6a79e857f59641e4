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

// sflx command-line tool. Talks to the engine only through the C API.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sflx/sflx.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitClassifier = 3;
constexpr int kExitImage = 4;

constexpr double kThresholds[] = {0.5, 0.6, 0.7};

struct CliError {
  int exit_code;
  std::string message;
};

int ExitFor(sflx_status status) {
  switch (status) {
    case SFLX_OK:
      return kExitOk;
    case SFLX_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    case SFLX_ERR_CLASSIFIER_IO:
      return kExitClassifier;
    case SFLX_ERR_IO:
    case SFLX_ERR_UNSUPPORTED_FORMAT:
      return kExitImage;
    case SFLX_ERR_INTERNAL:
      break;
  }
  return kExitFailure;
}

void Check(sflx_status status, const std::string& context) {
  if (status != SFLX_OK) {
    throw CliError{ExitFor(status), context + ": " + sflx_last_error()};
  }
}

[[noreturn]] void ConfigError(const std::string& message) {
  throw CliError{kExitConfig, message};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using RasterPtr = std::unique_ptr<sflx_raster, Deleter<sflx_raster, sflx_raster_free>>;
using ClassifierPtr =
    std::unique_ptr<sflx_classifier, Deleter<sflx_classifier, sflx_classifier_free>>;
using SuitePtr = std::unique_ptr<sflx_suite, Deleter<sflx_suite, sflx_suite_free>>;
using RankingPtr =
    std::unique_ptr<sflx_ranking, Deleter<sflx_ranking, sflx_ranking_free>>;
using ExplanationPtr =
    std::unique_ptr<sflx_explanation, Deleter<sflx_explanation, sflx_explanation_free>>;
using BestPtr = std::unique_ptr<sflx_best, Deleter<sflx_best, sflx_best_free>>;
using ChimeraPtr =
    std::unique_ptr<sflx_chimera, Deleter<sflx_chimera, sflx_chimera_free>>;

std::string TakeString(char* s) {
  std::string out = s ? s : "";
  sflx_string_free(s);
  return out;
}

// ---- configuration -------------------------------------------------------

struct RunConfig {
  std::string classifier;
  std::string measures = "all";
  std::string sigma0 = "0.2";
  double epsilon = 1.0 / 6.0;
  std::uint64_t m = 2000;
  std::optional<std::uint64_t> seed;
  std::string bg = "0";
  std::uint32_t cell = 1;
  bool prune = false;
  std::string search = "auto";
  std::string spectrum = "masking";
  std::uint32_t chunk = 1;
  std::string out = "sflx-out";
  unsigned jobs = 1;
};

struct Resolved {
  sflx_options options;
  std::vector<sflx_measure> measures;
};

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::uint8_t ParseByte(const std::string& s) {
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
  }
  if (used != s.size() || v < 0 || v > 255) {
    ConfigError("--bg: '" + s + "' is not an integer in [0,255]");
  }
  return static_cast<std::uint8_t>(v);
}

Resolved Resolve(const RunConfig& cfg) {
  Resolved r;
  sflx_options_default(&r.options);
  sflx_options& o = r.options;

  if (cfg.sigma0 == "random") {
    o.sigma0_random = 1;
  } else {
    std::size_t used = 0;
    double v = -1;
    try {
      v = std::stod(cfg.sigma0, &used);
    } catch (const std::exception&) {
    }
    if (used != cfg.sigma0.size() || !(v > 0.0 && v < 1.0)) {
      ConfigError("--sigma0 must be a number in (0,1) or 'random'");
    }
    o.sigma0 = v;
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    ConfigError("--epsilon must lie in (0,1)");
  }
  o.epsilon = cfg.epsilon;
  if (cfg.m == 0) ConfigError("--m must be positive");
  o.m = cfg.m;
  if (cfg.seed) {
    o.seed = *cfg.seed;
  } else if (const char* env = std::getenv("SFLX_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      o.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      ConfigError(std::string("SFLX_SEED is not an unsigned integer: ") + env);
    }
  }
  if (cfg.chunk == 0) ConfigError("--chunk must be positive");
  o.chunk = cfg.chunk;
  if (cfg.cell == 0) ConfigError("--cell must be positive");
  o.cell_size = cfg.cell;
  o.prune = cfg.prune ? 1 : 0;

  const auto bg = SplitCommas(cfg.bg);
  if (bg.size() != 1 && bg.size() != 3) ConfigError("--bg takes 'v' or 'r,g,b'");
  for (std::size_t i = 0; i < bg.size(); ++i) o.bg[i] = ParseByte(bg[i]);
  o.bg_channels = static_cast<std::uint32_t>(bg.size());

  if (cfg.search == "auto") {
    o.search = SFLX_SEARCH_AUTO;
  } else if (cfg.search == "linear") {
    o.search = SFLX_SEARCH_LINEAR;
  } else if (cfg.search == "binary") {
    o.search = SFLX_SEARCH_BINARY;
  } else {
    ConfigError("--search must be auto, linear or binary");
  }
  if (cfg.spectrum == "masking") {
    o.role = SFLX_ROLE_MASKING;
  } else if (cfg.spectrum == "presence") {
    o.role = SFLX_ROLE_PRESENCE;
  } else {
    ConfigError("--spectrum must be masking or presence");
  }

  if (cfg.measures == "all") {
    r.measures = {SFLX_MEASURE_OCHIAI, SFLX_MEASURE_TARANTULA,
                  SFLX_MEASURE_ZOLTAR, SFLX_MEASURE_WONG_II};
  } else {
    for (const std::string& name : SplitCommas(cfg.measures)) {
      sflx_measure m;
      if (sflx_measure_parse(name.c_str(), &m) != SFLX_OK) {
        ConfigError("unknown measure '" + name + "'");
      }
      if (std::ranges::find(r.measures, m) == r.measures.end()) {
        r.measures.push_back(m);
      }
    }
    if (r.measures.empty()) ConfigError("--measure selects nothing");
  }
  if (cfg.out.empty()) ConfigError("--out must not be empty");
  return r;
}

Json ConfigJson(const Resolved& r) {
  const sflx_options& o = r.options;
  Json measures = Json::array();
  for (sflx_measure m : r.measures) measures.push_back(sflx_measure_name(m));
  Json bg = Json::array();
  for (std::uint32_t i = 0; i < o.bg_channels; ++i) bg.push_back(o.bg[i]);
  return Json{{"measures", measures},
              {"sigma0", o.sigma0_random ? Json("random") : Json(o.sigma0)},
              {"epsilon", o.epsilon},
              {"m", o.m},
              {"seed", o.seed},
              {"chunk", o.chunk},
              {"cell", o.cell_size},
              {"bg", bg},
              {"prune", o.prune != 0},
              {"spectrum", o.role == SFLX_ROLE_MASKING ? "masking" : "presence"}};
}

// ---- shared helpers ------------------------------------------------------

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitImage, "cannot create " + dir.string() + ": " + ec.message()};
}

void WriteText(const fs::path& path, const std::string& text) {
  Check(sflx_write_file(path.c_str(), text.data(), text.size()), path.string());
}

RasterPtr LoadRaster(const std::string& path) {
  sflx_raster* raw = nullptr;
  Check(sflx_raster_load(path.c_str(), &raw), "loading " + path);
  return RasterPtr(raw);
}

ClassifierPtr MakeClassifier(const std::string& spec, const sflx_options& o) {
  if (spec.empty()) ConfigError("--classifier is required");
  sflx_classifier* raw = nullptr;
  Check(sflx_classifier_create(spec.c_str(), &o, &raw), "classifier");
  return ClassifierPtr(raw);
}

SuitePtr MakeSuite(sflx_classifier* c, const sflx_raster* image,
                   const sflx_options& o) {
  sflx_suite* raw = nullptr;
  Check(sflx_suite_generate(c, image, &o, &raw), "test suite");
  return SuitePtr(raw);
}

RankingPtr MakeRanking(const sflx_suite* suite, sflx_measure m,
                       const sflx_options& o) {
  sflx_ranking* raw = nullptr;
  Check(sflx_ranking_compute(suite, m, &o, &raw), "ranking");
  return RankingPtr(raw);
}

void WriteMeasureDir(const fs::path& dir, const sflx_ranking* ranking,
                     const sflx_explanation* explanation) {
  MakeDirs(dir);
  Check(sflx_ranking_write_csv(ranking, (dir / "ranking.csv").c_str()), "ranking.csv");
  Check(sflx_ranking_write_heatmap(ranking, (dir / "heatmap.png").c_str()),
        "heatmap.png");
  Check(sflx_explanation_write_json(explanation, (dir / "explanation.json").c_str()),
        "explanation.json");
  Check(sflx_explanation_write_overlay(explanation, (dir / "overlay.png").c_str()),
        "overlay.png");
}

std::vector<std::uint32_t> ExplanationPixels(const sflx_explanation* e) {
  std::size_t count = 0;
  const std::uint32_t* p = sflx_explanation_pixels(e, &count);
  return std::vector<std::uint32_t>(p, p + count);
}

// Nonzero pixels of a mask image, mapped to units of a g x g grid.
std::vector<std::uint32_t> TruthUnits(const std::string& path,
                                      std::uint32_t image_w,
                                      std::uint32_t image_h, std::uint32_t cell) {
  RasterPtr mask = LoadRaster(path);
  std::uint32_t w = 0, h = 0, c = 0;
  sflx_raster_shape(mask.get(), &w, &h, &c);
  if (w != image_w || h != image_h) {
    ConfigError("truth mask " + path + " does not match the image size");
  }
  std::size_t length = 0;
  const std::uint8_t* data = sflx_raster_data(mask.get(), &length);
  const std::uint32_t cols = (w + cell - 1) / cell;
  std::vector<std::uint32_t> units;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint8_t* px = data + (static_cast<std::size_t>(y) * w + x) * c;
      if (std::any_of(px, px + c, [](std::uint8_t v) { return v != 0; })) {
        units.push_back((y / cell) * cols + x / cell);
      }
    }
  }
  std::ranges::sort(units);
  units.erase(std::unique(units.begin(), units.end()), units.end());
  if (units.empty()) ConfigError("truth mask " + path + " is empty");
  return units;
}

struct Detection {
  sflx_detection summary{};
  int detected[3] = {0, 0, 0};
  int at_truth[3] = {0, 0, 0};
};

Detection Detect(const sflx_ranking* ranking, const std::vector<std::uint32_t>& truth) {
  Detection d;
  Check(sflx_topk_detect(ranking, truth.data(), truth.size(), kThresholds, 3,
                         &d.summary, d.detected, d.at_truth, nullptr),
        "detection");
  return d;
}

Json DetectionJson(const Detection& d) {
  Json by = Json::object();
  for (int i = 0; i < 3; ++i) {
    std::ostringstream key;
    key << kThresholds[i];
    by[key.str()] = {{"max_over_sweep", d.detected[i] != 0},
                     {"at_truth_size", d.at_truth[i] != 0}};
  }
  return Json{{"best_iou", d.summary.best_iou},
              {"best_percent", d.summary.best_percent},
              {"iou_at_truth_size", d.summary.iou_at_truth_size},
              {"detected", by}};
}

// Runs `work(i)` for i in [0, n) on up to `jobs` threads; the first failure
// is rethrown after all workers stop.
template <typename Work>
void ParallelFor(std::size_t n, unsigned jobs, Work&& work) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::optional<CliError> failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        work(i);
      } catch (const CliError& e) {
        std::lock_guard lock(mu);
        if (!failure) failure = e;
        next = n;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) throw *failure;
}

// ---- explain -------------------------------------------------------------

struct ExplainArgs {
  std::string image;
  std::string dump_suite;
};

int CmdExplain(const RunConfig& cfg, const ExplainArgs& args) {
  const Resolved r = Resolve(cfg);
  if (args.image.empty()) ConfigError("--image is required");
  if (cfg.classifier.empty()) ConfigError("--classifier is required");
  RasterPtr image = LoadRaster(args.image);
  ClassifierPtr classifier = MakeClassifier(cfg.classifier, r.options);
  SuitePtr suite = MakeSuite(classifier.get(), image.get(), r.options);
  if (!args.dump_suite.empty()) {
    Check(sflx_suite_write_json(suite.get(), args.dump_suite.c_str()), "suite dump");
  }

  sflx_best* raw = nullptr;
  Check(sflx_explain_best(classifier.get(), suite.get(), r.measures.data(),
                          r.measures.size(), &r.options, &raw),
        "explanation");
  BestPtr best(raw);

  const fs::path out(cfg.out);
  MakeDirs(out);
  std::uint64_t same = 0, different = 0;
  sflx_suite_balance(suite.get(), &same, &different);
  std::cout << "label " << sflx_suite_original_label(suite.get()) << ", "
            << sflx_suite_unit_count(suite.get()) << " units, suite " << same
            << " same / " << different << " different\n";
  for (std::size_t i = 0; i < sflx_best_count(best.get()); ++i) {
    const sflx_ranking* ranking = sflx_best_ranking_at(best.get(), i);
    const sflx_explanation* e = sflx_best_explanation_at(best.get(), i);
    const char* name = sflx_measure_name(sflx_explanation_measure(e));
    WriteMeasureDir(out / name, ranking, e);
    std::cout << name << ": " << ExplanationPixels(e).size() << " units ("
              << sflx_explanation_size_fraction(e) << ")\n";
  }
  if (sflx_best_count(best.get()) > 1) {
    const sflx_measure m = sflx_best_measure(best.get());
    std::size_t index = 0;
    while (sflx_explanation_measure(sflx_best_explanation_at(best.get(), index)) != m) {
      ++index;
    }
    WriteMeasureDir(out / "best", sflx_best_ranking_at(best.get(), index),
                    sflx_best_explanation(best.get()));
    std::cout << "best: " << sflx_measure_name(m) << "\n";
  }
  return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> images;
  std::vector<std::string> truths;
  std::string mode = "all";
};

struct MeasureMetrics {
  sflx_measure measure;
  std::optional<double> size_fraction;
  std::optional<sflx_deletion> deletion;
  std::optional<Detection> detection;
  std::vector<std::uint32_t> pixels;
};

struct ImageMetrics {
  std::string image;
  std::string label;
  std::uint64_t units = 0;
  std::vector<MeasureMetrics> per_measure;
};

ImageMetrics EvaluateImage(const RunConfig& cfg, const Resolved& r,
                           const std::string& path, const std::string& truth_path,
                           bool want_size, bool want_deletion, bool want_detect) {
  RasterPtr image = LoadRaster(path);
  std::uint32_t w = 0, h = 0;
  sflx_raster_shape(image.get(), &w, &h, nullptr);
  std::vector<std::uint32_t> truth;
  if (want_detect) truth = TruthUnits(truth_path, w, h, r.options.cell_size);

  ClassifierPtr classifier = MakeClassifier(cfg.classifier, r.options);
  SuitePtr suite = MakeSuite(classifier.get(), image.get(), r.options);
  ImageMetrics metrics;
  metrics.image = path;
  metrics.label = sflx_suite_original_label(suite.get());
  metrics.units = sflx_suite_unit_count(suite.get());
  for (sflx_measure m : r.measures) {
    MeasureMetrics mm;
    mm.measure = m;
    RankingPtr ranking = MakeRanking(suite.get(), m, r.options);
    if (want_size) {
      sflx_explanation* raw = nullptr;
      Check(sflx_explanation_build(classifier.get(), ranking.get(), &r.options, &raw),
            "explanation");
      ExplanationPtr e(raw);
      mm.size_fraction = sflx_explanation_size_fraction(e.get());
      mm.pixels = ExplanationPixels(e.get());
    }
    if (want_deletion) {
      sflx_deletion d;
      Check(sflx_deletion_curve(classifier.get(), ranking.get(), &d), "deletion");
      mm.deletion = d;
    }
    if (want_detect) mm.detection = Detect(ranking.get(), truth);
    metrics.per_measure.push_back(std::move(mm));
  }
  return metrics;
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "";
  Json j = *v;
  return j.dump();
}

int CmdEval(const RunConfig& cfg, const EvalArgs& args) {
  const Resolved r = Resolve(cfg);
  if (args.images.empty()) ConfigError("eval needs at least one --image");
  if (cfg.classifier.empty()) ConfigError("--classifier is required");
  bool want_size = false, want_deletion = false, want_detect = false;
  if (args.mode == "all") {
    want_size = want_deletion = true;
    want_detect = !args.truths.empty();
  } else if (args.mode == "size") {
    want_size = true;
  } else if (args.mode == "deletion") {
    want_deletion = true;
  } else if (args.mode == "detect") {
    want_detect = true;
  } else {
    ConfigError("--mode must be all, size, deletion or detect");
  }
  if (want_detect && args.truths.size() != args.images.size()) {
    ConfigError("detection needs one --truth mask per --image");
  }

  std::vector<ImageMetrics> results(args.images.size());
  ParallelFor(args.images.size(), cfg.jobs, [&](std::size_t i) {
    results[i] = EvaluateImage(cfg, r, args.images[i],
                               want_detect ? args.truths[i] : std::string(),
                               want_size, want_deletion, want_detect);
  });

  const fs::path out(cfg.out);
  MakeDirs(out);
  std::string csv =
      "image,measure,size_fraction,flip_fraction,best_iou,detect@0.5,"
      "detect@0.6,detect@0.7\n";
  std::map<sflx_measure, std::vector<double>> sizes;
  std::map<std::string, int> stems;
  for (const ImageMetrics& im : results) {
    std::string stem = fs::path(im.image).stem().string();
    if (const int seen = stems[stem]++; seen > 0) stem += "_" + std::to_string(seen);
    Json per = Json::object();
    for (const MeasureMetrics& mm : im.per_measure) {
      const char* name = sflx_measure_name(mm.measure);
      Json j = Json::object();
      std::optional<double> flip, iou;
      if (mm.size_fraction) {
        j["size_fraction"] = *mm.size_fraction;
        j["explanation_size"] = mm.pixels.size();
        sizes[mm.measure].push_back(*mm.size_fraction);
      }
      if (mm.deletion) {
        j["deletion"] = {{"flip_index", mm.deletion->flip_index},
                         {"flip_fraction", mm.deletion->flip_fraction},
                         {"flipped", mm.deletion->flipped != 0},
                         {"queries_used", mm.deletion->queries_used}};
        flip = mm.deletion->flip_fraction;
      }
      std::string detect_cells = ",,";
      if (mm.detection) {
        j["detection"] = DetectionJson(*mm.detection);
        iou = mm.detection->summary.best_iou;
        detect_cells.clear();
        for (int t = 0; t < 3; ++t) {
          detect_cells += (t ? "," : "") + std::to_string(mm.detection->detected[t]);
        }
      }
      per[name] = j;
      csv += im.image + "," + name + "," + Cell(mm.size_fraction) + "," +
             Cell(flip) + "," + Cell(iou) + "," + detect_cells + "\n";
    }
    const Json metrics{{"image", im.image},
                       {"label", im.label},
                       {"units", im.units},
                       {"config", ConfigJson(r)},
                       {"measures", per}};
    MakeDirs(out / stem);
    WriteText(out / stem / "metrics.json", metrics.dump(2) + "\n");
  }
  WriteText(out / "aggregate.csv", csv);

  std::string cdf = "measure,size,cumulative_fraction\n";
  for (const auto& [measure, values] : sizes) {
    std::vector<double> xs(values.size()), ys(values.size());
    std::size_t points = 0;
    Check(sflx_size_cdf(values.data(), values.size(), xs.data(), ys.data(), &points),
          "size cdf");
    for (std::size_t i = 0; i < points; ++i) {
      cdf += std::string(sflx_measure_name(measure)) + "," + Cell(xs[i]) + "," +
             Cell(ys[i]) + "\n";
    }
  }
  if (want_size) WriteText(out / "size_cdf.csv", cdf);
  std::cout << "evaluated " << results.size() << " image(s) into " << out.string()
            << "\n";
  return kExitOk;
}

// ---- chimera -------------------------------------------------------------

struct ChimeraArgs {
  std::string patch;
  std::string patch_mask;
  std::vector<std::string> backgrounds;
  std::uint32_t count = 100;
  std::uint32_t size = 32;
  std::uint32_t patch_size = 6;
  std::uint32_t channels = 3;
  double frac = 0.5;
  std::string target = "target";
  bool save_images = false;
};

int CmdChimera(const RunConfig& cfg, const ChimeraArgs& args) {
  const Resolved r = Resolve(cfg);
  if (!(args.frac > 0.0 && args.frac <= 1.0)) ConfigError("--frac must lie in (0,1]");
  if (args.backgrounds.empty()) {
    if (args.count == 0 || args.size == 0 || args.patch_size == 0 ||
        args.patch_size > args.size) {
      ConfigError("synthetic chimera needs count > 0 and 0 < patch-size <= size");
    }
    if (args.channels != 1 && args.channels != 3) ConfigError("--channels must be 1 or 3");
  }
  if (r.options.cell_size != 1) ConfigError("chimera works on single pixels (--cell 1)");

  // Everything synthetic derives from the run seed; the offsets keep the
  // streams apart.
  const std::uint64_t seed = r.options.seed;
  RasterPtr patch;
  RasterPtr patch_mask;
  std::vector<RasterPtr> backgrounds;
  if (!args.patch.empty()) {
    patch = LoadRaster(args.patch);
    if (!args.patch_mask.empty()) patch_mask = LoadRaster(args.patch_mask);
  } else {
    sflx_raster* raw = nullptr;
    Check(sflx_raster_synthetic(args.patch_size, args.patch_size, args.channels,
                                seed ^ 0x9a7c40ull, &raw),
          "patch");
    patch.reset(raw);
  }
  if (!args.backgrounds.empty()) {
    for (const std::string& path : args.backgrounds) backgrounds.push_back(LoadRaster(path));
  } else {
    std::uint32_t channels = 0;
    sflx_raster_shape(patch.get(), nullptr, nullptr, &channels);
    for (std::uint32_t i = 0; i < args.count; ++i) {
      sflx_raster* raw = nullptr;
      Check(sflx_raster_synthetic(args.size, args.size, channels,
                                  seed * 1000003ull + i + 1, &raw),
            "background");
      backgrounds.emplace_back(raw);
    }
  }

  ClassifierPtr classifier;
  if (cfg.classifier.empty()) {
    sflx_classifier* raw = nullptr;
    Check(sflx_classifier_create_patch(patch.get(), patch_mask.get(), args.frac,
                                       args.target.c_str(), "other", &r.options, &raw),
          "patch classifier");
    classifier.reset(raw);
  } else {
    classifier = MakeClassifier(cfg.classifier, r.options);
  }

  std::vector<const sflx_raster*> bg_ptrs;
  for (const auto& b : backgrounds) bg_ptrs.push_back(b.get());
  sflx_chimera* raw = nullptr;
  Check(sflx_chimera_generate(patch.get(), patch_mask.get(), bg_ptrs.data(),
                              bg_ptrs.size(), seed, args.target.c_str(),
                              classifier.get(), &raw),
        "chimera");
  ChimeraPtr chimera(raw);

  const fs::path out(cfg.out);
  MakeDirs(out);
  const std::size_t kept = sflx_chimera_count(chimera.get());
  std::string csv =
      "sample,background,x,y,measure,best_iou,best_percent,iou_at_truth_size,"
      "detect@0.5,detect@0.6,detect@0.7\n";
  struct Tally {
    double iou_sum = 0;
    int detected[3] = {0, 0, 0};
    int at_truth[3] = {0, 0, 0};
  };
  std::map<sflx_measure, Tally> tally;
  for (std::size_t i = 0; i < kept; ++i) {
    const sflx_raster* image = sflx_chimera_image(chimera.get(), i);
    std::size_t truth_count = 0;
    const std::uint32_t* truth_ptr = sflx_chimera_truth(chimera.get(), i, &truth_count);
    const std::vector<std::uint32_t> truth(truth_ptr, truth_ptr + truth_count);
    std::size_t background = 0;
    std::int32_t x = 0, y = 0;
    sflx_chimera_placement(chimera.get(), i, &background, &x, &y);
    if (args.save_images) {
      Check(sflx_raster_save(image,
                             (out / ("chimera_" + std::to_string(i) + ".png")).c_str()),
            "saving composite");
    }
    sflx_options o = r.options;
    o.seed = seed + i;
    SuitePtr suite = MakeSuite(classifier.get(), image, o);
    for (sflx_measure m : r.measures) {
      RankingPtr ranking = MakeRanking(suite.get(), m, o);
      const Detection d = Detect(ranking.get(), truth);
      Tally& t = tally[m];
      t.iou_sum += d.summary.best_iou;
      csv += std::to_string(i) + "," + std::to_string(background) + "," +
             std::to_string(x) + "," + std::to_string(y) + "," +
             sflx_measure_name(m) + "," + Cell(d.summary.best_iou) + "," +
             std::to_string(d.summary.best_percent) + "," +
             Cell(d.summary.iou_at_truth_size);
      for (int k = 0; k < 3; ++k) {
        csv += "," + std::to_string(d.detected[k]);
        t.detected[k] += d.detected[k];
        t.at_truth[k] += d.at_truth[k];
      }
      csv += "\n";
    }
  }
  WriteText(out / "chimera.csv", csv);

  Json per = Json::object();
  for (const auto& [m, t] : tally) {
    Json rates = Json::object();
    for (int k = 0; k < 3; ++k) {
      std::ostringstream key;
      key << kThresholds[k];
      rates[key.str()] = {
          {"max_over_sweep", static_cast<double>(t.detected[k]) / kept},
          {"at_truth_size", static_cast<double>(t.at_truth[k]) / kept}};
    }
    per[sflx_measure_name(m)] = {{"mean_best_iou", t.iou_sum / kept},
                                 {"detection_rate", rates}};
  }
  const Json summary{{"generated", bg_ptrs.size()},
                     {"retained", kept},
                     {"retention", bg_ptrs.empty() ? 0.0
                                                   : static_cast<double>(kept) /
                                                         bg_ptrs.size()},
                     {"config", ConfigJson(r)},
                     {"measures", per}};
  WriteText(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "retained " << kept << " of " << bg_ptrs.size() << " composites\n";
  for (const auto& [m, t] : tally) {
    std::cout << sflx_measure_name(m) << ": detected@0.5 " << t.detected[0] << "/"
              << kept << "\n";
  }
  return kExitOk;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
  std::string image;
  std::uint32_t size = 16;
  std::uint32_t repeat = 1;
};

int CmdBench(const RunConfig& cfg, const BenchArgs& args) {
  const Resolved r = Resolve(cfg);
  if (cfg.classifier.empty()) ConfigError("--classifier is required");
  if (args.repeat == 0) ConfigError("--repeat must be positive");
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
  };

  RasterPtr image;
  const auto t_load = Clock::now();
  if (!args.image.empty()) {
    image = LoadRaster(args.image);
  } else {
    if (args.size == 0) ConfigError("--size must be positive");
    sflx_raster* raw = nullptr;
    Check(sflx_raster_synthetic(args.size, args.size, 1, r.options.seed, &raw), "image");
    image.reset(raw);
  }
  const double load_ms = ms(Clock::now() - t_load);
  ClassifierPtr classifier = MakeClassifier(cfg.classifier, r.options);

  Json runs = Json::array();
  for (std::uint32_t rep = 0; rep < args.repeat; ++rep) {
    sflx_options o = r.options;
    o.seed = r.options.seed + rep;
    const auto t0 = Clock::now();
    SuitePtr suite = MakeSuite(classifier.get(), image.get(), o);
    const auto t1 = Clock::now();
    Json measures = Json::object();
    for (sflx_measure m : r.measures) {
      const auto a = Clock::now();
      RankingPtr ranking = MakeRanking(suite.get(), m, o);
      const auto b = Clock::now();
      sflx_options no_prune = o;
      no_prune.prune = 0;
      sflx_explanation* raw = nullptr;
      Check(sflx_explanation_build(classifier.get(), ranking.get(), &no_prune, &raw),
            "explanation");
      ExplanationPtr e(raw);
      const auto c = Clock::now();
      Json entry{{"ranking_ms", ms(b - a)},
                 {"explain_ms", ms(c - b)},
                 {"explain_queries", sflx_explanation_queries(e.get())},
                 {"explanation_size", ExplanationPixels(e.get()).size()}};
      if (o.prune) {
        sflx_explanation* pruned = nullptr;
        Check(sflx_explanation_prune(classifier.get(), e.get(), &pruned), "prune");
        ExplanationPtr p(pruned);
        entry["prune_ms"] = ms(Clock::now() - c);
        entry["pruned_size"] = ExplanationPixels(p.get()).size();
      }
      measures[sflx_measure_name(m)] = entry;
    }
    runs.push_back({{"seed", o.seed},
                    {"suite_ms", ms(t1 - t0)},
                    {"suite_queries", sflx_suite_size(suite.get()) + 1},
                    {"measures", measures}});
  }
  std::uint32_t w = 0, h = 0;
  sflx_raster_shape(image.get(), &w, &h, nullptr);
  const std::uint32_t g = r.options.cell_size;
  const Json report{{"units", ((w + g - 1) / g) * ((h + g - 1) / g)},
                    {"load_ms", load_ms},
                    {"config", ConfigJson(r)},
                    {"runs", runs}};
  const fs::path out(cfg.out);
  MakeDirs(out);
  WriteText(out / "bench.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// ---- selftest ------------------------------------------------------------

int CmdSelftest() {
  int passed = 0;
  char* report = nullptr;
  Check(sflx_selftest(&passed, &report), "selftest");
  std::cout << TakeString(report) << "\n";
  std::cout << (passed ? "selftest passed" : "selftest FAILED") << "\n";
  return passed ? kExitOk : kExitFailure;
}

void AddRunOptions(CLI::App& app, RunConfig& cfg) {
  app.add_option("--classifier", cfg.classifier,
                 "builtin:kofs:..., builtin:linear:..., builtin:const:..., "
                 "builtin:patch:... or proc:<command>");
  app.add_option("--measure", cfg.measures,
                 "comma-separated measures (ochiai,tarantula,zoltar,wong-ii) or all")
      ->capture_default_str();
  app.add_option("--sigma0", cfg.sigma0, "initial masked fraction or 'random'")
      ->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "sigma step")->capture_default_str();
  app.add_option("--m", cfg.m, "test suite size")->capture_default_str();
  app.add_option("--seed", cfg.seed, "PRNG seed (fallback: SFLX_SEED, then 0)");
  app.add_option("--bg", cfg.bg, "background color 'v' or 'r,g,b'")->capture_default_str();
  app.add_option("--cell", cfg.cell, "unit cell size g")->capture_default_str();
  app.add_flag("--prune", cfg.prune, "reduce explanations to 1-minimal sets");
  app.add_option("--search", cfg.search, "auto, linear or binary")->capture_default_str();
  app.add_option("--spectrum", cfg.spectrum, "masking or presence")->capture_default_str();
  app.add_option("--chunk", cfg.chunk, "mutants per sigma update")->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "parallel images (eval)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sflx: spectrum-based explanations for image classifiers"};
  app.set_version_flag("--version", std::string(sflx_version()));
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  AddRunOptions(app, cfg);

  ExplainArgs explain_args;
  CLI::App* explain = app.add_subcommand("explain", "explain one classification");
  explain->add_option("--image", explain_args.image, "input image (PNG/PGM/PPM)");
  explain->add_option("--dump-suite", explain_args.dump_suite,
                      "write the annotated test suite as JSON");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "size, deletion and detection metrics");
  eval->add_option("--image", eval_args.images, "input image (repeatable)");
  eval->add_option("--truth", eval_args.truths,
                   "ground-truth mask per image, nonzero = truth (repeatable)");
  eval->add_option("--mode", eval_args.mode, "all, size, deletion or detect")
      ->capture_default_str();

  ChimeraArgs chimera_args;
  CLI::App* chimera = app.add_subcommand("chimera", "planted-patch detection benchmark");
  chimera->add_option("--patch", chimera_args.patch, "patch image (default: synthetic)");
  chimera->add_option("--patch-mask", chimera_args.patch_mask, "patch mask image");
  chimera->add_option("--background", chimera_args.backgrounds,
                      "background image (repeatable; default: synthetic)");
  chimera->add_option("--count", chimera_args.count, "synthetic backgrounds")
      ->capture_default_str();
  chimera->add_option("--size", chimera_args.size, "synthetic background side")
      ->capture_default_str();
  chimera->add_option("--patch-size", chimera_args.patch_size, "synthetic patch side")
      ->capture_default_str();
  chimera->add_option("--channels", chimera_args.channels, "synthetic channels")
      ->capture_default_str();
  chimera->add_option("--frac", chimera_args.frac,
                      "patch classifier: minimum matching fraction")
      ->capture_default_str();
  chimera->add_option("--target", chimera_args.target, "target label")
      ->capture_default_str();
  chimera->add_flag("--save-images", chimera_args.save_images, "write composites");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "per-stage timings and query counts");
  bench->add_option("--image", bench_args.image, "input image (default: synthetic)");
  bench->add_option("--size", bench_args.size, "synthetic image side")
      ->capture_default_str();
  bench->add_option("--repeat", bench_args.repeat, "runs with seeds seed..seed+n-1")
      ->capture_default_str();

  CLI::App* selftest = app.add_subcommand("selftest", "formula oracle and brute-force checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (explain->parsed()) return CmdExplain(cfg, explain_args);
    if (eval->parsed()) return CmdEval(cfg, eval_args);
    if (chimera->parsed()) return CmdChimera(cfg, chimera_args);
    if (bench->parsed()) return CmdBench(cfg, bench_args);
    if (selftest->parsed()) return CmdSelftest();
  } catch (const CliError& e) {
    std::cerr << "sflx: " << e.message << "\n";
    return e.exit_code;
  }
  return kExitFailure;
}
