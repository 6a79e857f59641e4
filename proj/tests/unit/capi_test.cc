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

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

const char kKofs[] = "builtin:kofs:k=4:s=18,37,60,91,130,155,201,236";

TEST(CApiTest, ErrorsCarryStatusAndMessage) {
  sflx_raster* r = nullptr;
  const std::uint8_t data[3] = {1, 2, 3};
  EXPECT_EQ(sflx_raster_create(2, 2, 1, data, 3, &r), SFLX_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(r, nullptr);
  EXPECT_NE(std::string(sflx_last_error()), "");
  EXPECT_EQ(sflx_raster_load("/nonexistent/x.png", &r), SFLX_ERR_IO);
  sflx_classifier* c = nullptr;
  EXPECT_EQ(sflx_classifier_create("builtin:nope", nullptr, &c),
            SFLX_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(sflx_classifier_create(nullptr, nullptr, &c), SFLX_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(sflx_status_name(SFLX_ERR_CLASSIFIER_IO), "classifier-io");
  sflx_measure m;
  EXPECT_EQ(sflx_measure_parse("dstar", &m), SFLX_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(sflx_measure_parse("tarantula", &m), SFLX_OK);
  EXPECT_EQ(m, SFLX_MEASURE_TARANTULA);
}

TEST(CApiTest, MeasureValue) {
  double v = -1;
  ASSERT_EQ(sflx_measure_value(SFLX_MEASURE_OCHIAI, 1, 1, 1, 1, &v), SFLX_OK);
  EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(CApiTest, EndToEndPipeline) {
  sflx_options opt;
  sflx_options_default(&opt);
  EXPECT_DOUBLE_EQ(opt.sigma0, 0.2);
  EXPECT_EQ(opt.m, 2000u);
  opt.prune = 1;

  sflx_raster* image = nullptr;
  ASSERT_EQ(sflx_raster_synthetic(16, 16, 1, 2026, &image), SFLX_OK);
  sflx_classifier* h = nullptr;
  ASSERT_EQ(sflx_classifier_create(kKofs, &opt, &h), SFLX_OK);

  char* label = nullptr;
  ASSERT_EQ(sflx_classifier_classify(h, image, &label), SFLX_OK);
  EXPECT_STREQ(label, "y-target");
  sflx_string_free(label);

  sflx_suite* suite = nullptr;
  ASSERT_EQ(sflx_suite_generate(h, image, &opt, &suite), SFLX_OK);
  EXPECT_EQ(sflx_suite_size(suite), 2000u);
  EXPECT_EQ(sflx_suite_unit_count(suite), 256u);
  std::uint64_t same = 0, different = 0;
  sflx_suite_balance(suite, &same, &different);
  EXPECT_EQ(same + different, 2000u);

  const sflx_measure all[] = {SFLX_MEASURE_OCHIAI, SFLX_MEASURE_TARANTULA,
                              SFLX_MEASURE_ZOLTAR, SFLX_MEASURE_WONG_II};
  sflx_best* best = nullptr;
  ASSERT_EQ(sflx_explain_best(h, suite, all, 4, &opt, &best), SFLX_OK);
  ASSERT_EQ(sflx_best_count(best), 4u);
  const sflx_explanation* e = sflx_best_explanation(best);
  size_t count = 0;
  const std::uint32_t* pixels = sflx_explanation_pixels(e, &count);
  EXPECT_LE(count, 8u);
  for (size_t i = 0; i < count; ++i) {
    const std::vector<std::uint32_t> secret = {18, 37, 60, 91, 130, 155, 201, 236};
    EXPECT_NE(std::find(secret.begin(), secret.end(), pixels[i]), secret.end());
  }
  int sufficient = 0;
  ASSERT_EQ(sflx_explanation_verify(h, e, &sufficient), SFLX_OK);
  EXPECT_EQ(sufficient, 1);
  EXPECT_EQ(sflx_explanation_pruned(e), 1);

  const sflx_ranking* ranking = sflx_best_ranking_at(best, 0);
  EXPECT_EQ(sflx_ranking_size(ranking), 256u);
  sflx_deletion del;
  ASSERT_EQ(sflx_deletion_curve(h, ranking, &del), SFLX_OK);
  EXPECT_EQ(del.flipped, 1);

  const auto dir = std::filesystem::temp_directory_path() / "sflx_capi_test";
  std::filesystem::create_directories(dir);
  EXPECT_EQ(sflx_ranking_write_csv(ranking, (dir / "r.csv").c_str()), SFLX_OK);
  EXPECT_EQ(sflx_ranking_write_heatmap(ranking, (dir / "h.png").c_str()), SFLX_OK);
  EXPECT_EQ(sflx_explanation_write_json(e, (dir / "e.json").c_str()), SFLX_OK);
  EXPECT_EQ(sflx_explanation_write_overlay(e, (dir / "o.png").c_str()), SFLX_OK);
  EXPECT_TRUE(std::filesystem::exists(dir / "o.png"));
  std::filesystem::remove_all(dir);

  sflx_best_free(best);
  sflx_suite_free(suite);
  sflx_classifier_free(h);
  sflx_raster_free(image);
}

TEST(CApiTest, BruteForceAndCdf) {
  // Two units, either one sufficient.
  const std::uint8_t table[4] = {0, 1, 1, 1};
  std::int32_t min_size = 0;
  std::uint32_t sets[4];
  size_t count = 0;
  ASSERT_EQ(sflx_brute_force_min(2, table, &min_size, sets, 4, &count), SFLX_OK);
  EXPECT_EQ(min_size, 1);
  ASSERT_EQ(count, 2u);
  EXPECT_EQ(sets[0], 1u);
  EXPECT_EQ(sets[1], 2u);

  const double sizes[] = {0.2, 0.1, 0.2};
  double xs[3], ys[3];
  size_t points = 0;
  ASSERT_EQ(sflx_size_cdf(sizes, 3, xs, ys, &points), SFLX_OK);
  ASSERT_EQ(points, 2u);
  EXPECT_DOUBLE_EQ(xs[1], 0.2);
  EXPECT_DOUBLE_EQ(ys[1], 1.0);
}

TEST(CApiTest, SelftestPasses) {
  int passed = 0;
  char* report = nullptr;
  ASSERT_EQ(sflx_selftest(&passed, &report), SFLX_OK);
  EXPECT_EQ(passed, 1);
  ASSERT_NE(report, nullptr);
  sflx_string_free(report);
}

}  // namespace
