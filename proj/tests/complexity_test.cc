/* Copyright 2026 The PruneKit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "prunekit/complexity.h"

#include <gtest/gtest.h>

#include <random>

#include "prunekit/baseline.h"
#include "prunekit/errors.h"
#include "prunekit/surgery.h"
#include "test_util.h"

namespace prunekit {
namespace {

int64_t layer_value(const Count& c, const std::string& name) {
  for (const LayerCount& l : c.per_layer) {
    if (l.name == name) return l.value;
  }
  ADD_FAILURE() << "no layer " << name;
  return -1;
}

// Removing 5/5/10 filters from C1/C2/C3 uses the lowest indices; which
// filters are removed does not affect the counts.
Removals first_filters(std::initializer_list<std::pair<const char*, int>> layers) {
  Removals r;
  for (const auto& [name, count] : layers) {
    for (int i = 0; i < count; ++i) r[name].push_back(i);
  }
  return r;
}

ComplexityReport baseline_report(const Removals& removals, MacsMode mode) {
  Model m = dcase_baseline(0);
  return reduction_report(m, build_plan(m, removals), mode);
}

TEST(CountParamsTest, LayerClosedForms) {
  Model m = ModelBuilder({40, 500, 1}, RandomInit(0))
                .conv2d("C", 16, 7, 7)
                .maxpool("P", 40, 500)
                .flatten("F")
                .dense("D", 100)
                .build();
  Count c = count_params(m);
  EXPECT_EQ(layer_value(c, "C"), 7 * 7 * 1 * 16 + 16);
  EXPECT_EQ(layer_value(c, "C"), 800);
  // flatten of 1x1x16; a 64-wide input gives the 6500 closed form below.
  EXPECT_EQ(layer_value(c, "D"), 16 * 100 + 100);
  EXPECT_EQ(layer_value(c, "P"), 0);

  Model d = ModelBuilder({1, 1, 64}, RandomInit(0)).dense("D", 100).build();
  EXPECT_EQ(count_params(d).total, 6500);
}

TEST(CountParamsTest, BiasAndBatchNorm) {
  Model m = ModelBuilder({5, 5, 3}, RandomInit(0))
                .conv2d("C", 4, 3, 3, Padding::kSame, 1, /*use_bias=*/false)
                .batchnorm("BN")
                .flatten("F")
                .dense("D", 2, /*use_bias=*/false)
                .build();
  Count c = count_params(m);
  EXPECT_EQ(layer_value(c, "C"), 3 * 3 * 3 * 4);
  EXPECT_EQ(layer_value(c, "BN"), 16);
  EXPECT_EQ(layer_value(c, "D"), 100 * 2);
}

TEST(CountParamsTest, Baseline) {
  Count c = count_params(dcase_baseline(0));
  EXPECT_EQ(c.total, 46246);
  int64_t sum = 0;
  for (const LayerCount& l : c.per_layer) sum += l.value;
  EXPECT_EQ(sum, c.total);
}

TEST(CountMacsTest, LayerClosedForms) {
  Model m = ModelBuilder({40, 500, 16}, RandomInit(0)).conv2d("C", 16, 7, 7).build();
  EXPECT_EQ(count_macs(m).total, 40LL * 500 * 7 * 7 * 16 * 16);
  EXPECT_EQ(count_macs(m).total, 250880000);

  Model d = ModelBuilder({1, 1, 64}, RandomInit(0)).dense("D", 100).build();
  EXPECT_EQ(count_macs(d).total, 6400);
}

TEST(CountMacsTest, ValidPaddingAndStride) {
  Model m = ModelBuilder({9, 11, 2}, RandomInit(0))
                .conv2d("C", 3, 3, 2, Padding::kValid, 2)
                .build();
  // out = ((9-3)/2+1) x ((11-2)/2+1) = 4 x 5
  EXPECT_EQ(count_macs(m).total, 4 * 5 * 3 * 2 * 2 * 3);
}

TEST(CountMacsTest, Baseline) {
  Count c = count_macs(dcase_baseline(0));
  EXPECT_EQ(c.total, 286637800);
  EXPECT_NEAR(static_cast<double>(c.total), 286e6, 0.01 * 286e6);
  EXPECT_EQ(layer_value(c, "C1"), 15680000);
  EXPECT_EQ(layer_value(c, "C2"), 250880000);
  EXPECT_EQ(layer_value(c, "C3"), 20070400);
}

TEST(CountMacsTest, ExplicitInputShape) {
  Model m = ModelBuilder({10, 10, 1}, RandomInit(0)).conv2d("C", 2, 3, 3).build();
  EXPECT_EQ(count_macs(m, {20, 10, 1}).total, 2 * count_macs(m).total);
}

TEST(ReductionReportTest, PaperModeReductions) {
  ComplexityReport c1 = baseline_report(first_filters({{"C1", 5}}), MacsMode::kPaper);
  EXPECT_EQ(c1.macs_removed(), 4900000);
  EXPECT_EQ(c1.params_removed(), 4190);
  EXPECT_DOUBLE_EQ(c1.macs_reduction_percent(), 1.71);
  EXPECT_DOUBLE_EQ(c1.params_reduction_percent(), 9.06);

  ComplexityReport c2 = baseline_report(first_filters({{"C2", 5}}), MacsMode::kPaper);
  EXPECT_EQ(c2.macs_removed(), 78400000);
  EXPECT_EQ(c2.params_removed(), 11785);
  EXPECT_DOUBLE_EQ(c2.macs_reduction_percent(), 27.35);
  EXPECT_DOUBLE_EQ(c2.params_reduction_percent(), 25.48);

  ComplexityReport c3 = baseline_report(first_filters({{"C3", 10}}), MacsMode::kPaper);
  EXPECT_EQ(c3.macs_removed(), 6272000);
  EXPECT_EQ(c3.params_removed(), 9890);
  EXPECT_DOUBLE_EQ(c3.macs_reduction_percent(), 2.19);
  EXPECT_DOUBLE_EQ(c3.params_reduction_percent(), 21.39);

  ComplexityReport all =
      baseline_report(first_filters({{"C1", 5}, {"C2", 5}, {"C3", 10}}), MacsMode::kPaper);
  EXPECT_EQ(all.macs_removed(), 89572000);
  EXPECT_EQ(all.params_removed(), 22190);
  EXPECT_DOUBLE_EQ(all.macs_reduction_percent(), 31.25);
  EXPECT_DOUBLE_EQ(all.params_reduction_percent(), 47.98);
}

TEST(ReductionReportTest, ExactModeCountsDownstreamSavings) {
  ComplexityReport c1 = baseline_report(first_filters({{"C1", 5}}), MacsMode::kExact);
  EXPECT_EQ(c1.macs_after, 40LL * 500 * 49 * 11 + 40LL * 500 * 49 * 11 * 16 + 20070400 + 7400);
  ComplexityReport c3 = baseline_report(first_filters({{"C3", 10}}), MacsMode::kExact);
  EXPECT_EQ(c3.macs_removed(), 6272000 + 2000);
}

TEST(ReductionReportTest, IdentityIsZero) {
  Model m = dcase_baseline(0);
  for (MacsMode mode : {MacsMode::kPaper, MacsMode::kExact}) {
    ComplexityReport r = reduction_report(m, m, mode);
    EXPECT_EQ(r.params_reduction_percent(), 0.0);
    EXPECT_EQ(r.macs_reduction_percent(), 0.0);
    EXPECT_EQ(r.macs_after, r.macs_before);
  }
}

TEST(ReductionReportTest, TotalsMatchPerLayerSums) {
  ComplexityReport r =
      baseline_report(first_filters({{"C2", 3}, {"C3", 7}}), MacsMode::kPaper);
  int64_t pb = 0, pa = 0, mb = 0, ma = 0;
  for (const LayerDelta& d : r.per_layer) {
    pb += d.params_before;
    pa += d.params_after;
    mb += d.macs_before;
    ma += d.macs_after;
  }
  EXPECT_EQ(pb, r.params_before);
  EXPECT_EQ(pa, r.params_after);
  EXPECT_EQ(mb, r.macs_before);
  EXPECT_EQ(ma, r.macs_after);
}

TEST(ReductionReportTest, ModeOrderingAndAdditivity) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    Model m = testing::random_model(rng);
    Removals all;
    int64_t paper_sum = 0;
    for (const Layer& l : m.layers) {
      const auto* c = std::get_if<Conv2D>(&l.params);
      if (!c) continue;
      int k = static_cast<int>(rng() % c->out_channels);  // 0..out-1 removals
      for (int i = 0; i < k; ++i) all[l.name].push_back(i);
      if (k == 0) continue;
      Removals single{{l.name, all[l.name]}};
      ComplexityReport paper = reduction_report(m, build_plan(m, single), MacsMode::kPaper);
      ComplexityReport exact = reduction_report(m, build_plan(m, single), MacsMode::kExact);
      EXPECT_GE(exact.macs_removed(), paper.macs_removed());
      paper_sum += paper.macs_removed();
    }
    ComplexityReport combined = reduction_report(m, build_plan(m, all), MacsMode::kPaper);
    EXPECT_EQ(combined.macs_removed(), paper_sum);
  }
}

TEST(ReductionReportTest, Monotonicity) {
  Model m = dcase_baseline(0);
  for (MacsMode mode : {MacsMode::kPaper, MacsMode::kExact}) {
    int64_t last_params = -1, last_macs = -1;
    for (int k = 0; k < 16; ++k) {
      Removals r = first_filters({{"C2", k}, {"C3", 2 * k}});
      ComplexityReport rep = reduction_report(m, build_plan(m, r), mode);
      EXPECT_GE(rep.params_removed(), last_params);
      EXPECT_GE(rep.macs_removed(), last_macs);
      last_params = rep.params_removed();
      last_macs = rep.macs_removed();
    }
  }
}

TEST(ReductionReportTest, IncomparableModels) {
  Model m = dcase_baseline(0);
  Model other = ModelBuilder({40, 500, 1}, RandomInit(0)).conv2d("C1", 4, 3, 3).build();
  EXPECT_THROW(reduction_report(m, other, MacsMode::kExact), ArgumentError);
}

TEST(PercentTest, RoundsToHundredths) {
  EXPECT_DOUBLE_EQ(percent_reduction(3, 2), 33.33);
  EXPECT_DOUBLE_EQ(percent_reduction(3, 1), 66.67);
  EXPECT_EQ(percent_reduction(0, 0), 0.0);
}

}  // namespace
}  // namespace prunekit
