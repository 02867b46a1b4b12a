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

#ifndef PRUNEKIT_COMPLEXITY_H_
#define PRUNEKIT_COMPLEXITY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prunekit/model_store.h"
#include "prunekit/surgery.h"

namespace prunekit {

struct LayerCount {
  std::string name;
  LayerKind kind = LayerKind::kConv2D;
  int64_t value = 0;
};

struct Count {
  int64_t total = 0;
  std::vector<LayerCount> per_layer;  // every layer, in model order
};

// conv: kh*kw*in*out (+out bias); batchnorm: 4*channels (moving statistics
// included); dense: in*out (+out bias); everything else 0.
Count count_params(const Model& model);

// conv: out_h*out_w*kh*kw*in*out; dense: in*out; everything else 0.
Count count_macs(const Model& model);
Count count_macs(const Model& model, const Shape3& input_shape);

// kPaper charges each conv layer only for its own removed filters,
// (removed / original) * original layer MACs, ignoring savings in the layers
// that consume its output. kExact recounts the pruned model.
enum class MacsMode { kPaper, kExact };

std::string_view to_string(MacsMode mode);
MacsMode parse_macs_mode(std::string_view text);

struct LayerDelta {
  std::string name;
  LayerKind kind = LayerKind::kConv2D;
  int64_t params_before = 0;
  int64_t params_after = 0;
  int64_t macs_before = 0;
  int64_t macs_after = 0;
};

struct ComplexityReport {
  MacsMode macs_mode = MacsMode::kExact;
  int64_t params_before = 0;
  int64_t params_after = 0;
  int64_t macs_before = 0;
  int64_t macs_after = 0;
  std::vector<LayerDelta> per_layer;

  int64_t params_removed() const { return params_before - params_after; }
  int64_t macs_removed() const { return macs_before - macs_after; }
  // 100 * (before - after) / before, rounded to 0.01.
  double params_reduction_percent() const;
  double macs_reduction_percent() const;
};

// Throws ArgumentError unless both models have the same layer sequence
// (names and kinds).
ComplexityReport reduction_report(const Model& before, const Model& after,
                                  MacsMode mode);
ComplexityReport reduction_report(const Model& before, const PruningPlan& plan,
                                  MacsMode mode);

double percent_reduction(int64_t before, int64_t after);

}  // namespace prunekit

#endif  // PRUNEKIT_COMPLEXITY_H_
