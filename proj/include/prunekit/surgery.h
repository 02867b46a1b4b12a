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

#ifndef PRUNEKIT_SURGERY_H_
#define PRUNEKIT_SURGERY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prunekit/model_store.h"

namespace prunekit {

// Filters to remove, keyed by conv layer name.
using Removals = std::map<std::string, std::vector<int>>;

struct LayerPlan {
  std::string name;
  std::vector<int> kept;     // ascending
  std::vector<int> removed;  // ascending
  bool operator==(const LayerPlan&) const = default;
};

enum class EditKind {
  kOutputChannels,     // conv kernel axis 0 and bias
  kInputChannels,      // conv kernel axis 1
  kBatchNormChannels,  // all four batch-norm vectors
  kDenseRows,          // dense kernel axis 0 (input units)
};

std::string_view to_string(EditKind kind);

// Indices deleted along one axis of one layer's weights.
struct SliceEdit {
  std::string layer;
  EditKind kind = EditKind::kOutputChannels;
  std::vector<int> removed;  // ascending
  bool operator==(const SliceEdit&) const = default;
};

// One LayerPlan per conv layer of the model, in model order, plus every
// weight slice implied by propagating the removed channels downstream.
struct PruningPlan {
  std::vector<LayerPlan> layers;
  std::vector<SliceEdit> edits;
  std::optional<FlattenOrder> flatten_order;
  bool operator==(const PruningPlan&) const = default;
};

// Throws ArgumentError for unknown or non-conv layers and out-of-range
// indices, PlanError when a layer would lose every filter or a removal must
// cross a flatten whose order the model does not record.
PruningPlan build_plan(const Model& model, const Removals& removals);

Removals removals_of(const PruningPlan& plan);

// Throws ValidationError when the plan does not describe `model`.
void validate_plan(const Model& model, const PruningPlan& plan);

// Slices weights according to the plan. Surviving values are copied
// bit-for-bit and kept filters retain their relative order.
Model apply_plan(const Model& model, const PruningPlan& plan);

// JSON: {"schema_version", "flatten_order", "layers": [{"name", "kept",
// "removed"}], "edits": [...]}. Parsing reads layers and flatten order only;
// edits are re-derived against a model by build_plan.
std::string plan_to_json(const PruningPlan& plan, int indent = 2);
PruningPlan plan_from_json(std::string_view text);

// Rebuilds the plan against `model` and checks it matches the parsed kept
// and removed lists. Throws ValidationError on mismatch.
PruningPlan rebind_plan(const Model& model, const PruningPlan& parsed);

}  // namespace prunekit

#endif  // PRUNEKIT_SURGERY_H_
