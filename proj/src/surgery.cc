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

#include "prunekit/surgery.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "prunekit/errors.h"

namespace prunekit {
namespace {

using Json = nlohmann::ordered_json;

std::vector<int> complement(int n, const std::vector<int>& removed) {
  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(removed.begin(), removed.end(), i)) kept.push_back(i);
  }
  return kept;
}

// Flattened positions of the given channels of a feature map.
std::vector<int> flattened_positions(const Shape3& shape, const std::vector<int>& channels,
                                     FlattenOrder order) {
  std::vector<int> out;
  for (int ch : channels) {
    for (int r = 0; r < shape.height; ++r) {
      for (int c = 0; c < shape.width; ++c) {
        out.push_back(order == FlattenOrder::kChannelsLast
                          ? (r * shape.width + c) * shape.channels + ch
                          : (ch * shape.height + r) * shape.width + c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Tensor remove_along_axis(const Tensor& t, int axis, const std::vector<int>& removed) {
  const std::vector<int64_t>& shape = t.spec.shape;
  int64_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  int64_t extent = shape[axis];
  std::vector<int> keep = complement(static_cast<int>(extent), removed);

  Tensor out;
  out.spec = t.spec;
  out.spec.shape[axis] = static_cast<int64_t>(keep.size());
  out.values.reserve(static_cast<size_t>(outer * inner) * keep.size());
  for (int64_t o = 0; o < outer; ++o) {
    for (int k : keep) {
      auto first = t.values.begin() + static_cast<std::ptrdiff_t>((o * extent + k) * inner);
      out.values.insert(out.values.end(), first, first + static_cast<std::ptrdiff_t>(inner));
    }
  }
  out.spec.element_count = out.values.size();
  return out;
}

void slice_weight(Model& model, const Layer& layer, const std::string& role, int axis,
                  const std::vector<int>& removed) {
  auto it = layer.weights.find(role);
  if (it == layer.weights.end()) return;
  Tensor* t = model.find_tensor(it->second);
  *t = remove_along_axis(*t, axis, removed);
}

}  // namespace

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kOutputChannels: return "output_channels";
    case EditKind::kInputChannels: return "input_channels";
    case EditKind::kBatchNormChannels: return "batchnorm_channels";
    case EditKind::kDenseRows: return "dense_rows";
  }
  return "unknown";
}

PruningPlan build_plan(const Model& model, const Removals& removals) {
  std::vector<Shape3> shapes = propagate_shapes(model);
  for (const auto& [name, indices] : removals) {
    const Layer& layer = model.layer(name);  // throws ArgumentError if unknown
    if (layer.kind() != LayerKind::kConv2D) {
      throw ArgumentError("layer '" + name + "' is not a conv2d layer");
    }
  }

  PruningPlan plan;
  plan.flatten_order = model.flatten_order;
  std::vector<int> pending;
  Shape3 cur = model.input_shape;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    const Layer& layer = model.layers[i];
    switch (layer.kind()) {
      case LayerKind::kConv2D: {
        const auto& conv = std::get<Conv2D>(layer.params);
        if (!pending.empty()) {
          plan.edits.push_back({layer.name, EditKind::kInputChannels, pending});
        }
        std::set<int> unique;
        if (auto it = removals.find(layer.name); it != removals.end()) {
          for (int f : it->second) {
            if (f < 0 || f >= conv.out_channels) {
              throw ArgumentError("filter index " + std::to_string(f) +
                                  " out of range for layer '" + layer.name + "' with " +
                                  std::to_string(conv.out_channels) + " filters");
            }
            unique.insert(f);
          }
        }
        std::vector<int> removed(unique.begin(), unique.end());
        if (static_cast<int>(removed.size()) == conv.out_channels) {
          throw PlanError("plan removes every filter of layer '" + layer.name + "'");
        }
        plan.layers.push_back({layer.name, complement(conv.out_channels, removed), removed});
        if (!removed.empty()) {
          plan.edits.push_back({layer.name, EditKind::kOutputChannels, removed});
        }
        pending = std::move(removed);
        break;
      }
      case LayerKind::kBatchNorm:
        if (!pending.empty()) {
          plan.edits.push_back({layer.name, EditKind::kBatchNormChannels, pending});
        }
        break;
      case LayerKind::kFlatten:
        if (!pending.empty()) {
          if (!model.flatten_order) {
            throw PlanError("model does not record a flatten order; refusing to "
                            "propagate channel removals through '" + layer.name + "'");
          }
          pending = flattened_positions(cur, pending, *model.flatten_order);
        }
        break;
      case LayerKind::kDense:
        if (!pending.empty()) {
          plan.edits.push_back({layer.name, EditKind::kDenseRows, pending});
          pending.clear();
        }
        break;
      case LayerKind::kSoftmax:
        if (!pending.empty()) {
          throw PlanError("channel removals cannot cross softmax layer '" + layer.name + "'");
        }
        break;
      case LayerKind::kMaxPool:
      case LayerKind::kReLU:
      case LayerKind::kDropout:
        break;
    }
    cur = shapes[i];
  }
  return plan;
}

Removals removals_of(const PruningPlan& plan) {
  Removals out;
  for (const LayerPlan& lp : plan.layers) {
    if (!lp.removed.empty()) out[lp.name] = lp.removed;
  }
  return out;
}

void validate_plan(const Model& model, const PruningPlan& plan) {
  PruningPlan expected;
  try {
    expected = build_plan(model, removals_of(plan));
  } catch (const Error& e) {
    throw ValidationError(std::string("plan does not fit model: ") + e.what());
  }
  if (expected.layers != plan.layers) {
    throw ValidationError("plan layer list does not match the model's conv layers");
  }
  if (expected.edits != plan.edits) {
    throw ValidationError("plan edits are not the propagation of its removals");
  }
}

Model apply_plan(const Model& model, const PruningPlan& plan) {
  validate_plan(model, plan);
  Model out = model;
  for (const SliceEdit& edit : plan.edits) {
    int index = out.layer_index(edit.layer);
    Layer& layer = out.layers[index];
    int count = static_cast<int>(edit.removed.size());
    switch (edit.kind) {
      case EditKind::kOutputChannels: {
        slice_weight(out, layer, "kernel", 0, edit.removed);
        slice_weight(out, layer, "bias", 0, edit.removed);
        std::get<Conv2D>(layer.params).out_channels -= count;
        break;
      }
      case EditKind::kInputChannels:
        slice_weight(out, layer, "kernel", 1, edit.removed);
        std::get<Conv2D>(layer.params).in_channels -= count;
        break;
      case EditKind::kBatchNormChannels:
        for (const char* role : {"gamma", "beta", "moving_mean", "moving_variance"}) {
          slice_weight(out, layer, role, 0, edit.removed);
        }
        std::get<BatchNorm>(layer.params).channels -= count;
        break;
      case EditKind::kDenseRows:
        slice_weight(out, layer, "kernel", 0, edit.removed);
        std::get<Dense>(layer.params).in_units -= count;
        break;
    }
  }
  assign_sequential_offsets(out);
  ensure_valid(out);
  return out;
}

std::string plan_to_json(const PruningPlan& plan, int indent) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (plan.flatten_order) {
    j["flatten_order"] = std::string(to_string(*plan.flatten_order));
  } else {
    j["flatten_order"] = nullptr;
  }
  j["layers"] = Json::array();
  for (const LayerPlan& lp : plan.layers) {
    j["layers"].push_back({{"name", lp.name}, {"kept", lp.kept}, {"removed", lp.removed}});
  }
  j["edits"] = Json::array();
  for (const SliceEdit& e : plan.edits) {
    j["edits"].push_back({{"layer", e.layer},
                          {"kind", std::string(to_string(e.kind))},
                          {"removed", e.removed}});
  }
  return j.dump(indent);
}

PruningPlan plan_from_json(std::string_view text) {
  PruningPlan plan;
  try {
    Json j = Json::parse(text);
    if (j.value("schema_version", 0) != kSchemaVersion) {
      throw FormatError("unsupported plan schema_version");
    }
    if (j.contains("flatten_order") && !j["flatten_order"].is_null()) {
      plan.flatten_order = parse_flatten_order(j["flatten_order"].get<std::string>());
    }
    for (const Json& lj : j.at("layers")) {
      LayerPlan lp;
      lp.name = lj.at("name").get<std::string>();
      lp.kept = lj.at("kept").get<std::vector<int>>();
      lp.removed = lj.at("removed").get<std::vector<int>>();
      plan.layers.push_back(std::move(lp));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed pruning plan: ") + e.what());
  }
  return plan;
}

PruningPlan rebind_plan(const Model& model, const PruningPlan& parsed) {
  if (parsed.flatten_order != model.flatten_order) {
    throw ValidationError("plan flatten order does not match the model header");
  }
  Removals removals;
  for (const LayerPlan& lp : parsed.layers) {
    if (!lp.removed.empty()) removals[lp.name] = lp.removed;
  }
  PruningPlan plan;
  try {
    plan = build_plan(model, removals);
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("plan does not fit model: ") + e.what());
  }
  for (const LayerPlan& lp : parsed.layers) {
    auto it = std::find_if(plan.layers.begin(), plan.layers.end(),
                           [&](const LayerPlan& p) { return p.name == lp.name; });
    if (it == plan.layers.end() || *it != lp) {
      throw ValidationError("plan entry for layer '" + lp.name +
                            "' is inconsistent with the model");
    }
  }
  return plan;
}

}  // namespace prunekit
