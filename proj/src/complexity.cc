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

#include <cmath>

#include "prunekit/errors.h"

namespace prunekit {
namespace {

int64_t layer_params(const Layer& layer) {
  if (const auto* c = std::get_if<Conv2D>(&layer.params)) {
    int64_t n = int64_t{c->kernel_h} * c->kernel_w * c->in_channels * c->out_channels;
    return n + (c->use_bias ? c->out_channels : 0);
  }
  if (const auto* b = std::get_if<BatchNorm>(&layer.params)) {
    return 4 * int64_t{b->channels};
  }
  if (const auto* d = std::get_if<Dense>(&layer.params)) {
    return int64_t{d->in_units} * d->out_units + (d->use_bias ? d->out_units : 0);
  }
  return 0;
}

}  // namespace

Count count_params(const Model& model) {
  Count out;
  for (const Layer& layer : model.layers) {
    int64_t p = layer_params(layer);
    out.per_layer.push_back({layer.name, layer.kind(), p});
    out.total += p;
  }
  return out;
}

Count count_macs(const Model& model, const Shape3& input_shape) {
  Model shaped = model;
  shaped.input_shape = input_shape;
  std::vector<Shape3> shapes = propagate_shapes(shaped);
  Count out;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    const Layer& layer = model.layers[i];
    int64_t m = 0;
    if (const auto* c = std::get_if<Conv2D>(&layer.params)) {
      m = int64_t{shapes[i].height} * shapes[i].width * c->kernel_h * c->kernel_w *
          c->in_channels * c->out_channels;
    } else if (const auto* d = std::get_if<Dense>(&layer.params)) {
      m = int64_t{d->in_units} * d->out_units;
    }
    out.per_layer.push_back({layer.name, layer.kind(), m});
    out.total += m;
  }
  return out;
}

Count count_macs(const Model& model) { return count_macs(model, model.input_shape); }

std::string_view to_string(MacsMode mode) {
  return mode == MacsMode::kPaper ? "paper" : "exact";
}

MacsMode parse_macs_mode(std::string_view text) {
  if (text == "paper") return MacsMode::kPaper;
  if (text == "exact") return MacsMode::kExact;
  throw ArgumentError("unknown MAC accounting mode '" + std::string(text) + "'");
}

double percent_reduction(int64_t before, int64_t after) {
  if (before == 0) return 0.0;
  double pct = 100.0 * static_cast<double>(before - after) / static_cast<double>(before);
  return std::round(pct * 100.0) / 100.0;
}

double ComplexityReport::params_reduction_percent() const {
  return percent_reduction(params_before, params_after);
}

double ComplexityReport::macs_reduction_percent() const {
  return percent_reduction(macs_before, macs_after);
}

ComplexityReport reduction_report(const Model& before, const Model& after,
                                  MacsMode mode) {
  if (before.layers.size() != after.layers.size()) {
    throw ArgumentError("models have different layer counts");
  }
  for (size_t i = 0; i < before.layers.size(); ++i) {
    if (before.layers[i].name != after.layers[i].name ||
        before.layers[i].kind() != after.layers[i].kind()) {
      throw ArgumentError("models differ at layer " + std::to_string(i) + " ('" +
                          before.layers[i].name + "' vs '" + after.layers[i].name + "')");
    }
  }
  Count pb = count_params(before);
  Count pa = count_params(after);
  Count mb = count_macs(before);
  Count ma = count_macs(after);

  ComplexityReport report;
  report.macs_mode = mode;
  report.params_before = pb.total;
  report.params_after = pa.total;
  report.macs_before = mb.total;
  for (size_t i = 0; i < before.layers.size(); ++i) {
    LayerDelta d;
    d.name = before.layers[i].name;
    d.kind = before.layers[i].kind();
    d.params_before = pb.per_layer[i].value;
    d.params_after = pa.per_layer[i].value;
    d.macs_before = mb.per_layer[i].value;
    if (mode == MacsMode::kExact) {
      d.macs_after = ma.per_layer[i].value;
    } else if (const auto* c = std::get_if<Conv2D>(&before.layers[i].params)) {
      int removed = c->out_channels - std::get<Conv2D>(after.layers[i].params).out_channels;
      if (removed < 0) throw ArgumentError("layer '" + d.name + "' gained filters");
      // Layer MACs are a multiple of out_channels, so this is exact.
      d.macs_after = d.macs_before - d.macs_before / c->out_channels * removed;
    } else {
      d.macs_after = d.macs_before;
    }
    report.macs_after += d.macs_after;
    report.per_layer.push_back(std::move(d));
  }
  return report;
}

ComplexityReport reduction_report(const Model& before, const PruningPlan& plan,
                                  MacsMode mode) {
  return reduction_report(before, apply_plan(before, plan), mode);
}

}  // namespace prunekit
