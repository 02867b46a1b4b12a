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

#include "prunekit/model_builder.h"

#include <cmath>
#include <utility>

#include "prunekit/errors.h"

namespace prunekit {

float RandomInit::operator()(const Layer& layer, const std::string& role,
                             size_t /*index*/) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double fan_in = 1.0;
  if (const auto* c = std::get_if<Conv2D>(&layer.params)) {
    fan_in = static_cast<double>(c->in_channels) * c->kernel_h * c->kernel_w;
  } else if (const auto* d = std::get_if<Dense>(&layer.params)) {
    fan_in = d->in_units;
  }
  if (role == "kernel") return static_cast<float>(normal(*rng_) / std::sqrt(fan_in));
  if (role == "bias") return static_cast<float>(0.05 * normal(*rng_));
  if (role == "gamma") return static_cast<float>(1.0 + 0.1 * normal(*rng_));
  if (role == "beta") return static_cast<float>(0.1 * normal(*rng_));
  if (role == "moving_mean") return static_cast<float>(0.1 * normal(*rng_));
  if (role == "moving_variance") return static_cast<float>(0.5 + uniform(*rng_));
  return 0.0f;
}

ModelBuilder::ModelBuilder(Shape3 input_shape, WeightInit init)
    : shape_(input_shape), init_(std::move(init)) {
  model_.input_shape = input_shape;
}

void ModelBuilder::add(Layer layer) {
  for (const WeightSlot& slot : weight_slots(layer.params)) {
    Tensor t;
    t.spec.name = layer.name + "/" + slot.role;
    t.spec.shape = slot.shape;
    t.spec.axis_order = slot.axis_order;
    size_t count = 1;
    for (int64_t d : slot.shape) count *= static_cast<size_t>(d);
    t.spec.element_count = count;
    t.values.resize(count);
    for (size_t i = 0; i < count; ++i) t.values[i] = init_(layer, slot.role, i);
    layer.weights[slot.role] = t.spec.name;
    model_.tensors.push_back(std::move(t));
  }
  model_.layers.push_back(std::move(layer));
}

ModelBuilder& ModelBuilder::conv2d(const std::string& name, int filters,
                                   int kernel_h, int kernel_w, Padding padding,
                                   int stride, bool use_bias) {
  Conv2D p{filters, shape_.channels, kernel_h, kernel_w, stride, padding, use_bias};
  add({name, p, {}});
  if (padding == Padding::kSame) {
    shape_ = {(shape_.height + stride - 1) / stride,
              (shape_.width + stride - 1) / stride, filters};
  } else {
    shape_ = {(shape_.height - kernel_h) / stride + 1,
              (shape_.width - kernel_w) / stride + 1, filters};
  }
  return *this;
}

ModelBuilder& ModelBuilder::batchnorm(const std::string& name, double epsilon) {
  add({name, BatchNorm{shape_.channels, epsilon}, {}});
  return *this;
}

ModelBuilder& ModelBuilder::relu(const std::string& name) {
  add({name, ReLU{}, {}});
  return *this;
}

ModelBuilder& ModelBuilder::maxpool(const std::string& name, int pool_h, int pool_w) {
  add({name, MaxPool{pool_h, pool_w}, {}});
  shape_ = {shape_.height / pool_h, shape_.width / pool_w, shape_.channels};
  return *this;
}

ModelBuilder& ModelBuilder::dropout(const std::string& name, double rate) {
  add({name, Dropout{rate}, {}});
  return *this;
}

ModelBuilder& ModelBuilder::flatten(const std::string& name) {
  add({name, Flatten{}, {}});
  shape_ = {1, 1, static_cast<int>(shape_.size())};
  return *this;
}

ModelBuilder& ModelBuilder::dense(const std::string& name, int units, bool use_bias) {
  add({name, Dense{shape_.channels, units, use_bias}, {}});
  shape_ = {1, 1, units};
  return *this;
}

ModelBuilder& ModelBuilder::softmax(const std::string& name) {
  add({name, Softmax{}, {}});
  return *this;
}

ModelBuilder& ModelBuilder::flatten_order(FlattenOrder order) {
  model_.flatten_order = order;
  return *this;
}

Model ModelBuilder::build() const {
  Model m = model_;
  assign_sequential_offsets(m);
  ensure_valid(m);
  return m;
}

}  // namespace prunekit
