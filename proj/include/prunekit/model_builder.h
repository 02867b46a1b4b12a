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

#ifndef PRUNEKIT_MODEL_BUILDER_H_
#define PRUNEKIT_MODEL_BUILDER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include "prunekit/model_store.h"

namespace prunekit {

// Produces the value of element `index` of a weight tensor with the given
// role ("kernel", "bias", "gamma", "beta", "moving_mean", "moving_variance").
using WeightInit =
    std::function<float(const Layer& layer, const std::string& role, size_t index)>;

// Deterministic pseudo-random weights: scaled normal kernels, small biases,
// gamma near 1, strictly positive moving variances.
class RandomInit {
 public:
  explicit RandomInit(uint64_t seed) : rng_(std::make_shared<std::mt19937_64>(seed)) {}
  float operator()(const Layer& layer, const std::string& role, size_t index);

 private:
  std::shared_ptr<std::mt19937_64> rng_;
};

// Appends layers to a sequential model, inferring input channels and dense
// fan-in from the running feature-map shape. Weight tensors are named
// "<layer>/<role>".
class ModelBuilder {
 public:
  ModelBuilder(Shape3 input_shape, WeightInit init);

  ModelBuilder& conv2d(const std::string& name, int filters, int kernel_h,
                       int kernel_w, Padding padding = Padding::kSame,
                       int stride = 1, bool use_bias = true);
  ModelBuilder& batchnorm(const std::string& name, double epsilon = 1e-3);
  ModelBuilder& relu(const std::string& name);
  ModelBuilder& maxpool(const std::string& name, int pool_h, int pool_w);
  ModelBuilder& dropout(const std::string& name, double rate);
  ModelBuilder& flatten(const std::string& name);
  ModelBuilder& dense(const std::string& name, int units, bool use_bias = true);
  ModelBuilder& softmax(const std::string& name);
  ModelBuilder& flatten_order(FlattenOrder order);

  const Shape3& current_shape() const { return shape_; }

  // Validates and returns the model.
  Model build() const;

 private:
  void add(Layer layer);

  Model model_;
  Shape3 shape_;
  WeightInit init_;
};

}  // namespace prunekit

#endif  // PRUNEKIT_MODEL_BUILDER_H_
