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

#ifndef PRUNEKIT_MODEL_STORE_H_
#define PRUNEKIT_MODEL_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace prunekit {

// Feature-map shape, channels last.
struct Shape3 {
  int height = 0;
  int width = 0;
  int channels = 0;

  int64_t size() const {
    return int64_t{height} * int64_t{width} * int64_t{channels};
  }
  bool operator==(const Shape3&) const = default;
};

enum class Padding { kSame, kValid };

// Element order produced by a flatten layer. For channels-last the
// flattened index of (row, col, channel) is (row * W + col) * C + channel.
enum class FlattenOrder { kChannelsLast, kChannelsFirst };

struct Conv2D {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  Padding padding = Padding::kSame;
  bool use_bias = true;
  bool operator==(const Conv2D&) const = default;
};

struct BatchNorm {
  int channels = 0;
  double epsilon = 1e-3;
  bool operator==(const BatchNorm&) const = default;
};

// Non-overlapping max pooling: stride equals the window, output size is
// floor(input / window).
struct MaxPool {
  int pool_h = 0;
  int pool_w = 0;
  bool operator==(const MaxPool&) const = default;
};

struct Flatten {
  bool operator==(const Flatten&) const = default;
};

struct Dense {
  int in_units = 0;
  int out_units = 0;
  bool use_bias = true;
  bool operator==(const Dense&) const = default;
};

struct ReLU {
  bool operator==(const ReLU&) const = default;
};

struct Softmax {
  bool operator==(const Softmax&) const = default;
};

// Identity at inference time.
struct Dropout {
  double rate = 0.0;
  bool operator==(const Dropout&) const = default;
};

using LayerParams =
    std::variant<Conv2D, BatchNorm, MaxPool, Flatten, Dense, ReLU, Softmax,
                 Dropout>;

enum class LayerKind {
  kConv2D,
  kBatchNorm,
  kMaxPool,
  kFlatten,
  kDense,
  kReLU,
  kSoftmax,
  kDropout
};

struct Layer {
  std::string name;
  LayerParams params;
  // Weight role ("kernel", "bias", "gamma", ...) -> tensor name.
  std::map<std::string, std::string> weights;

  LayerKind kind() const { return static_cast<LayerKind>(params.index()); }
  bool operator==(const Layer&) const = default;
};

struct TensorSpec {
  std::string name;
  std::vector<int64_t> shape;
  std::vector<std::string> axis_order;
  uint64_t byte_offset = 0;
  uint64_t element_count = 0;
  bool operator==(const TensorSpec&) const = default;
};

struct Tensor {
  TensorSpec spec;
  std::vector<float> values;
  bool operator==(const Tensor&) const = default;
};

// A sequential CNN: descriptor plus materialized float32 weights. Models are
// treated as immutable values; surgery builds new ones.
struct Model {
  Shape3 input_shape;
  // Absent when the container header does not record it.
  std::optional<FlattenOrder> flatten_order = FlattenOrder::kChannelsLast;
  std::vector<Layer> layers;
  std::vector<Tensor> tensors;

  const Tensor* find_tensor(std::string_view name) const;
  Tensor* find_tensor(std::string_view name);
  // Throws ArgumentError when the tensor or layer does not exist.
  const Tensor& tensor(std::string_view name) const;
  const Tensor& weight(const Layer& layer, std::string_view role) const;
  const Layer& layer(std::string_view name) const;
  int layer_index(std::string_view name) const;

  bool operator==(const Model&) const = default;
};

struct Violation {
  std::string layer;  // empty for model-level problems
  std::string message;
  bool operator==(const Violation&) const = default;
};

// A weight tensor a layer must carry, with its expected shape.
struct WeightSlot {
  std::string role;
  std::vector<int64_t> shape;
  std::vector<std::string> axis_order;
};

// Conv kernels are [out_channels, in_channels, kernel_h, kernel_w]; dense
// kernels are [in_units, out_units]; biases and batch-norm vectors are 1-D.
std::vector<WeightSlot> weight_slots(const LayerParams& params);

// Returns every invariant violation; an empty list means the model is valid.
std::vector<Violation> validate_descriptor(const Model& model);

// Throws ValidationError listing the violations, if any.
void ensure_valid(const Model& model);

// Output shape of every layer, in order. The model must be valid.
std::vector<Shape3> propagate_shapes(const Model& model);

// Rewrites byte offsets so tensors are packed in table order.
void assign_sequential_offsets(Model& model);

// Container codec. Layout: "PFPM", u32 little-endian header length, UTF-8
// JSON header, raw little-endian float32 blob.
std::vector<uint8_t> encode_model(const Model& model);
Model decode_model(std::span<const uint8_t> bytes);

Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

// Single-tensor files share the container format: no layers, one tensor of
// shape [height, width, channels].
struct FeatureMap {
  Shape3 shape;
  std::vector<float> values;  // (row * width + col) * channels + channel
  bool operator==(const FeatureMap&) const = default;
};
void save_feature_map(const FeatureMap& map, const std::filesystem::path& path);
FeatureMap load_feature_map(const std::filesystem::path& path);

std::string_view to_string(LayerKind kind);
std::string_view to_string(Padding padding);
std::string_view to_string(FlattenOrder order);
FlattenOrder parse_flatten_order(std::string_view text);

inline constexpr int kSchemaVersion = 1;

}  // namespace prunekit

#endif  // PRUNEKIT_MODEL_STORE_H_
