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

#include "prunekit/model_store.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "prunekit/errors.h"

namespace prunekit {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'P', 'F', 'P', 'M'};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int64_t product(const std::vector<int64_t>& shape) {
  int64_t p = 1;
  for (int64_t d : shape) p *= d;
  return p;
}

std::string shape_string(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

std::string shape_string(const Shape3& s) {
  std::ostringstream os;
  os << s.height << 'x' << s.width << 'x' << s.channels;
  return os.str();
}

// Output spatial size of one conv axis, or 0 when the window does not fit.
int conv_out(int in, int kernel, int stride, Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < kernel) return 0;
  return (in - kernel) / stride + 1;
}

std::vector<Shape3> propagate(const Model& model, std::vector<Violation>* out) {
  std::vector<Shape3> shapes;
  Shape3 cur = model.input_shape;
  auto fail = [&](const Layer& layer, std::string message) {
    if (out) out->push_back({layer.name, std::move(message)});
  };
  for (const Layer& layer : model.layers) {
    if (cur.height <= 0 || cur.width <= 0 || cur.channels <= 0) break;
    std::visit(
        Overloaded{
            [&](const Conv2D& p) {
              if (p.in_channels != cur.channels) {
                fail(layer, "in_channels " + std::to_string(p.in_channels) +
                                " does not match incoming " +
                                std::to_string(cur.channels) + " channels");
              }
              if (p.stride < 1 || p.kernel_h < 1 || p.kernel_w < 1) {
                cur = {0, 0, 0};
                return;
              }
              int h = conv_out(cur.height, p.kernel_h, p.stride, p.padding);
              int w = conv_out(cur.width, p.kernel_w, p.stride, p.padding);
              if (h <= 0 || w <= 0) {
                fail(layer, "kernel " + std::to_string(p.kernel_h) + "x" +
                                std::to_string(p.kernel_w) +
                                " does not fit feature map " +
                                shape_string(cur));
              }
              cur = {h, w, p.out_channels};
            },
            [&](const BatchNorm& p) {
              if (p.channels != cur.channels) {
                fail(layer, "channels " + std::to_string(p.channels) +
                                " does not match incoming " +
                                std::to_string(cur.channels) + " channels");
              }
            },
            [&](const MaxPool& p) {
              if (p.pool_h < 1 || p.pool_w < 1) {
                cur = {0, 0, 0};
                return;
              }
              if (p.pool_h > cur.height || p.pool_w > cur.width) {
                fail(layer, "pool window " + std::to_string(p.pool_h) + "x" +
                                std::to_string(p.pool_w) +
                                " is larger than feature map " +
                                shape_string(cur));
              }
              cur = {cur.height / p.pool_h, cur.width / p.pool_w,
                     cur.channels};
            },
            [&](const Flatten&) {
              cur = {1, 1, static_cast<int>(cur.size())};
            },
            [&](const Dense& p) {
              if (cur.height != 1 || cur.width != 1) {
                fail(layer, "dense input must be flattened, got " +
                                shape_string(cur));
              } else if (p.in_units != cur.channels) {
                fail(layer, "in_units " + std::to_string(p.in_units) +
                                " does not match flattened size " +
                                std::to_string(cur.channels));
              }
              cur = {1, 1, p.out_units};
            },
            [&](const ReLU&) {},
            [&](const Softmax&) {},
            [&](const Dropout&) {},
        },
        layer.params);
    shapes.push_back(cur);
  }
  return shapes;
}

void check_params(const Layer& layer, std::vector<Violation>& out) {
  auto positive = [&](int v, const char* what) {
    if (v < 1) {
      out.push_back({layer.name, std::string(what) + " must be positive, got " +
                                     std::to_string(v)});
    }
  };
  std::visit(Overloaded{
                 [&](const Conv2D& p) {
                   positive(p.out_channels, "out_channels");
                   positive(p.in_channels, "in_channels");
                   positive(p.kernel_h, "kernel height");
                   positive(p.kernel_w, "kernel width");
                   positive(p.stride, "stride");
                 },
                 [&](const BatchNorm& p) {
                   positive(p.channels, "channels");
                   if (!(p.epsilon > 0.0)) {
                     out.push_back({layer.name, "epsilon must be positive"});
                   }
                 },
                 [&](const MaxPool& p) {
                   positive(p.pool_h, "pool height");
                   positive(p.pool_w, "pool width");
                 },
                 [&](const Dense& p) {
                   positive(p.in_units, "in_units");
                   positive(p.out_units, "out_units");
                 },
                 [&](const Dropout& p) {
                   if (!(p.rate >= 0.0 && p.rate < 1.0)) {
                     out.push_back({layer.name, "dropout rate must be in [0, 1)"});
                   }
                 },
                 [&](const auto&) {},
             },
             layer.params);
}

// --- little-endian float codec ---

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) |
         (uint32_t{p[3]} << 24);
}

// --- JSON header ---

Json layer_to_json(const Layer& layer) {
  Json j;
  j["name"] = layer.name;
  j["kind"] = std::string(to_string(layer.kind()));
  std::visit(Overloaded{
                 [&](const Conv2D& p) {
                   j["out_channels"] = p.out_channels;
                   j["in_channels"] = p.in_channels;
                   j["kernel"] = {p.kernel_h, p.kernel_w};
                   j["stride"] = p.stride;
                   j["padding"] = std::string(to_string(p.padding));
                   j["use_bias"] = p.use_bias;
                 },
                 [&](const BatchNorm& p) {
                   j["channels"] = p.channels;
                   j["epsilon"] = p.epsilon;
                 },
                 [&](const MaxPool& p) { j["window"] = {p.pool_h, p.pool_w}; },
                 [&](const Dense& p) {
                   j["in_units"] = p.in_units;
                   j["out_units"] = p.out_units;
                   j["use_bias"] = p.use_bias;
                 },
                 [&](const Dropout& p) { j["rate"] = p.rate; },
                 [&](const auto&) {},
             },
             layer.params);
  if (!layer.weights.empty()) {
    Json w = Json::object();
    for (const auto& [role, tensor] : layer.weights) w[role] = tensor;
    j["weights"] = w;
  }
  return j;
}

LayerKind parse_kind(const std::string& text) {
  for (int k = 0; k <= static_cast<int>(LayerKind::kDropout); ++k) {
    if (to_string(static_cast<LayerKind>(k)) == text) {
      return static_cast<LayerKind>(k);
    }
  }
  throw FormatError("unknown layer kind '" + text + "'");
}

Padding parse_padding(const std::string& text) {
  if (text == "same") return Padding::kSame;
  if (text == "valid") return Padding::kValid;
  throw FormatError("unknown padding mode '" + text + "'");
}

Layer layer_from_json(const Json& j) {
  Layer layer;
  layer.name = j.at("name").get<std::string>();
  switch (parse_kind(j.at("kind").get<std::string>())) {
    case LayerKind::kConv2D: {
      Conv2D p;
      p.out_channels = j.at("out_channels").get<int>();
      p.in_channels = j.at("in_channels").get<int>();
      const Json& k = j.at("kernel");
      if (!k.is_array() || k.size() != 2) {
        throw FormatError("layer '" + layer.name + "': kernel must be [kh, kw]");
      }
      p.kernel_h = k[0].get<int>();
      p.kernel_w = k[1].get<int>();
      p.stride = j.value("stride", 1);
      p.padding = parse_padding(j.value("padding", std::string("same")));
      p.use_bias = j.value("use_bias", true);
      layer.params = p;
      break;
    }
    case LayerKind::kBatchNorm: {
      BatchNorm p;
      p.channels = j.at("channels").get<int>();
      p.epsilon = j.at("epsilon").get<double>();
      layer.params = p;
      break;
    }
    case LayerKind::kMaxPool: {
      const Json& w = j.at("window");
      if (!w.is_array() || w.size() != 2) {
        throw FormatError("layer '" + layer.name + "': window must be [ph, pw]");
      }
      layer.params = MaxPool{w[0].get<int>(), w[1].get<int>()};
      break;
    }
    case LayerKind::kFlatten:
      layer.params = Flatten{};
      break;
    case LayerKind::kDense: {
      Dense p;
      p.in_units = j.at("in_units").get<int>();
      p.out_units = j.at("out_units").get<int>();
      p.use_bias = j.value("use_bias", true);
      layer.params = p;
      break;
    }
    case LayerKind::kReLU:
      layer.params = ReLU{};
      break;
    case LayerKind::kSoftmax:
      layer.params = Softmax{};
      break;
    case LayerKind::kDropout:
      layer.params = Dropout{j.value("rate", 0.0)};
      break;
  }
  if (j.contains("weights")) {
    for (const auto& [role, tensor] : j.at("weights").items()) {
      layer.weights[role] = tensor.get<std::string>();
    }
  }
  return layer;
}

Json header_json(const Model& model, uint64_t blob_bytes) {
  Json j;
  j["format"] = "PFPM";
  j["schema_version"] = kSchemaVersion;
  j["input_shape"] = {model.input_shape.height, model.input_shape.width,
                      model.input_shape.channels};
  if (model.flatten_order) {
    j["flatten_order"] = std::string(to_string(*model.flatten_order));
  }
  j["layers"] = Json::array();
  for (const Layer& layer : model.layers) j["layers"].push_back(layer_to_json(layer));
  j["tensors"] = Json::array();
  for (const Tensor& t : model.tensors) {
    Json tj;
    tj["name"] = t.spec.name;
    tj["dtype"] = "float32";
    tj["shape"] = t.spec.shape;
    tj["axis_order"] = t.spec.axis_order;
    tj["byte_offset"] = t.spec.byte_offset;
    tj["element_count"] = t.spec.element_count;
    j["tensors"].push_back(tj);
  }
  j["blob_bytes"] = blob_bytes;
  return j;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2D: return "conv2d";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kDense: return "dense";
    case LayerKind::kReLU: return "relu";
    case LayerKind::kSoftmax: return "softmax";
    case LayerKind::kDropout: return "dropout";
  }
  return "unknown";
}

std::string_view to_string(Padding padding) {
  return padding == Padding::kSame ? "same" : "valid";
}

std::string_view to_string(FlattenOrder order) {
  return order == FlattenOrder::kChannelsLast ? "channels_last"
                                              : "channels_first";
}

FlattenOrder parse_flatten_order(std::string_view text) {
  if (text == "channels_last") return FlattenOrder::kChannelsLast;
  if (text == "channels_first") return FlattenOrder::kChannelsFirst;
  throw FormatError("unknown flatten order '" + std::string(text) + "'");
}

const Tensor* Model::find_tensor(std::string_view name) const {
  for (const Tensor& t : tensors) {
    if (t.spec.name == name) return &t;
  }
  return nullptr;
}

Tensor* Model::find_tensor(std::string_view name) {
  for (Tensor& t : tensors) {
    if (t.spec.name == name) return &t;
  }
  return nullptr;
}

const Tensor& Model::tensor(std::string_view name) const {
  const Tensor* t = find_tensor(name);
  if (!t) throw ArgumentError("no tensor named '" + std::string(name) + "'");
  return *t;
}

const Tensor& Model::weight(const Layer& layer, std::string_view role) const {
  auto it = layer.weights.find(std::string(role));
  if (it == layer.weights.end()) {
    throw ArgumentError("layer '" + layer.name + "' has no '" +
                        std::string(role) + "' weight");
  }
  return tensor(it->second);
}

int Model::layer_index(std::string_view name) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return static_cast<int>(i);
  }
  throw ArgumentError("no layer named '" + std::string(name) + "'");
}

const Layer& Model::layer(std::string_view name) const {
  return layers[layer_index(name)];
}

std::vector<WeightSlot> weight_slots(const LayerParams& params) {
  std::vector<WeightSlot> slots;
  std::visit(
      Overloaded{
          [&](const Conv2D& p) {
            slots.push_back({"kernel",
                             {p.out_channels, p.in_channels, p.kernel_h,
                              p.kernel_w},
                             {"out_channels", "in_channels", "kernel_h",
                              "kernel_w"}});
            if (p.use_bias) {
              slots.push_back({"bias", {p.out_channels}, {"out_channels"}});
            }
          },
          [&](const BatchNorm& p) {
            for (const char* role : {"gamma", "beta", "moving_mean",
                                     "moving_variance"}) {
              slots.push_back({role, {p.channels}, {"channels"}});
            }
          },
          [&](const Dense& p) {
            slots.push_back(
                {"kernel", {p.in_units, p.out_units}, {"in_units", "out_units"}});
            if (p.use_bias) {
              slots.push_back({"bias", {p.out_units}, {"out_units"}});
            }
          },
          [&](const auto&) {},
      },
      params);
  return slots;
}

std::vector<Violation> validate_descriptor(const Model& model) {
  std::vector<Violation> out;
  const Shape3& in = model.input_shape;
  if (in.height < 1 || in.width < 1 || in.channels < 1) {
    out.push_back({"", "input shape " + shape_string(in) + " must be positive"});
  }

  std::set<std::string> tensor_names;
  for (const Tensor& t : model.tensors) {
    const TensorSpec& s = t.spec;
    if (!tensor_names.insert(s.name).second) {
      out.push_back({"", "tensor '" + s.name + "' is declared more than once"});
    }
    bool positive = !s.shape.empty() &&
                    std::all_of(s.shape.begin(), s.shape.end(),
                                [](int64_t d) { return d > 0; });
    if (!positive) {
      out.push_back({"", "tensor '" + s.name + "' has non-positive shape " +
                             shape_string(s.shape)});
    } else if (static_cast<uint64_t>(product(s.shape)) != s.element_count) {
      out.push_back({"", "tensor '" + s.name + "' element_count " +
                             std::to_string(s.element_count) +
                             " does not match shape " + shape_string(s.shape)});
    }
    if (t.values.size() != s.element_count) {
      out.push_back({"", "tensor '" + s.name + "' holds " +
                             std::to_string(t.values.size()) +
                             " values, expected " +
                             std::to_string(s.element_count)});
    }
    if (s.axis_order.size() != s.shape.size()) {
      out.push_back({"", "tensor '" + s.name +
                             "' axis_order length does not match its rank"});
    }
  }

  std::set<std::string> layer_names;
  for (const Layer& layer : model.layers) {
    if (layer.name.empty()) out.push_back({"", "layer with empty name"});
    if (!layer_names.insert(layer.name).second) {
      out.push_back({layer.name, "duplicate layer name"});
    }
    size_t before = out.size();
    check_params(layer, out);
    if (out.size() != before) continue;

    std::vector<WeightSlot> slots = weight_slots(layer.params);
    for (const auto& [role, name] : layer.weights) {
      bool known = std::any_of(slots.begin(), slots.end(),
                               [&](const WeightSlot& s) { return s.role == role; });
      if (!known) out.push_back({layer.name, "unexpected weight role '" + role + "'"});
    }
    for (const WeightSlot& slot : slots) {
      auto it = layer.weights.find(slot.role);
      if (it == layer.weights.end()) {
        out.push_back({layer.name, "missing '" + slot.role + "' weight"});
        continue;
      }
      const Tensor* t = model.find_tensor(it->second);
      if (!t) {
        out.push_back({layer.name, "weight '" + slot.role + "' references unknown tensor '" +
                                       it->second + "'"});
      } else if (t->spec.shape != slot.shape) {
        out.push_back({layer.name, "weight '" + slot.role + "' has shape " +
                                       shape_string(t->spec.shape) + ", expected " +
                                       shape_string(slot.shape)});
      }
    }
  }
  if (!out.empty()) return out;

  propagate(model, &out);
  return out;
}

void ensure_valid(const Model& model) {
  std::vector<Violation> violations = validate_descriptor(model);
  if (violations.empty()) return;
  std::string message;
  for (const Violation& v : violations) {
    if (!message.empty()) message += "; ";
    if (!v.layer.empty()) message += "layer '" + v.layer + "': ";
    message += v.message;
  }
  throw ValidationError(message);
}

std::vector<Shape3> propagate_shapes(const Model& model) {
  std::vector<Violation> violations;
  std::vector<Shape3> shapes = propagate(model, &violations);
  if (!violations.empty() || shapes.size() != model.layers.size()) {
    ensure_valid(model);
    throw ValidationError("shape propagation failed");
  }
  return shapes;
}

void assign_sequential_offsets(Model& model) {
  uint64_t offset = 0;
  for (Tensor& t : model.tensors) {
    t.spec.byte_offset = offset;
    t.spec.element_count = t.values.size();
    offset += 4 * t.values.size();
  }
}

std::vector<uint8_t> encode_model(const Model& model) {
  Model packed = model;
  assign_sequential_offsets(packed);
  uint64_t blob_bytes = 0;
  for (const Tensor& t : packed.tensors) blob_bytes += 4 * t.values.size();

  std::string header = header_json(packed, blob_bytes).dump();
  std::vector<uint8_t> out;
  out.reserve(8 + header.size() + blob_bytes);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  for (const Tensor& t : packed.tensors) {
    for (float v : t.values) put_u32(out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

Model decode_model(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("missing PFPM magic bytes");
  }
  if (bytes.size() < 8) throw CorruptionError("truncated container header");
  uint64_t header_len = get_u32(bytes.data() + 4);
  if (header_len > bytes.size() - 8) {
    throw CorruptionError("header length " + std::to_string(header_len) +
                          " exceeds file size");
  }
  std::span<const uint8_t> blob = bytes.subspan(8 + header_len);

  Json j;
  try {
    j = Json::parse(bytes.begin() + 8, bytes.begin() + 8 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("unparsable header: ") + e.what());
  }

  Model model;
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw FormatError("unsupported schema_version " +
                        j.at("schema_version").dump());
    }
    const Json& shape = j.at("input_shape");
    if (!shape.is_array() || shape.size() != 3) {
      throw FormatError("input_shape must be [height, width, channels]");
    }
    model.input_shape = {shape[0].get<int>(), shape[1].get<int>(),
                         shape[2].get<int>()};
    model.flatten_order = std::nullopt;
    if (j.contains("flatten_order")) {
      model.flatten_order =
          parse_flatten_order(j.at("flatten_order").get<std::string>());
    }
    for (const Json& lj : j.at("layers")) model.layers.push_back(layer_from_json(lj));

    uint64_t declared_blob = j.at("blob_bytes").get<uint64_t>();
    if (declared_blob != blob.size()) {
      throw CorruptionError("header declares " + std::to_string(declared_blob) +
                            " blob bytes, found " + std::to_string(blob.size()));
    }
    for (const Json& tj : j.at("tensors")) {
      Tensor t;
      t.spec.name = tj.at("name").get<std::string>();
      if (tj.value("dtype", std::string("float32")) != "float32") {
        throw FormatError("tensor '" + t.spec.name + "' is not float32");
      }
      t.spec.shape = tj.at("shape").get<std::vector<int64_t>>();
      t.spec.axis_order = tj.at("axis_order").get<std::vector<std::string>>();
      t.spec.byte_offset = tj.at("byte_offset").get<uint64_t>();
      t.spec.element_count = tj.at("element_count").get<uint64_t>();
      uint64_t count = t.spec.element_count;
      if (t.spec.byte_offset > blob.size() || count > (blob.size() - t.spec.byte_offset) / 4) {
        throw CorruptionError("tensor '" + t.spec.name +
                              "' extends past the end of the data blob");
      }
      t.values.resize(count);
      const uint8_t* p = blob.data() + t.spec.byte_offset;
      for (uint64_t i = 0; i < count; ++i) {
        t.values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
      }
      model.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  ensure_valid(model);
  return model;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return decode_model(bytes);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  ensure_valid(model);
  std::vector<uint8_t> bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_feature_map(const FeatureMap& map, const std::filesystem::path& path) {
  Model m;
  m.input_shape = map.shape;
  m.flatten_order = std::nullopt;
  Tensor t;
  t.spec.name = "input";
  t.spec.shape = {map.shape.height, map.shape.width, map.shape.channels};
  t.spec.axis_order = {"height", "width", "channels"};
  t.spec.element_count = map.values.size();
  t.values = map.values;
  m.tensors.push_back(std::move(t));
  save_model(m, path);
}

FeatureMap load_feature_map(const std::filesystem::path& path) {
  Model m = load_model(path);
  if (!m.layers.empty() || m.tensors.size() != 1 ||
      m.tensors[0].spec.shape.size() != 3) {
    throw FormatError("'" + path.string() +
                      "' is not a single [height, width, channels] tensor file");
  }
  const Tensor& t = m.tensors[0];
  FeatureMap map;
  map.shape = {static_cast<int>(t.spec.shape[0]), static_cast<int>(t.spec.shape[1]),
               static_cast<int>(t.spec.shape[2])};
  map.values = t.values;
  return map;
}

}  // namespace prunekit
