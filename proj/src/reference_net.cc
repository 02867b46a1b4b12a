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

#include "prunekit/reference_net.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prunekit/errors.h"

namespace prunekit {
namespace {

size_t at(const Shape3& s, int r, int c, int ch) {
  return (static_cast<size_t>(r) * s.width + c) * s.channels + ch;
}

FeatureMap conv2d(const Model& model, const Layer& layer, const Conv2D& p,
                  const FeatureMap& in, int64_t& macs) {
  const Shape3& is = in.shape;
  int out_h, out_w, pad_top = 0, pad_left = 0;
  if (p.padding == Padding::kSame) {
    out_h = (is.height + p.stride - 1) / p.stride;
    out_w = (is.width + p.stride - 1) / p.stride;
    pad_top = std::max((out_h - 1) * p.stride + p.kernel_h - is.height, 0) / 2;
    pad_left = std::max((out_w - 1) * p.stride + p.kernel_w - is.width, 0) / 2;
  } else {
    out_h = (is.height - p.kernel_h) / p.stride + 1;
    out_w = (is.width - p.kernel_w) / p.stride + 1;
  }

  // Zero-padded copy so every tap is a real multiply-accumulate.
  Shape3 ps{(out_h - 1) * p.stride + p.kernel_h, (out_w - 1) * p.stride + p.kernel_w,
            is.channels};
  std::vector<double> padded(static_cast<size_t>(ps.size()), 0.0);
  for (int r = 0; r < is.height; ++r) {
    int pr = r + pad_top;
    if (pr < 0 || pr >= ps.height) continue;
    for (int c = 0; c < is.width; ++c) {
      int pc = c + pad_left;
      if (pc < 0 || pc >= ps.width) continue;
      for (int ch = 0; ch < is.channels; ++ch) {
        padded[at(ps, pr, pc, ch)] = in.values[at(is, r, c, ch)];
      }
    }
  }

  // Kernel [out, in, kh, kw] -> [out][kh][kw][in] to match the input layout.
  const std::vector<float>& k = model.weight(layer, "kernel").values;
  const int taps = p.kernel_h * p.kernel_w * p.in_channels;
  std::vector<double> w(static_cast<size_t>(p.out_channels) * taps);
  for (int o = 0; o < p.out_channels; ++o) {
    for (int ci = 0; ci < p.in_channels; ++ci) {
      for (int ky = 0; ky < p.kernel_h; ++ky) {
        for (int kx = 0; kx < p.kernel_w; ++kx) {
          w[static_cast<size_t>(o) * taps + (ky * p.kernel_w + kx) * p.in_channels + ci] =
              k[((static_cast<size_t>(o) * p.in_channels + ci) * p.kernel_h + ky) *
                    p.kernel_w + kx];
        }
      }
    }
  }
  const std::vector<float>* bias =
      p.use_bias ? &model.weight(layer, "bias").values : nullptr;

  FeatureMap out{{out_h, out_w, p.out_channels}, {}};
  out.values.resize(static_cast<size_t>(out.shape.size()));
  int64_t count = 0;
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      for (int o = 0; o < p.out_channels; ++o) {
        double acc = bias ? (*bias)[o] : 0.0;
        const double* wo = &w[static_cast<size_t>(o) * taps];
        for (int ky = 0; ky < p.kernel_h; ++ky) {
          const double* row = &padded[at(ps, oy * p.stride + ky, ox * p.stride, 0)];
          const double* wr = wo + ky * p.kernel_w * p.in_channels;
          for (int kx = 0; kx < p.kernel_w; ++kx) {
            const double* px = row + static_cast<size_t>(kx) * ps.channels;
            const double* wx = wr + kx * p.in_channels;
            for (int ci = 0; ci < p.in_channels; ++ci) {
              acc += px[ci] * wx[ci];
              ++count;
            }
          }
        }
        out.values[at(out.shape, oy, ox, o)] = static_cast<float>(acc);
      }
    }
  }
  macs += count;
  return out;
}

FeatureMap batchnorm(const Model& model, const Layer& layer, const BatchNorm& p,
                     FeatureMap in) {
  const auto& gamma = model.weight(layer, "gamma").values;
  const auto& beta = model.weight(layer, "beta").values;
  const auto& mean = model.weight(layer, "moving_mean").values;
  const auto& var = model.weight(layer, "moving_variance").values;
  const int channels = in.shape.channels;
  for (size_t i = 0; i < in.values.size(); ++i) {
    int ch = static_cast<int>(i % channels);
    double x = in.values[i];
    double y = double{gamma[ch]} * (x - mean[ch]) / std::sqrt(double{var[ch]} + p.epsilon) +
               beta[ch];
    in.values[i] = static_cast<float>(y);
  }
  return in;
}

FeatureMap maxpool(const MaxPool& p, const FeatureMap& in) {
  const Shape3& is = in.shape;
  FeatureMap out{{is.height / p.pool_h, is.width / p.pool_w, is.channels}, {}};
  out.values.resize(static_cast<size_t>(out.shape.size()));
  for (int oy = 0; oy < out.shape.height; ++oy) {
    for (int ox = 0; ox < out.shape.width; ++ox) {
      for (int ch = 0; ch < is.channels; ++ch) {
        float m = -std::numeric_limits<float>::infinity();
        for (int dy = 0; dy < p.pool_h; ++dy) {
          for (int dx = 0; dx < p.pool_w; ++dx) {
            m = std::max(m, in.values[at(is, oy * p.pool_h + dy, ox * p.pool_w + dx, ch)]);
          }
        }
        out.values[at(out.shape, oy, ox, ch)] = m;
      }
    }
  }
  return out;
}

FeatureMap flatten(const FeatureMap& in, FlattenOrder order) {
  FeatureMap out{{1, 1, static_cast<int>(in.shape.size())}, {}};
  if (order == FlattenOrder::kChannelsLast) {
    out.values = in.values;
    return out;
  }
  const Shape3& s = in.shape;
  out.values.reserve(in.values.size());
  for (int ch = 0; ch < s.channels; ++ch) {
    for (int r = 0; r < s.height; ++r) {
      for (int c = 0; c < s.width; ++c) out.values.push_back(in.values[at(s, r, c, ch)]);
    }
  }
  return out;
}

FeatureMap dense(const Model& model, const Layer& layer, const Dense& p,
                 const FeatureMap& in, int64_t& macs) {
  const std::vector<float>& k = model.weight(layer, "kernel").values;
  const std::vector<float>* bias =
      p.use_bias ? &model.weight(layer, "bias").values : nullptr;
  FeatureMap out{{1, 1, p.out_units}, std::vector<float>(p.out_units)};
  int64_t count = 0;
  for (int j = 0; j < p.out_units; ++j) {
    double acc = bias ? (*bias)[j] : 0.0;
    for (int i = 0; i < p.in_units; ++i) {
      acc += double{in.values[i]} * k[static_cast<size_t>(i) * p.out_units + j];
      ++count;
    }
    out.values[j] = static_cast<float>(acc);
  }
  macs += count;
  return out;
}

void softmax(FeatureMap& map) {
  double top = -std::numeric_limits<double>::infinity();
  for (float v : map.values) top = std::max(top, double{v});
  std::vector<double> e(map.values.size());
  double sum = 0.0;
  for (size_t i = 0; i < e.size(); ++i) {
    e[i] = std::exp(map.values[i] - top);
    sum += e[i];
  }
  for (size_t i = 0; i < e.size(); ++i) map.values[i] = static_cast<float>(e[i] / sum);
}

}  // namespace

ForwardResult run_forward(const Model& model, const FeatureMap& input) {
  ensure_valid(model);
  if (input.shape != model.input_shape) {
    throw ArgumentError("input shape " + std::to_string(input.shape.height) + "x" +
                        std::to_string(input.shape.width) + "x" +
                        std::to_string(input.shape.channels) +
                        " does not match the model input");
  }
  if (static_cast<int64_t>(input.values.size()) != input.shape.size()) {
    throw ArgumentError("input value count does not match its shape");
  }
  for (const Tensor& t : model.tensors) {
    for (float v : t.values) {
      if (!std::isfinite(v)) {
        throw NumericalError("tensor '" + t.spec.name + "' contains non-finite values");
      }
    }
  }

  ForwardResult result;
  FeatureMap x = input;
  for (const Layer& layer : model.layers) {
    switch (layer.kind()) {
      case LayerKind::kConv2D:
        x = conv2d(model, layer, std::get<Conv2D>(layer.params), x, result.macs);
        break;
      case LayerKind::kBatchNorm:
        x = batchnorm(model, layer, std::get<BatchNorm>(layer.params), std::move(x));
        break;
      case LayerKind::kMaxPool:
        x = maxpool(std::get<MaxPool>(layer.params), x);
        break;
      case LayerKind::kFlatten:
        x = flatten(x, model.flatten_order.value_or(FlattenOrder::kChannelsLast));
        break;
      case LayerKind::kDense:
        x = dense(model, layer, std::get<Dense>(layer.params), x, result.macs);
        break;
      case LayerKind::kReLU:
        for (float& v : x.values) v = v > 0.0f ? v : 0.0f;
        break;
      case LayerKind::kSoftmax:
        softmax(x);
        break;
      case LayerKind::kDropout:
        break;
    }
  }
  result.output = std::move(x);
  return result;
}

std::vector<float> forward(const Model& model, const FeatureMap& input) {
  return run_forward(model, input).output.values;
}

int64_t macs_executed(const Model& model, const FeatureMap& input) {
  return run_forward(model, input).macs;
}

}  // namespace prunekit
