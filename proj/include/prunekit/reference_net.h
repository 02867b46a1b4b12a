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

#ifndef PRUNEKIT_REFERENCE_NET_H_
#define PRUNEKIT_REFERENCE_NET_H_

#include <cstdint>
#include <vector>

#include "prunekit/model_store.h"

namespace prunekit {

struct ForwardResult {
  FeatureMap output;
  // Multiply-accumulates actually executed, zero-padding taps included.
  int64_t macs = 0;
};

// Inference-only forward pass. Accumulates in double, stores float32
// activations. Batch norm uses the moving statistics; dropout is identity.
// Throws ArgumentError on an input shape mismatch and NumericalError for
// non-finite weights.
ForwardResult run_forward(const Model& model, const FeatureMap& input);

// Final layer output (class probabilities when the model ends in softmax).
std::vector<float> forward(const Model& model, const FeatureMap& input);

int64_t macs_executed(const Model& model, const FeatureMap& input);

}  // namespace prunekit

#endif  // PRUNEKIT_REFERENCE_NET_H_
