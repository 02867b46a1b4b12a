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

#include "prunekit/baseline.h"

namespace prunekit {

Model dcase_baseline(const WeightInit& init) {
  return ModelBuilder({40, 500, 1}, init)
      .conv2d("C1", 16, 7, 7)
      .batchnorm("BN1")
      .relu("ReLU1")
      .conv2d("C2", 16, 7, 7)
      .batchnorm("BN2")
      .relu("ReLU2")
      .maxpool("P1", 5, 5)
      .dropout("Dropout1", 0.3)
      .conv2d("C3", 32, 7, 7)
      .batchnorm("BN3")
      .relu("ReLU3")
      .maxpool("P2", 4, 100)
      .dropout("Dropout2", 0.3)
      .flatten("Flatten")
      .dense("D1", 100)
      .relu("ReLU4")
      .dropout("Dropout3", 0.3)
      .dense("D2", 10)
      .softmax("Softmax")
      .flatten_order(FlattenOrder::kChannelsLast)
      .build();
}

Model dcase_baseline(uint64_t seed) { return dcase_baseline(RandomInit(seed)); }

}  // namespace prunekit
