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

#ifndef PRUNEKIT_BASELINE_H_
#define PRUNEKIT_BASELINE_H_

#include <cstdint>

#include "prunekit/model_builder.h"
#include "prunekit/model_store.h"

namespace prunekit {

// The DCASE 2021 Task 1A baseline CNN for 40x500 log-mel inputs:
//
//   C1  conv 7x7 same, 16 filters -> BN1 -> ReLU
//   C2  conv 7x7 same, 16 filters -> BN2 -> ReLU -> maxpool 5x5 -> dropout
//   C3  conv 7x7 same, 32 filters -> BN3 -> ReLU -> maxpool 4x100 -> dropout
//   flatten (2x1x32 = 64) -> dense 100 -> ReLU -> dropout -> dense 10 -> softmax
//
// 46246 parameters (batch-norm moving statistics included) and 286.6M MACs.
// Weights are synthetic; trained weights must be loaded from a container.
Model dcase_baseline(const WeightInit& init);
Model dcase_baseline(uint64_t seed = 0);

}  // namespace prunekit

#endif  // PRUNEKIT_BASELINE_H_
