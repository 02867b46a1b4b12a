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

#ifndef PRUNEKIT_PARALLEL_H_
#define PRUNEKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace prunekit {

// Worker count: PRUNEKIT_THREADS when set to a positive integer, otherwise
// the hardware concurrency.
int thread_budget();

// Runs fn(0) .. fn(n - 1) on up to thread_budget() threads. Each index is
// visited exactly once; the first exception thrown is rethrown here.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace prunekit

#endif  // PRUNEKIT_PARALLEL_H_
