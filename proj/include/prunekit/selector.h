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

#ifndef PRUNEKIT_SELECTOR_H_
#define PRUNEKIT_SELECTOR_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prunekit/rank1_approx.h"
#include "prunekit/similarity.h"

namespace prunekit {

enum class SelectionMethod { kCosineGreedy, kChebyshevGreedy, kL1Norm, kAverage };

std::string_view to_string(SelectionMethod method);
// Accepts "cosine"/"cosine_greedy", "chebyshev"/"chebyshev_greedy",
// "l1"/"l1_norm" and "average".
SelectionMethod parse_method(std::string_view text);

// Filter `anchor` and its nearest other filter `partner`. Indices are layer
// filter indices (SimilarityMatrix::filter_indices).
struct ClosestPair {
  int anchor = 0;
  int partner = 0;
  double distance = 0.0;
  bool operator==(const ClosestPair&) const = default;
};

struct SelectionResult {
  SelectionMethod method = SelectionMethod::kCosineGreedy;
  std::vector<int> kept;     // in selection order
  std::vector<int> removed;  // ascending
  // Closest-pair distance (greedy methods) or l1 norm per filter.
  std::string diagnostic_name;
  std::map<int, double> diagnostics;
  // Greedy methods: all closest pairs in processing order, and the pairs
  // that marked a filter important.
  std::vector<ClosestPair> pairs;
  std::vector<ClosestPair> contributing;
};

// One pair per row, sorted by distance, then anchor, then partner. The
// partner is the lowest-index argmin of the row.
std::vector<ClosestPair> closest_pairs(const SimilarityMatrix& w);

// Greedy identification of important filters: walk the sorted closest pairs
// and, whenever the anchor has not been marked redundant, mark the anchor
// important and its partner redundant. A filter is kept iff it was marked
// important, even if a later pair also marked it redundant.
SelectionResult greedy_select(const SimilarityMatrix& w);

std::vector<double> l1_norms(std::span<const FilterTensor> filters);

// Removes the floor(ratio * n) filters with the smallest l1 norm, lower index
// first on ties. `ratio` must lie in (0, 1).
SelectionResult l1_select(std::span<const FilterTensor> filters, double ratio);

struct MergeResult {
  std::vector<FilterTensor> filters;  // every filter; kept ones may be merged
  SelectionResult selection;
};

// Greedy selection on `w`, then each kept filter whose pair contributed is
// replaced by the mean of itself and its partner (full tensors).
MergeResult average_merge(std::span<const FilterTensor> filters,
                          const SimilarityMatrix& w);

// Layer-level selection. All-zero filters are removed up front and never
// enter the distance matrix. `ratio` is required for l1 and rejected
// otherwise. For kAverage, `merged` holds the updated filter bank.
struct LayerSelection {
  SelectionResult selection;
  std::optional<std::vector<FilterTensor>> merged;
};
LayerSelection select_layer(std::span<const FilterTensor> filters,
                            SelectionMethod method,
                            std::optional<double> ratio = std::nullopt);

}  // namespace prunekit

#endif  // PRUNEKIT_SELECTOR_H_
