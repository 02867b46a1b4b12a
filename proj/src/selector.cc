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

#include "prunekit/selector.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prunekit/errors.h"

namespace prunekit {
namespace {

bool contains(const std::vector<int>& list, int value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

SelectionMethod greedy_method(Metric metric) {
  return metric == Metric::kCosine ? SelectionMethod::kCosineGreedy
                                   : SelectionMethod::kChebyshevGreedy;
}

}  // namespace

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::kCosineGreedy: return "cosine_greedy";
    case SelectionMethod::kChebyshevGreedy: return "chebyshev_greedy";
    case SelectionMethod::kL1Norm: return "l1_norm";
    case SelectionMethod::kAverage: return "average";
  }
  return "unknown";
}

SelectionMethod parse_method(std::string_view text) {
  if (text == "cosine" || text == "cosine_greedy") return SelectionMethod::kCosineGreedy;
  if (text == "chebyshev" || text == "chebyshev_greedy") {
    return SelectionMethod::kChebyshevGreedy;
  }
  if (text == "l1" || text == "l1_norm") return SelectionMethod::kL1Norm;
  if (text == "average") return SelectionMethod::kAverage;
  throw ArgumentError("unknown selection method '" + std::string(text) + "'");
}

std::vector<ClosestPair> closest_pairs(const SimilarityMatrix& w) {
  int n = w.size();
  if (n < 2) throw ArgumentError("closest pairs need at least two filters");
  const std::vector<int>& idx = w.filter_indices();
  std::vector<ClosestPair> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (best < 0 || w(i, j) < w(i, best)) best = j;
    }
    pairs.push_back({idx[i], idx[best], w(i, best)});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const ClosestPair& a, const ClosestPair& b) {
                     if (a.distance != b.distance) return a.distance < b.distance;
                     if (a.anchor != b.anchor) return a.anchor < b.anchor;
                     return a.partner < b.partner;
                   });
  return pairs;
}

SelectionResult greedy_select(const SimilarityMatrix& w) {
  SelectionResult result;
  result.method = greedy_method(w.metric());
  result.diagnostic_name = "closest_distance";
  result.pairs = closest_pairs(w);

  // Red_list may repeat entries and overlap Imp_list; only Imp_list decides.
  std::vector<int> redundant;
  for (const ClosestPair& p : result.pairs) {
    result.diagnostics[p.anchor] = p.distance;
    if (!contains(redundant, p.anchor)) {
      result.kept.push_back(p.anchor);
      redundant.push_back(p.partner);
      result.contributing.push_back(p);
    }
  }
  for (int f : w.filter_indices()) {
    if (!contains(result.kept, f)) result.removed.push_back(f);
  }
  return result;
}

std::vector<double> l1_norms(std::span<const FilterTensor> filters) {
  std::vector<double> norms;
  norms.reserve(filters.size());
  for (const FilterTensor& f : filters) {
    double s = 0.0;
    for (double v : f.values) s += std::abs(v);
    norms.push_back(s);
  }
  return norms;
}

SelectionResult l1_select(std::span<const FilterTensor> filters, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("pruning ratio must lie in (0, 1)");
  }
  int n = static_cast<int>(filters.size());
  if (n < 2) throw ArgumentError("l1 selection needs at least two filters");
  // Ratios are usually |removed| / n from another run; absorb the rounding.
  int remove = static_cast<int>(std::floor(ratio * n + 1e-9));
  if (remove < 1) {
    throw ArgumentError("ratio " + std::to_string(ratio) + " removes no filter out of " +
                        std::to_string(n));
  }

  SelectionResult result;
  result.method = SelectionMethod::kL1Norm;
  result.diagnostic_name = "l1_norm";
  std::vector<double> norms = l1_norms(filters);
  for (int i = 0; i < n; ++i) result.diagnostics[i] = norms[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return norms[a] < norms[b]; });
  result.removed.assign(order.begin(), order.begin() + remove);
  std::sort(result.removed.begin(), result.removed.end());
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(result.removed.begin(), result.removed.end(), i)) {
      result.kept.push_back(i);
    }
  }
  return result;
}

MergeResult average_merge(std::span<const FilterTensor> filters,
                          const SimilarityMatrix& w) {
  MergeResult out;
  out.selection = greedy_select(w);
  out.selection.method = SelectionMethod::kAverage;
  out.filters.assign(filters.begin(), filters.end());
  for (const ClosestPair& p : out.selection.contributing) {
    const FilterTensor& a = filters[p.anchor];
    const FilterTensor& b = filters[p.partner];
    if (a.values.size() != b.values.size()) {
      throw ValidationError("cannot average filters of different shapes");
    }
    FilterTensor& merged = out.filters[p.anchor];
    for (size_t k = 0; k < a.values.size(); ++k) {
      merged.values[k] = (a.values[k] + b.values[k]) / 2.0;
    }
  }
  return out;
}

LayerSelection select_layer(std::span<const FilterTensor> filters,
                            SelectionMethod method, std::optional<double> ratio) {
  if (method == SelectionMethod::kL1Norm) {
    if (!ratio) throw ArgumentError("l1 selection requires a pruning ratio");
    return {l1_select(filters, *ratio), std::nullopt};
  }
  if (ratio) {
    throw ArgumentError("method " + std::string(to_string(method)) +
                        " does not take a pruning ratio");
  }
  int n = static_cast<int>(filters.size());
  if (n < 1) throw ArgumentError("layer has no filters");

  std::vector<int> degenerate;
  std::vector<FilterRepresentative> reps = representatives(filters, &degenerate);
  Metric metric = method == SelectionMethod::kChebyshevGreedy ? Metric::kChebyshev
                                                              : Metric::kCosine;
  LayerSelection out;
  if (reps.size() >= 2) {
    SimilarityMatrix w = distance_matrix(reps, metric);
    if (method == SelectionMethod::kAverage) {
      MergeResult merged = average_merge(filters, w);
      out.selection = std::move(merged.selection);
      out.merged = std::move(merged.filters);
    } else {
      out.selection = greedy_select(w);
    }
  } else {
    // Fewer than two usable filters: nothing to compare, keep what exists
    // (or filter 0 when every filter is zero).
    out.selection.method = method;
    out.selection.diagnostic_name = "closest_distance";
    out.selection.kept = {reps.empty() ? 0 : reps[0].source_filter_index};
    if (method == SelectionMethod::kAverage) {
      out.merged = std::vector<FilterTensor>(filters.begin(), filters.end());
    }
  }
  std::vector<int>& removed = out.selection.removed;
  for (int d : degenerate) {
    if (!contains(out.selection.kept, d)) removed.push_back(d);
  }
  std::sort(removed.begin(), removed.end());
  return out;
}

}  // namespace prunekit
