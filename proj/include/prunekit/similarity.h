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

#ifndef PRUNEKIT_SIMILARITY_H_
#define PRUNEKIT_SIMILARITY_H_

#include <span>
#include <string_view>
#include <vector>

#include "prunekit/rank1_approx.h"

namespace prunekit {

enum class Metric { kCosine, kChebyshev };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

// Symmetric n x n distance matrix over a layer's filter representatives.
// Row i corresponds to filter filter_indices[i] of the layer.
class SimilarityMatrix {
 public:
  // Zero matrix over filters 0..n-1.
  SimilarityMatrix(int n, Metric metric);

  int size() const { return n_; }
  Metric metric() const { return metric_; }
  double operator()(int i, int j) const {
    return entries_[static_cast<size_t>(i) * n_ + j];
  }
  // Writes both (i, j) and (j, i).
  void set(int i, int j, double distance);

  const std::vector<int>& filter_indices() const { return filter_indices_; }
  void set_filter_indices(std::vector<int> indices);

 private:
  int n_;
  Metric metric_;
  std::vector<double> entries_;
  std::vector<int> filter_indices_;
};

// 1 - f_i . f_j, clamped to [0, 2]. Identical vectors give exactly 0.
SimilarityMatrix cosine_distance_matrix(std::span<const FilterRepresentative> reps);
// max_k |f_i[k] - f_j[k]|
SimilarityMatrix chebyshev_distance_matrix(std::span<const FilterRepresentative> reps);
SimilarityMatrix distance_matrix(std::span<const FilterRepresentative> reps,
                                 Metric metric);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<int> counts;
};

// Distribution of each filter's distance to its nearest other filter.
struct ClosestPairStats {
  std::vector<double> closest;  // one entry per matrix row
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  Histogram histogram;
};

// Histogram uses `bins` equal-width bins over [0, max closest distance]; the
// last bin is closed on the right.
ClosestPairStats closest_pair_stats(const SimilarityMatrix& w, int bins = 10);

}  // namespace prunekit

#endif  // PRUNEKIT_SIMILARITY_H_
