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

#include "prunekit/similarity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prunekit/errors.h"

namespace prunekit {
namespace {

void check_reps(std::span<const FilterRepresentative> reps) {
  if (reps.size() < 2) {
    throw ArgumentError("distance matrix needs at least two representatives");
  }
  for (const FilterRepresentative& r : reps) {
    if (r.vector.size() != reps[0].vector.size()) {
      throw ValidationError("representative of filter " +
                            std::to_string(r.source_filter_index) +
                            " has dimension " + std::to_string(r.vector.size()) +
                            ", expected " + std::to_string(reps[0].vector.size()));
    }
  }
}

template <class Distance>
SimilarityMatrix build(std::span<const FilterRepresentative> reps, Metric metric,
                       Distance distance) {
  check_reps(reps);
  int n = static_cast<int>(reps.size());
  SimilarityMatrix w(n, metric);
  std::vector<int> indices(n);
  for (int i = 0; i < n; ++i) indices[i] = reps[i].source_filter_index;
  w.set_filter_indices(std::move(indices));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      w.set(i, j, distance(reps[i].vector, reps[j].vector));
    }
  }
  return w;
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "chebyshev";
}

Metric parse_metric(std::string_view text) {
  if (text == "cosine") return Metric::kCosine;
  if (text == "chebyshev") return Metric::kChebyshev;
  throw ArgumentError("unknown metric '" + std::string(text) + "'");
}

SimilarityMatrix::SimilarityMatrix(int n, Metric metric)
    : n_(n), metric_(metric), entries_(static_cast<size_t>(n) * n, 0.0),
      filter_indices_(n) {
  std::iota(filter_indices_.begin(), filter_indices_.end(), 0);
}

void SimilarityMatrix::set(int i, int j, double distance) {
  if (i == j) throw ArgumentError("diagonal of a distance matrix is fixed at 0");
  entries_[static_cast<size_t>(i) * n_ + j] = distance;
  entries_[static_cast<size_t>(j) * n_ + i] = distance;
}

void SimilarityMatrix::set_filter_indices(std::vector<int> indices) {
  if (static_cast<int>(indices.size()) != n_ ||
      !std::is_sorted(indices.begin(), indices.end()) ||
      std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw ArgumentError("filter indices must be strictly increasing, one per row");
  }
  filter_indices_ = std::move(indices);
}

SimilarityMatrix cosine_distance_matrix(std::span<const FilterRepresentative> reps) {
  return build(reps, Metric::kCosine,
               [](const std::vector<double>& a, const std::vector<double>& b) {
                 if (a == b) return 0.0;
                 double dot = 0.0;
                 for (size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
                 return std::clamp(1.0 - dot, 0.0, 2.0);
               });
}

SimilarityMatrix chebyshev_distance_matrix(
    std::span<const FilterRepresentative> reps) {
  return build(reps, Metric::kChebyshev,
               [](const std::vector<double>& a, const std::vector<double>& b) {
                 double m = 0.0;
                 for (size_t k = 0; k < a.size(); ++k) {
                   m = std::max(m, std::abs(a[k] - b[k]));
                 }
                 return m;
               });
}

SimilarityMatrix distance_matrix(std::span<const FilterRepresentative> reps,
                                 Metric metric) {
  return metric == Metric::kCosine ? cosine_distance_matrix(reps)
                                   : chebyshev_distance_matrix(reps);
}

ClosestPairStats closest_pair_stats(const SimilarityMatrix& w, int bins) {
  int n = w.size();
  if (n < 2) throw ArgumentError("closest-pair statistics need at least two filters");
  if (bins < 1) throw ArgumentError("histogram needs at least one bin");

  ClosestPairStats stats;
  stats.closest.resize(n);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, w(i, j));
    }
    stats.closest[i] = best;
  }
  double sum = std::accumulate(stats.closest.begin(), stats.closest.end(), 0.0);
  stats.mean = sum / n;
  double var = 0.0;
  for (double d : stats.closest) var += (d - stats.mean) * (d - stats.mean);
  stats.std = std::sqrt(var / n);

  double top = *std::max_element(stats.closest.begin(), stats.closest.end());
  Histogram& h = stats.histogram;
  h.edges.resize(bins + 1);
  for (int b = 0; b < bins; ++b) h.edges[b] = top * b / bins;
  h.edges[bins] = top;
  h.counts.assign(bins, 0);
  for (double d : stats.closest) {
    int b = top > 0.0 ? static_cast<int>(d / top * bins) : 0;
    h.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return stats;
}

}  // namespace prunekit
