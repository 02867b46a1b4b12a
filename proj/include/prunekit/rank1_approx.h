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

#ifndef PRUNEKIT_RANK1_APPROX_H_
#define PRUNEKIT_RANK1_APPROX_H_

#include <span>
#include <vector>

#include "prunekit/model_store.h"

namespace prunekit {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}
  Matrix(int rows, int cols, std::vector<double> data);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  std::span<const double> data() const { return data_; }
  double frobenius_norm() const;

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// One convolutional filter: `channels` slices of height x width, stored in
// the same order as a conv kernel row, values[(ch * height + r) * width + c].
struct FilterTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> values;

  double at(int channel, int row, int col) const {
    return values[(static_cast<size_t>(channel) * height + row) * width + col];
  }
  bool all_zero() const;
  bool operator==(const FilterTensor&) const = default;
};

// Filters of a conv layer, in output-channel order.
std::vector<FilterTensor> layer_filters(const Model& model, const Layer& layer);

// (height * width) x channels; column j is channel j's slice, row-major.
Matrix filter_to_matrix(const FilterTensor& filter);
FilterTensor matrix_to_filter(const Matrix& matrix, int height, int width);

struct Rank1Factors {
  double sigma1 = 0.0;
  std::vector<double> u1;  // length rows
  std::vector<double> v1;  // length cols
  int iterations = 0;
};

struct PowerIterationOptions {
  // Relative change between successive singular-value estimates.
  double sigma_tolerance = 1e-10;
  // ||F^T u - sigma v|| relative to sigma; this is the left residual u^T R.
  double residual_tolerance = 1e-9;
  int max_iterations = 10000;
};

// Best rank-1 approximation in the Frobenius norm, by power iteration on
// F^T F started from the largest-norm column of F. The returned u1 is
// sign-canonical (see canonicalize_sign) and v1 is flipped with it.
// Throws DegenerateFilterError for an all-zero matrix and NumericalError when
// the iteration does not converge.
Rank1Factors best_rank1(const Matrix& matrix,
                        const PowerIterationOptions& options = {});

// sigma1 * u1 * v1^T
Matrix reconstruct(const Rank1Factors& factors);

// Flips the vector so that its largest-magnitude entry (lowest index on ties)
// is non-negative.
void canonicalize_sign(std::span<double> values);

struct FilterRepresentative {
  std::vector<double> vector;
  int source_filter_index = 0;
};

// Unit-norm, sign-canonical column of the filter's rank-1 approximation.
// Throws DegenerateFilterError for an all-zero filter.
FilterRepresentative representative(const FilterTensor& filter,
                                    int source_filter_index = 0);

// Representatives for every non-zero filter, in filter order. All-zero
// filters are skipped; their indices are appended to `degenerate` if given.
std::vector<FilterRepresentative> representatives(
    std::span<const FilterTensor> filters, std::vector<int>* degenerate = nullptr);

}  // namespace prunekit

#endif  // PRUNEKIT_RANK1_APPROX_H_
