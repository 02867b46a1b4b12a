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

#include "prunekit/rank1_approx.h"

#include <cmath>
#include <sstream>

#include "prunekit/errors.h"
#include "prunekit/parallel.h"

namespace prunekit {
namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// y = F x
void multiply(const Matrix& f, std::span<const double> x, std::span<double> y) {
  for (int r = 0; r < f.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < f.cols(); ++c) s += f(r, c) * x[c];
    y[r] = s;
  }
}

// y = F^T x
void multiply_transposed(const Matrix& f, std::span<const double> x,
                         std::span<double> y) {
  for (int c = 0; c < f.cols(); ++c) y[c] = 0.0;
  for (int r = 0; r < f.rows(); ++r) {
    for (int c = 0; c < f.cols(); ++c) y[c] += f(r, c) * x[r];
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<size_t>(rows) * cols) {
    throw ArgumentError("matrix data does not match its dimensions");
  }
}

double Matrix::frobenius_norm() const { return norm2(data_); }

bool FilterTensor::all_zero() const {
  for (double v : values) {
    if (v != 0.0) return false;
  }
  return true;
}

std::vector<FilterTensor> layer_filters(const Model& model, const Layer& layer) {
  const auto* conv = std::get_if<Conv2D>(&layer.params);
  if (!conv) throw ArgumentError("layer '" + layer.name + "' is not a conv2d layer");
  const Tensor& kernel = model.weight(layer, "kernel");
  size_t per_filter =
      static_cast<size_t>(conv->in_channels) * conv->kernel_h * conv->kernel_w;
  std::vector<FilterTensor> filters(conv->out_channels);
  for (int o = 0; o < conv->out_channels; ++o) {
    FilterTensor& f = filters[o];
    f.height = conv->kernel_h;
    f.width = conv->kernel_w;
    f.channels = conv->in_channels;
    auto first = kernel.values.begin() + static_cast<std::ptrdiff_t>(o * per_filter);
    f.values.assign(first, first + static_cast<std::ptrdiff_t>(per_filter));
  }
  return filters;
}

Matrix filter_to_matrix(const FilterTensor& filter) {
  int plane = filter.height * filter.width;
  Matrix m(plane, filter.channels);
  for (int ch = 0; ch < filter.channels; ++ch) {
    for (int k = 0; k < plane; ++k) {
      m(k, ch) = filter.values[static_cast<size_t>(ch) * plane + k];
    }
  }
  return m;
}

FilterTensor matrix_to_filter(const Matrix& matrix, int height, int width) {
  if (height * width != matrix.rows()) {
    throw ArgumentError("matrix rows do not match height * width");
  }
  FilterTensor f{height, width, matrix.cols(), {}};
  f.values.resize(static_cast<size_t>(matrix.rows()) * matrix.cols());
  for (int ch = 0; ch < matrix.cols(); ++ch) {
    for (int k = 0; k < matrix.rows(); ++k) {
      f.values[static_cast<size_t>(ch) * matrix.rows() + k] = matrix(k, ch);
    }
  }
  return f;
}

void canonicalize_sign(std::span<double> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i]) > std::abs(values[best])) best = i;
  }
  if (!values.empty() && values[best] < 0.0) {
    for (double& v : values) v = -v;
  }
}

Rank1Factors best_rank1(const Matrix& f, const PowerIterationOptions& options) {
  const int rows = f.rows();
  const int cols = f.cols();
  if (rows == 0 || cols == 0 || f.frobenius_norm() == 0.0) {
    throw DegenerateFilterError("matrix is all zero; no rank-1 direction exists");
  }

  // Start from the column with the largest norm.
  int start = 0;
  double start_norm = -1.0;
  for (int c = 0; c < cols; ++c) {
    double s = 0.0;
    for (int r = 0; r < rows; ++r) s += f(r, c) * f(r, c);
    if (s > start_norm) {
      start_norm = s;
      start = c;
    }
  }
  std::vector<double> u(rows), v(cols), z(cols);
  for (int r = 0; r < rows; ++r) u[r] = f(r, start) / std::sqrt(start_norm);
  multiply_transposed(f, u, v);
  double vn = norm2(v);
  for (double& x : v) x /= vn;

  double residual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    multiply(f, v, u);
    double sigma = norm2(u);
    for (double& x : u) x /= sigma;
    multiply_transposed(f, u, z);
    double sigma_next = norm2(z);
    residual = 0.0;
    for (int c = 0; c < cols; ++c) {
      double d = z[c] - sigma * v[c];
      residual += d * d;
    }
    residual = std::sqrt(residual);
    for (int c = 0; c < cols; ++c) v[c] = z[c] / sigma_next;

    if (std::abs(sigma_next - sigma) <= options.sigma_tolerance * sigma_next &&
        residual <= options.residual_tolerance * sigma_next) {
      Rank1Factors out;
      out.iterations = it;
      out.v1 = v;
      out.u1.resize(rows);
      multiply(f, v, out.u1);
      out.sigma1 = norm2(out.u1);
      for (double& x : out.u1) x /= out.sigma1;
      std::vector<double> before = out.u1;
      canonicalize_sign(out.u1);
      if (out.u1 != before) {
        for (double& x : out.v1) x = -x;
      }
      return out;
    }
  }
  std::ostringstream msg;
  msg << "power iteration did not converge after " << options.max_iterations
      << " iterations; last residual " << residual;
  throw NumericalError(msg.str());
}

Matrix reconstruct(const Rank1Factors& factors) {
  int rows = static_cast<int>(factors.u1.size());
  int cols = static_cast<int>(factors.v1.size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = factors.sigma1 * factors.u1[r] * factors.v1[c];
    }
  }
  return m;
}

FilterRepresentative representative(const FilterTensor& filter,
                                    int source_filter_index) {
  if (filter.all_zero()) {
    throw DegenerateFilterError("filter " + std::to_string(source_filter_index) +
                                " is all zero");
  }
  Rank1Factors factors = best_rank1(filter_to_matrix(filter));
  Matrix approx = reconstruct(factors);

  // Every normalised column of the rank-1 matrix is +/- u1; take the one with
  // the most weight so the normalisation is best conditioned.
  int col = 0;
  for (int c = 1; c < approx.cols(); ++c) {
    if (std::abs(factors.v1[c]) > std::abs(factors.v1[col])) col = c;
  }
  FilterRepresentative rep;
  rep.source_filter_index = source_filter_index;
  rep.vector.resize(approx.rows());
  for (int r = 0; r < approx.rows(); ++r) rep.vector[r] = approx(r, col);
  double n = norm2(rep.vector);
  for (double& x : rep.vector) x /= n;
  canonicalize_sign(rep.vector);
  return rep;
}

std::vector<FilterRepresentative> representatives(
    std::span<const FilterTensor> filters, std::vector<int>* degenerate) {
  std::vector<FilterRepresentative> all(filters.size());
  std::vector<char> zero(filters.size(), 0);
  parallel_for(filters.size(), [&](size_t i) {
    if (filters[i].all_zero()) {
      zero[i] = 1;
      return;
    }
    all[i] = representative(filters[i], static_cast<int>(i));
  });
  std::vector<FilterRepresentative> out;
  for (size_t i = 0; i < filters.size(); ++i) {
    if (zero[i]) {
      if (degenerate) degenerate->push_back(static_cast<int>(i));
    } else {
      out.push_back(std::move(all[i]));
    }
  }
  return out;
}

}  // namespace prunekit
