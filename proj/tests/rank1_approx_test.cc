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

#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "prunekit/errors.h"
#include "test_util.h"

namespace prunekit {
namespace {

// Independent oracle: dense SVD.
double oracle_sigma1(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()(0);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) s += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
  }
  return std::sqrt(s);
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// max(|u^T R|, |R v|) for R = F - sigma u v^T.
double residual_orthogonality(const Matrix& f, const Rank1Factors& k) {
  Matrix approx = reconstruct(k);
  double worst = 0.0;
  for (int c = 0; c < f.cols(); ++c) {
    double s = 0.0;
    for (int r = 0; r < f.rows(); ++r) s += k.u1[r] * (f(r, c) - approx(r, c));
    worst = std::max(worst, std::abs(s));
  }
  for (int r = 0; r < f.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < f.cols(); ++c) s += (f(r, c) - approx(r, c)) * k.v1[c];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

FilterTensor filter_from_outer(const std::vector<double>& spatial, int h, int w,
                               const std::vector<double>& channel) {
  Matrix m(h * w, static_cast<int>(channel.size()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = spatial[r] * channel[c];
  }
  return matrix_to_filter(m, h, w);
}

TEST(FilterToMatrixTest, OneByOneFilterIsARow) {
  FilterTensor f{1, 1, 3, {1.0, 2.0, 3.0}};
  Matrix m = filter_to_matrix(f);
  EXPECT_EQ(m, Matrix(1, 3, {1.0, 2.0, 3.0}));
}

TEST(FilterToMatrixTest, SingleChannelIsRowMajorColumn) {
  FilterTensor f{2, 2, 1, {1.0, 2.0, 3.0, 4.0}};
  EXPECT_EQ(filter_to_matrix(f), Matrix(4, 1, {1.0, 2.0, 3.0, 4.0}));
}

TEST(FilterToMatrixTest, ColumnsAreChannelSlices) {
  // Channel 0 = [[0,1],[2,3]], channel 1 = [[10,11],[12,13]].
  FilterTensor f{2, 2, 2, {0, 1, 2, 3, 10, 11, 12, 13}};
  Matrix m = filter_to_matrix(f);
  ASSERT_EQ(m.rows(), 4);
  ASSERT_EQ(m.cols(), 2);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(m(k, 0), k);
    EXPECT_EQ(m(k, 1), 10 + k);
  }
}

TEST(FilterToMatrixTest, RoundTrip) {
  std::mt19937_64 rng(1);
  FilterTensor f = testing::random_filter(rng, 3, 2, 4);
  Matrix m = filter_to_matrix(f);
  EXPECT_EQ(matrix_to_filter(m, 3, 2), f);
  EXPECT_EQ(filter_to_matrix(matrix_to_filter(m, 3, 2)), m);
}

TEST(BestRank1Test, ExactRankOneInput) {
  Matrix f(2, 2, {1, 2, 2, 4});
  Rank1Factors k = best_rank1(f);
  EXPECT_NEAR(k.sigma1, 5.0, 1e-12);
  EXPECT_LT(frobenius_distance(reconstruct(k), f), 1e-12);
}

TEST(BestRank1Test, IdentityHasUnitResidual) {
  Matrix f(2, 2, {1, 0, 0, 1});
  Rank1Factors k = best_rank1(f);
  EXPECT_NEAR(k.sigma1, 1.0, 1e-12);
  EXPECT_NEAR(frobenius_distance(reconstruct(k), f), 1.0, 1e-12);
}

TEST(BestRank1Test, RandomSixByFourMatchesDenseSvd) {
  std::mt19937_64 rng(64);
  Matrix f = testing::random_matrix(rng, 6, 4);
  Rank1Factors k = best_rank1(f);
  double expected = oracle_sigma1(f);
  EXPECT_NEAR(k.sigma1, expected, 1e-6 * expected);
}

TEST(BestRank1Test, FactorInvariants) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    std::uniform_int_distribution<int> dim(1, 8);
    Matrix f = testing::random_matrix(rng, dim(rng), dim(rng));
    Rank1Factors k = best_rank1(f);
    EXPECT_NEAR(norm(k.u1), 1.0, 1e-9);
    EXPECT_NEAR(norm(k.v1), 1.0, 1e-9);
    EXPECT_GE(k.sigma1, 0.0);
    // sigma1 = ||F^T u1||
    std::vector<double> ftu(f.cols(), 0.0);
    for (int r = 0; r < f.rows(); ++r) {
      for (int c = 0; c < f.cols(); ++c) ftu[c] += f(r, c) * k.u1[r];
    }
    EXPECT_NEAR(norm(ftu), k.sigma1, 1e-6 * k.sigma1);
    EXPECT_LE(residual_orthogonality(f, k), 1e-6 * f.frobenius_norm());
  }
}

TEST(BestRank1Test, BeatsRandomRankOneCandidates) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10; ++t) {
    std::uniform_int_distribution<int> dim(1, 8);
    int rows = dim(rng), cols = dim(rng);
    Matrix f = testing::random_matrix(rng, rows, cols);
    double best = frobenius_distance(reconstruct(best_rank1(f)), f);
    for (int c = 0; c < 10000; ++c) {
      Rank1Factors cand;
      cand.u1.resize(rows);
      cand.v1.resize(cols);
      for (double& x : cand.u1) x = normal(rng);
      for (double& x : cand.v1) x = normal(rng);
      // Optimal scale for this direction pair: sigma = u^T F v / (|u|^2 |v|^2).
      double num = 0.0;
      for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < cols; ++k) num += cand.u1[r] * f(r, k) * cand.v1[k];
      }
      double nu = norm(cand.u1), nv = norm(cand.v1);
      cand.sigma1 = num / (nu * nu * nv * nv);
      ASSERT_LE(best, frobenius_distance(reconstruct(cand), f) + 1e-12);
    }
  }
}

TEST(BestRank1Test, ScaleEquivariance) {
  std::mt19937_64 rng(4);
  for (double alpha : {3.5, -2.0, 1e-3, 250.0}) {
    Matrix f = testing::random_matrix(rng, 5, 3);
    Matrix scaled(5, 3);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 3; ++c) scaled(r, c) = alpha * f(r, c);
    }
    double s = best_rank1(f).sigma1;
    EXPECT_NEAR(best_rank1(scaled).sigma1, std::abs(alpha) * s, 1e-9 * std::abs(alpha) * s);
  }
}

TEST(BestRank1Test, ZeroMatrixIsDegenerate) {
  EXPECT_THROW(best_rank1(Matrix(3, 2)), DegenerateFilterError);
}

TEST(BestRank1Test, NonConvergenceReportsResidual) {
  std::mt19937_64 rng(5);
  Matrix f = testing::random_matrix(rng, 8, 8);
  PowerIterationOptions opts;
  opts.max_iterations = 1;
  try {
    best_rank1(f, opts);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(CanonicalizeSignTest, LargestMagnitudeBecomesPositive) {
  std::vector<double> v{0.1, -0.9, 0.3};
  canonicalize_sign(v);
  EXPECT_EQ(v, (std::vector<double>{-0.1, 0.9, -0.3}));
  canonicalize_sign(v);
  EXPECT_EQ(v, (std::vector<double>{-0.1, 0.9, -0.3}));
}

TEST(CanonicalizeSignTest, TieUsesLowestIndex) {
  std::vector<double> v{-0.5, 0.5};
  canonicalize_sign(v);
  EXPECT_EQ(v, (std::vector<double>{0.5, -0.5}));
}

TEST(RepresentativeTest, PositiveOuterProduct) {
  FilterTensor f = filter_from_outer({3, 4}, 2, 1, {1, 1});
  FilterRepresentative rep = representative(f, 7);
  EXPECT_EQ(rep.source_filter_index, 7);
  ASSERT_EQ(rep.vector.size(), 2u);
  EXPECT_NEAR(rep.vector[0], 0.6, 1e-12);
  EXPECT_NEAR(rep.vector[1], 0.8, 1e-12);
}

TEST(RepresentativeTest, NegativeOuterProductIsCanonicalized) {
  FilterTensor f = filter_from_outer({-3, -4}, 2, 1, {1, 1});
  FilterRepresentative rep = representative(f);
  EXPECT_NEAR(rep.vector[0], 0.6, 1e-12);
  EXPECT_NEAR(rep.vector[1], 0.8, 1e-12);
}

TEST(RepresentativeTest, MixedSignChannelsGiveSameRepresentative) {
  FilterTensor a = filter_from_outer({1, -2, 2}, 3, 1, {1, -1, 0.5});
  FilterTensor b = filter_from_outer({1, -2, 2}, 3, 1, {-2, 1, 1});
  FilterRepresentative ra = representative(a), rb = representative(b);
  for (size_t i = 0; i < ra.vector.size(); ++i) {
    EXPECT_NEAR(ra.vector[i], rb.vector[i], 1e-12);
  }
}

TEST(RepresentativeTest, EqualsCanonicalLeftSingularVector) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    FilterTensor f = testing::random_filter(rng, 3, 3, 4);
    Rank1Factors k = best_rank1(filter_to_matrix(f));
    FilterRepresentative rep = representative(f);
    EXPECT_NEAR(norm(rep.vector), 1.0, 1e-9);
    for (size_t i = 0; i < rep.vector.size(); ++i) {
      EXPECT_NEAR(rep.vector[i], k.u1[i], 1e-9);
    }
  }
}

TEST(RepresentativeTest, PositiveScaleInvariant) {
  std::mt19937_64 rng(7);
  FilterTensor f = testing::random_filter(rng, 2, 3, 5);
  FilterTensor scaled = f;
  for (double& v : scaled.values) v *= 42.0;
  FilterRepresentative a = representative(f), b = representative(scaled);
  for (size_t i = 0; i < a.vector.size(); ++i) EXPECT_NEAR(a.vector[i], b.vector[i], 1e-12);
  std::vector<double> again = a.vector;
  canonicalize_sign(again);
  EXPECT_EQ(again, a.vector);
}

TEST(RepresentativeTest, ZeroFilterIsDegenerate) {
  FilterTensor f{2, 2, 2, std::vector<double>(8, 0.0)};
  EXPECT_THROW(representative(f), DegenerateFilterError);
}

TEST(RepresentativesTest, SkipsZeroFilters) {
  std::mt19937_64 rng(8);
  std::vector<FilterTensor> filters{testing::random_filter(rng, 2, 2, 2),
                                    FilterTensor{2, 2, 2, std::vector<double>(8, 0.0)},
                                    testing::random_filter(rng, 2, 2, 2)};
  std::vector<int> degenerate;
  std::vector<FilterRepresentative> reps = representatives(filters, &degenerate);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].source_filter_index, 0);
  EXPECT_EQ(reps[1].source_filter_index, 2);
  EXPECT_EQ(degenerate, std::vector<int>{1});
}

}  // namespace
}  // namespace prunekit
