// Copyright 2026 The AMCC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "amcc/error.hpp"
#include "amcc/linalg.hpp"
#include "support.hpp"

namespace amcc {
namespace {

TEST(CenteringMatrix, SmallCases) {
  EXPECT_EQ(centering_matrix(1), Matrix::Zero(1, 1));
  Matrix two(2, 2);
  two << 0.5, -0.5, -0.5, 0.5;
  EXPECT_TRUE(centering_matrix(2).isApprox(two, 1e-15));
  const Matrix h4 = centering_matrix(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(h4(i, j), i == j ? 0.75 : -0.25);
  }
  EXPECT_LT((h4 * Vector::Ones(4)).norm(), 1e-15);
  EXPECT_THROW(centering_matrix(0), DimensionError);
}

TEST(CenteringMatrix, IsIdempotentWithZeroRowSums) {
  for (int n = 2; n <= 12; ++n) {
    const Matrix h = centering_matrix(n);
    EXPECT_LT((h * h - h).norm(), 1e-8);
    EXPECT_LT(h.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GramPair, SymmetricKernels) {
  std::mt19937_64 rng(5);
  const GramPair g = make_gram_pair(testing::random_matrix(5, 5, rng),
                                    testing::random_matrix(5, 5, rng));
  EXPECT_LT((g.k1 - g.k1.transpose()).norm(), 1e-10);
  EXPECT_LT((g.k2 - g.k2.transpose()).norm(), 1e-10);
  EXPECT_TRUE(g.h.isApprox(centering_matrix(5)));
}

TEST(EmpiricalHsic, ConstantMatrixGivesZero) {
  const Matrix c = Matrix::Constant(4, 4, 0.3);
  EXPECT_NEAR(empirical_hsic(c, c), 0.0, 1e-15);
}

TEST(EmpiricalHsic, IdentityMatchesBruteForce) {
  const Matrix i3 = Matrix::Identity(3, 3);
  const double expected = testing::brute_force_hsic(i3, i3);
  // tr(HH)/4 with H idempotent of rank 2 gives 2/4.
  EXPECT_NEAR(expected, 0.5, 1e-15);
  EXPECT_NEAR(empirical_hsic(i3, i3), expected, 1e-12);
}

TEST(EmpiricalHsic, RandomFourByFourMatchesBruteForce) {
  std::mt19937_64 rng(42);
  const Matrix x = testing::random_matrix(4, 4, rng);
  const Matrix y = testing::random_matrix(4, 4, rng);
  EXPECT_NEAR(empirical_hsic(x, y), std::max(0.0, testing::brute_force_hsic(x, y)), 1e-9);
}

TEST(EmpiricalHsic, Errors) {
  EXPECT_THROW(empirical_hsic(Matrix::Zero(3, 3), Matrix::Zero(4, 4)), DimensionError);
  EXPECT_THROW(empirical_hsic(Matrix::Zero(1, 1), Matrix::Zero(1, 1)), DimensionError);
}

TEST(EmpiricalHsic, SymmetricAndShiftInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6;
    const Matrix x = testing::random_matrix(n, n, rng);
    const Matrix y = testing::random_matrix(n, n, rng);
    EXPECT_NEAR(empirical_hsic(x, y), empirical_hsic(y, x), 1e-12);
    const Matrix shifted = x.array() + 2.5;
    EXPECT_NEAR(empirical_hsic(shifted, y), empirical_hsic(x, y), 1e-9);
    EXPECT_GE(empirical_hsic(x, y), 0.0);
  }
}

TEST(ProjectRowSimplex, FixedPointsAndAxes) {
  Vector on(3);
  on << 0.2, 0.3, 0.5;
  EXPECT_TRUE(project_row_simplex(on).isApprox(on, 1e-15));
  Vector axis(3);
  axis << 2, 0, 0;
  EXPECT_TRUE(project_row_simplex(axis).isApprox(Vector::Unit(3, 0), 1e-15));
  EXPECT_THROW(project_row_simplex(Vector()), DimensionError);
}

TEST(ProjectRowSimplex, MatchesGridSearch) {
  Vector v(3);
  v << 0.6, 0.6, 0.0;
  const double step = 1e-3;
  Vector best(3);
  double best_d = 1e300;
  for (int a = 0; a <= 1000; ++a) {
    for (int b = 0; a + b <= 1000; ++b) {
      Vector u(3);
      u << a * step, b * step, 1.0 - (a + b) * step;
      const double d = (u - v).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = u;
      }
    }
  }
  EXPECT_LT((project_row_simplex(v) - best).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(ProjectRowSimplex, IdempotentAndFeasible) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = testing::random_matrix(1 + trial % 9, 1, rng, -3.0, 3.0).col(0);
    const Vector p = project_row_simplex(v);
    EXPECT_NEAR(p.sum(), 1.0, 1e-10);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LT((project_row_simplex(p) - p).norm(), 1e-12);
  }
}

TEST(BuildLabelCorrelation, ParallelAndDisjointColumns) {
  Matrix a(4, 3);
  a << 1, 1, 0,
       1, 1, 0,
       0, 0, 1,
       1, 1, 0;
  const LabelCorrelation lc = build_label_correlation(AnnotationTensor({a}));
  EXPECT_NEAR(lc.similarity(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(lc.similarity(0, 2), 0.0, 1e-12);
  EXPECT_NEAR(lc.similarity(2, 2), 1.0, 1e-12);
}

TEST(BuildLabelCorrelation, HandComputedToyTensor) {
  Matrix a1(3, 3), a2(3, 3);
  a1 << 1, 0, 1,
        0, 1, 0,
        1, 1, 0;
  a2 << 1, 1, 0,
        0, 1, 1,
        -1, 1, 0;
  // Averaged columns: c0 = (1, 0, 0), c1 = (0.5, 1, 1), c2 = (0.5, 0.5, 0).
  const double c01 = 0.5 / (1.0 * 1.5);
  const double c02 = 0.5 / (1.0 * std::sqrt(0.5));
  const double c12 = (0.25 + 0.5) / (1.5 * std::sqrt(0.5));
  const LabelCorrelation lc = build_label_correlation(AnnotationTensor({a1, a2}));
  EXPECT_NEAR(lc.similarity(0, 1), c01, 1e-8);
  EXPECT_NEAR(lc.similarity(0, 2), c02, 1e-8);
  EXPECT_NEAR(lc.similarity(1, 2), c12, 1e-8);
  EXPECT_NEAR(lc.degree(1, 1), 1.0 + c01 + c12, 1e-8);
  EXPECT_NEAR(lc.laplacian(1, 2), -c12, 1e-8);
}

TEST(BuildLabelCorrelation, AllZeroColumnGetsZeroSimilarity) {
  Matrix a = Matrix::Zero(2, 3);
  a(0, 0) = 1;
  a(1, 1) = 1;
  const LabelCorrelation lc = build_label_correlation(AnnotationTensor({a}));
  EXPECT_EQ(lc.similarity.row(2).norm(), 0.0);
  EXPECT_EQ(lc.similarity.col(2).norm(), 0.0);
  EXPECT_FALSE(lc.similarity.hasNaN());
}

TEST(BuildLabelCorrelation, LaplacianIsPsdAndMatchesLoopOracle) {
  std::mt19937_64 rng(21);
  const AnnotationTensor t = testing::random_tensor(4, 12, 5, rng);
  const LabelCorrelation lc = build_label_correlation(t);
  EXPECT_LT((lc.laplacian - testing::loop_laplacian(t)).cwiseAbs().maxCoeff(), 1e-10);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = testing::random_matrix(5, 1, rng, -2.0, 2.0).col(0);
    EXPECT_GE(x.dot(lc.laplacian * x), -1e-8);
  }
}

TEST(SolveSpdSystem, TrivialSystems) {
  std::mt19937_64 rng(1);
  const Matrix rhs = testing::random_matrix(4, 4, rng);
  EXPECT_TRUE(solve_spd_system(Matrix::Identity(4, 4), rhs).isApprox(rhs, 1e-14));
  EXPECT_TRUE(solve_spd_system(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3))
                  .isApprox(0.5 * Matrix::Identity(3, 3), 1e-14));
}

TEST(SolveSpdSystem, RandomSpdResidual) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b = testing::random_matrix(5, 5, rng);
    const Matrix a = b * b.transpose() + 0.1 * Matrix::Identity(5, 5);
    const Matrix rhs = testing::random_matrix(5, 5, rng);
    const Matrix x = solve_spd_system(a, rhs);
    EXPECT_LT((a * x - rhs).norm() / std::max(1.0, rhs.norm()), 1e-8);
    EXPECT_LT((solve_spd_system(a, a * rhs) - rhs).norm(), 1e-6);
  }
}

TEST(SolveSpdSystem, SingularSystemNamesSubproblem) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  try {
    solve_spd_system(a, Matrix::Identity(3, 3), "commonality group 2");
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("commonality group 2"), std::string::npos);
  }
}

TEST(VerifyConvexityBound, SufficientMuPasses) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int l = 2 + trial % 5;
    const int w = 2 + trial % 4;
    std::vector<Matrix> d;
    for (int k = 0; k < w; ++k) d.push_back(testing::random_row_stochastic(l, l, rng));
    const double beta = 1.5;
    const ConvexityReport r = verify_convexity_bound(d, 4.0 * l * (w - 1) * beta, beta);
    EXPECT_TRUE(r.convex);
    EXPECT_TRUE(r.sufficient_condition);
    EXPECT_GE(r.min_eigenvalue, -1e-8);
  }
}

TEST(VerifyConvexityBound, ZeroBetaIsMuIdentity) {
  std::mt19937_64 rng(2);
  std::vector<Matrix> d{testing::random_row_stochastic(3, 3, rng),
                        testing::random_row_stochastic(3, 3, rng)};
  const ConvexityReport r = verify_convexity_bound(d, 0.7, 0.0);
  EXPECT_TRUE(r.convex);
  EXPECT_NEAR(r.min_eigenvalue, 0.7, 1e-12);
}

TEST(VerifyConvexityBound, ZeroMuFailsOnNonconstantD) {
  std::mt19937_64 rng(4);
  std::vector<Matrix> d{testing::random_row_stochastic(4, 4, rng),
                        testing::random_row_stochastic(4, 4, rng),
                        testing::random_row_stochastic(4, 4, rng)};
  const ConvexityReport r = verify_convexity_bound(d, 0.0, 1.0);
  EXPECT_FALSE(r.convex);
  EXPECT_LT(r.min_eigenvalue, -1e-8);
  EXPECT_FALSE(r.sufficient_condition);
}

}  // namespace
}  // namespace amcc
