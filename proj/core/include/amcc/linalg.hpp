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

// Numerical kernels used by the consensus solver: centering, linear-kernel
// HSIC, simplex projection, label-correlation graphs, SPD solves and the
// convexity check for the individuality subproblem.

#ifndef AMCC_LINALG_HPP_
#define AMCC_LINALG_HPP_

#include <span>
#include <string_view>

#include "amcc/types.hpp"

namespace amcc {

// H with H_ij = delta_ij - 1/n.
Matrix centering_matrix(int n);

// Linear-kernel Gram matrix X X^T over the rows of X.
Matrix linear_gram(const Matrix& x);

// Centered Gram pair used by the HSIC estimator.
struct GramPair {
  Matrix k1;
  Matrix k2;
  Matrix h;
};
GramPair make_gram_pair(const Matrix& x, const Matrix& y);

// (n - 1)^-2 tr(Kx H Ky H) with linear kernels over the n rows of x and y.
// Results that round below zero are clamped to 0.
double empirical_hsic(const Matrix& x, const Matrix& y);

// Euclidean projection onto {u : u >= 0, sum u = 1} (sort-based).
Vector project_row_simplex(const Vector& v);

// Row-wise simplex projection.
Matrix project_rows_simplex(const Matrix& m);

// Cosine similarity between the label columns of the worker-averaged
// annotation matrix, with its degree matrix and Laplacian. All-zero columns
// get similarity 0.
LabelCorrelation build_label_correlation(const AnnotationTensor& tensor);

// Solves a x = rhs for symmetric positive definite a. Throws NumericalError
// naming `subproblem` when the factorization fails or the relative residual
// exceeds 1e-8.
Matrix solve_spd_system(const Matrix& a, const Matrix& rhs,
                        std::string_view subproblem = "linear system");

struct ConvexityReport {
  bool convex = false;               // min eigenvalue >= -1e-8
  double min_eigenvalue = 0.0;       // worst over all workers
  bool sufficient_condition = false; // mu / beta >= 4 L (W - 1)
};

// For each worker w forms P_w = mu I - beta Q_w with
// Q_w = sum_{v != w} H D_v D_v^T H and reports the smallest eigenvalue.
ConvexityReport verify_convexity_bound(std::span<const Matrix> individuality,
                                       double mu, double beta);

}  // namespace amcc

#endif  // AMCC_LINALG_HPP_
