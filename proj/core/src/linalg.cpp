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

#include "amcc/linalg.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "amcc/error.hpp"

namespace amcc {

Matrix centering_matrix(int n) {
  if (n < 1) throw DimensionError("centering matrix needs n >= 1");
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

Matrix linear_gram(const Matrix& x) { return x * x.transpose(); }

GramPair make_gram_pair(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("HSIC inputs must have the same shape");
  }
  if (x.rows() < 2) throw DimensionError("HSIC needs at least two observations");
  return {linear_gram(x), linear_gram(y),
          centering_matrix(static_cast<int>(x.rows()))};
}

double empirical_hsic(const Matrix& x, const Matrix& y) {
  const GramPair g = make_gram_pair(x, y);
  const double n = static_cast<double>(x.rows());
  // tr(A B) = sum(A .* B^T); both centered Grams are symmetric.
  const Matrix kx_c = g.h * g.k1 * g.h;
  const Matrix ky_c = g.h * g.k2 * g.h;
  const double value = kx_c.cwiseProduct(ky_c).sum() / ((n - 1.0) * (n - 1.0));
  return std::max(value, 0.0);
}

Vector project_row_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  if (n < 1) throw DimensionError("cannot project an empty vector");
  Vector sorted = v;
  std::sort(sorted.data(), sorted.data() + n, std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  Vector out = (v.array() - theta).max(0.0).matrix();
  // Renormalize away the rounding left by the threshold.
  const double s = out.sum();
  if (s > 0.0) out /= s;
  return out;
}

Matrix project_rows_simplex(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.row(i) = project_row_simplex(m.row(i).transpose()).transpose();
  }
  return out;
}

LabelCorrelation build_label_correlation(const AnnotationTensor& tensor) {
  const int num_labels = tensor.num_labels();
  Matrix mean = Matrix::Zero(tensor.num_samples(), num_labels);
  for (const Matrix& a : tensor.matrices()) mean += a;
  mean /= static_cast<double>(tensor.num_workers());

  const Vector norms = mean.colwise().norm().transpose();
  const Matrix dots = mean.transpose() * mean;
  LabelCorrelation out;
  out.similarity = Matrix::Zero(num_labels, num_labels);
  for (int l = 0; l < num_labels; ++l) {
    for (int k = 0; k < num_labels; ++k) {
      if (norms[l] > 0.0 && norms[k] > 0.0) {
        out.similarity(l, k) = dots(l, k) / (norms[l] * norms[k]);
      }
    }
  }
  // Symmetrize away rounding and pin self-similarity of nonzero columns.
  out.similarity = 0.5 * (out.similarity + out.similarity.transpose()).eval();
  for (int l = 0; l < num_labels; ++l) {
    if (norms[l] > 0.0) out.similarity(l, l) = 1.0;
  }
  // Negative annotations can produce negative cosines; the graph needs
  // non-negative edge weights for a PSD Laplacian.
  out.similarity = out.similarity.cwiseMax(0.0);
  out.degree = out.similarity.rowwise().sum().asDiagonal();
  out.laplacian = out.degree - out.similarity;
  return out;
}

Matrix solve_spd_system(const Matrix& a, const Matrix& rhs,
                        std::string_view subproblem) {
  if (a.rows() != a.cols() || a.rows() != rhs.rows()) {
    throw DimensionError("SPD solve: incompatible shapes in " +
                         std::string(subproblem));
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("SPD solve failed in " + std::string(subproblem) +
                         ": matrix is not positive definite");
  }
  Matrix x = llt.solve(rhs);
  const double residual = (a * x - rhs).norm() / std::max(1.0, rhs.norm());
  if (!(residual < 1e-8)) {
    throw NumericalError("SPD solve in " + std::string(subproblem) +
                         " left relative residual " + std::to_string(residual));
  }
  return x;
}

ConvexityReport verify_convexity_bound(std::span<const Matrix> individuality,
                                       double mu, double beta) {
  ConvexityReport report;
  if (individuality.empty()) return report;
  const int num_workers = static_cast<int>(individuality.size());
  const int num_labels = static_cast<int>(individuality.front().rows());
  const Matrix h = centering_matrix(num_labels);

  std::vector<Matrix> centered;
  centered.reserve(individuality.size());
  Matrix total = Matrix::Zero(num_labels, num_labels);
  for (const Matrix& d : individuality) {
    const Matrix hd = h * d;
    centered.push_back(hd * hd.transpose());
    total += centered.back();
  }

  double worst = std::numeric_limits<double>::infinity();
  for (int w = 0; w < num_workers; ++w) {
    const Matrix q = total - centered[w];
    const Matrix p = mu * Matrix::Identity(num_labels, num_labels) - beta * q;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p, Eigen::EigenvaluesOnly);
    worst = std::min(worst, eig.eigenvalues().minCoeff());
  }
  report.min_eigenvalue = worst;
  report.convex = worst >= -1e-8;
  report.sufficient_condition =
      beta <= 0.0 || mu / beta >= convexity_mu_ratio(num_labels, num_workers);
  return report;
}

}  // namespace amcc
