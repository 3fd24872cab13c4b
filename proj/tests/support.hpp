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

// Test fixtures and independent reference implementations. The references
// deliberately avoid the library's own kernels: plain loops, no Eigen
// products, no log-domain shortcuts.

#ifndef AMCC_TESTS_SUPPORT_HPP_
#define AMCC_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "amcc/types.hpp"

namespace amcc::testing {

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

// Rows drawn uniformly from positive values then normalized.
inline Matrix random_row_stochastic(int rows, int cols, std::mt19937_64& rng) {
  Matrix m = random_matrix(rows, cols, rng, 0.01, 1.0);
  for (int i = 0; i < rows; ++i) m.row(i) /= m.row(i).sum();
  return m;
}

inline Vector random_simplex(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

// Every worker gets at least one nonzero entry.
inline AnnotationTensor random_tensor(int workers, int samples, int labels,
                                      std::mt19937_64& rng, double density = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Matrix> mats;
  for (int w = 0; w < workers; ++w) {
    Matrix a = Matrix::Zero(samples, labels);
    for (int i = 0; i < samples; ++i) {
      for (int l = 0; l < labels; ++l) {
        const double x = u(rng);
        if (x < density * 0.7) a(i, l) = 1.0;
        else if (x < density) a(i, l) = -1.0;
      }
    }
    a(static_cast<int>(u(rng) * samples), static_cast<int>(u(rng) * labels)) = 1.0;
    mats.push_back(std::move(a));
  }
  return AnnotationTensor(std::move(mats));
}

// Model with random simplex rows of D, random C, random lambda and a random
// assignment that leaves no group empty (requires groups <= workers).
inline ConsensusModel random_model(const AnnotationTensor& tensor, int groups,
                                   std::mt19937_64& rng) {
  const int w_count = tensor.num_workers();
  const int l_count = tensor.num_labels();
  ConsensusModel m;
  for (int w = 0; w < w_count; ++w) m.individuality.push_back(random_row_stochastic(l_count, l_count, rng));
  for (int g = 0; g < groups; ++g) m.commonality.push_back(random_matrix(l_count, l_count, rng, -0.5, 0.5));
  m.group_weights = random_simplex(groups, rng);
  std::vector<int> assignment(w_count);
  for (int w = 0; w < w_count; ++w) assignment[w] = w % groups;
  std::shuffle(assignment.begin(), assignment.end(), rng);
  m.group_assignment = assignment;
  return m;
}

// (n-1)^-2 sum_{ijkl} K1_ij H_jk K2_kl H_li with linear kernels.
inline double brute_force_hsic(const Matrix& x, const Matrix& y) {
  const int n = static_cast<int>(x.rows());
  auto dot_rows = [](const Matrix& m, int a, int b) {
    double s = 0.0;
    for (int c = 0; c < m.cols(); ++c) s += m(a, c) * m(b, c);
    return s;
  };
  auto h = [n](int a, int b) { return (a == b ? 1.0 : 0.0) - 1.0 / n; };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double k1 = dot_rows(x, i, j);
      for (int k = 0; k < n; ++k) {
        const double hjk = h(j, k);
        for (int l = 0; l < n; ++l) {
          total += k1 * hjk * dot_rows(y, k, l) * h(l, i);
        }
      }
    }
  }
  return total / ((n - 1.0) * (n - 1.0));
}

// ||A - A (D + C)||_F^2 by explicit triple loops.
inline double loop_residual(const Matrix& a, const Matrix& d, const Matrix& c) {
  double total = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int l = 0; l < a.cols(); ++l) {
      double pred = 0.0;
      for (int g = 0; g < a.cols(); ++g) pred += a(i, g) * (d(g, l) + c(g, l));
      const double diff = a(i, l) - pred;
      total += diff * diff;
    }
  }
  return total;
}

// Cosine-graph Laplacian of the worker-averaged annotation matrix, by loops.
inline Matrix loop_laplacian(const AnnotationTensor& tensor) {
  const int n = tensor.num_samples();
  const int l_count = tensor.num_labels();
  Matrix avg = Matrix::Zero(n, l_count);
  for (int w = 0; w < tensor.num_workers(); ++w) {
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < l_count; ++l) avg(i, l) += tensor.at(w, i, l) / tensor.num_workers();
    }
  }
  Matrix b = Matrix::Zero(l_count, l_count);
  for (int p = 0; p < l_count; ++p) {
    for (int q = 0; q < l_count; ++q) {
      double dot = 0.0, np = 0.0, nq = 0.0;
      for (int i = 0; i < n; ++i) {
        dot += avg(i, p) * avg(i, q);
        np += avg(i, p) * avg(i, p);
        nq += avg(i, q) * avg(i, q);
      }
      // Negative cosines are dropped so edge weights stay non-negative.
      b(p, q) = (np == 0.0 || nq == 0.0) ? 0.0 : std::max(0.0, dot / std::sqrt(np * nq));
    }
  }
  Matrix lap = -b;
  for (int p = 0; p < l_count; ++p) {
    double deg = 0.0;
    for (int q = 0; q < l_count; ++q) deg += b(p, q);
    lap(p, p) += deg;
  }
  return lap;
}

// Term-by-term objective: reconstruction over every (group, worker) pair,
// HSIC over ordered pairs inside each group, trace of C^T Lap C by loops.
inline double objective_oracle(const AnnotationTensor& tensor, const ConsensusModel& model,
                               double alpha, double beta, double r) {
  const Matrix lap = loop_laplacian(tensor);
  const int l_count = tensor.num_labels();
  double total = 0.0;
  for (int m = 0; m < model.num_groups(); ++m) {
    const double weight = std::pow(model.group_weights[m], r);
    for (int w = 0; w < tensor.num_workers(); ++w) {
      total += weight * loop_residual(tensor.worker(w), model.individuality[w],
                                      model.commonality[m]);
    }
    for (int w = 0; w < tensor.num_workers(); ++w) {
      for (int v = 0; v < tensor.num_workers(); ++v) {
        if (w == v || model.group_assignment[w] != m || model.group_assignment[v] != m) continue;
        total -= alpha * brute_force_hsic(model.individuality[w], model.individuality[v]);
      }
    }
    const Matrix& c = model.commonality[m];
    double trace = 0.0;
    for (int j = 0; j < l_count; ++j) {
      for (int p = 0; p < l_count; ++p) {
        for (int q = 0; q < l_count; ++q) trace += c(p, j) * lap(p, q) * c(q, j);
      }
    }
    total += beta * trace;
  }
  return total;
}

inline double brute_set_accuracy(const std::vector<LabelSet>& pred,
                                 const std::vector<LabelSet>& truth) {
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::set<int> a(pred[i].begin(), pred[i].end());
    std::set<int> b(truth[i].begin(), truth[i].end());
    int inter = 0;
    for (int x : a) inter += static_cast<int>(b.count(x));
    const int uni = static_cast<int>(a.size() + b.size()) - inter;
    total += static_cast<double>(inter) / uni;
  }
  return total / static_cast<double>(pred.size());
}

inline bool contains(const LabelSet& s, int x) {
  return std::find(s.begin(), s.end(), x) != s.end();
}

// Returns {value, evaluated}; ties count as violations.
inline std::pair<double, int> brute_ranking_loss(const Matrix& scores,
                                                 const std::vector<LabelSet>& truth) {
  double total = 0.0;
  int evaluated = 0;
  for (int i = 0; i < scores.rows(); ++i) {
    int pairs = 0, bad = 0;
    for (int a = 0; a < scores.cols(); ++a) {
      if (!contains(truth[i], a)) continue;
      for (int b = 0; b < scores.cols(); ++b) {
        if (contains(truth[i], b)) continue;
        ++pairs;
        if (scores(i, b) >= scores(i, a)) ++bad;
      }
    }
    if (pairs == 0) continue;
    total += static_cast<double>(bad) / pairs;
    ++evaluated;
  }
  return {evaluated ? total / evaluated : 0.0, evaluated};
}

inline std::pair<double, int> brute_one_error(const Matrix& scores,
                                              const std::vector<LabelSet>& truth) {
  double misses = 0.0;
  int evaluated = 0;
  for (int i = 0; i < scores.rows(); ++i) {
    const int size = static_cast<int>(truth[i].size());
    if (size == 0 || size == scores.cols()) continue;
    int top = 0;
    for (int l = 1; l < scores.cols(); ++l) {
      if (scores(i, l) > scores(i, top)) top = l;
    }
    if (!contains(truth[i], top)) misses += 1.0;
    ++evaluated;
  }
  return {evaluated ? misses / evaluated : 0.0, evaluated};
}

// Hubert-Arabie adjusted Rand index from the contingency table.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, long> cells;
  std::map<int, long> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++cells[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto choose2 = [](long n) { return static_cast<double>(n) * (n - 1) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [k, n] : cells) index += choose2(n);
  for (const auto& [k, n] : rows) sum_rows += choose2(n);
  for (const auto& [k, n] : cols) sum_cols += choose2(n);
  const double expected = sum_rows * sum_cols / choose2(static_cast<long>(a.size()));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace amcc::testing

#endif  // AMCC_TESTS_SUPPORT_HPP_
