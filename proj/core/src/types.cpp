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

#include "amcc/types.hpp"

#include <cmath>
#include <string>

#include "amcc/error.hpp"

namespace amcc {

Dataset::Dataset(int num_samples, int num_labels, std::optional<Matrix> features,
                 std::optional<LabelMatrix> true_labels,
                 std::vector<Partition> partition)
    : num_samples_(num_samples),
      num_labels_(num_labels),
      features_(std::move(features)),
      true_labels_(std::move(true_labels)),
      partition_(std::move(partition)) {
  if (num_samples_ < 1) throw DimensionError("dataset needs at least one sample");
  if (num_labels_ < 2) throw DimensionError("dataset needs at least two labels");
  if (features_ && features_->rows() != num_samples_) {
    throw DimensionError("feature matrix has " + std::to_string(features_->rows()) +
                         " rows, expected " + std::to_string(num_samples_));
  }
  if (true_labels_) {
    const auto& y = *true_labels_;
    if (y.rows() != num_samples_ || y.cols() != num_labels_) {
      throw DimensionError("truth matrix shape does not match dataset");
    }
    for (int i = 0; i < num_samples_; ++i) {
      bool any = false;
      for (int l = 0; l < num_labels_; ++l) {
        if (y(i, l) != 0 && y(i, l) != 1) {
          throw DataError("truth entries must be 0 or 1");
        }
        any = any || y(i, l) == 1;
      }
      if (!any) {
        throw DataError("sample " + std::to_string(i) + " has no relevant label");
      }
    }
  }
  if (partition_.empty()) {
    partition_.assign(num_samples_, Partition::kLabeled);
  } else if (static_cast<int>(partition_.size()) != num_samples_) {
    throw DimensionError("partition length does not match sample count");
  }
}

LabelSet Dataset::truth_set(int sample) const {
  if (!true_labels_) throw PreconditionError("dataset carries no truth");
  LabelSet out;
  for (int l = 0; l < num_labels_; ++l) {
    if ((*true_labels_)(sample, l) == 1) out.push_back(l);
  }
  return out;
}

std::vector<LabelSet> Dataset::truth_sets() const {
  std::vector<LabelSet> out;
  out.reserve(num_samples_);
  for (int i = 0; i < num_samples_; ++i) out.push_back(truth_set(i));
  return out;
}

std::vector<int> Dataset::samples_in(Partition p) const {
  std::vector<int> out;
  for (int i = 0; i < num_samples_; ++i) {
    if (partition_[i] == p) out.push_back(i);
  }
  return out;
}

Dataset Dataset::with_partition(std::vector<Partition> partition) const {
  return Dataset(num_samples_, num_labels_, features_, true_labels_,
                 std::move(partition));
}

AnnotationTensor::AnnotationTensor(std::vector<Matrix> matrices)
    : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw DimensionError("annotation tensor has no workers");
  const auto rows = matrices_.front().rows();
  const auto cols = matrices_.front().cols();
  if (rows < 1 || cols < 2) {
    throw DimensionError("annotation matrices need N >= 1 and L >= 2");
  }
  for (std::size_t w = 0; w < matrices_.size(); ++w) {
    const Matrix& a = matrices_[w];
    if (a.rows() != rows || a.cols() != cols) {
      throw DimensionError("worker " + std::to_string(w) +
                           " annotation matrix has a different shape");
    }
    long nonzero = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double v = a.data()[i];
      if (v != 0.0 && v != 1.0 && v != -1.0) {
        throw DataError("annotation values must be -1, 0 or +1 (worker " +
                        std::to_string(w) + ")");
      }
      if (v != 0.0) ++nonzero;
    }
    if (nonzero == 0) {
      throw DataError("worker " + std::to_string(w) + " has no annotations");
    }
  }
}

long AnnotationTensor::nnz(int w) const {
  return static_cast<long>((matrices_[w].array() != 0.0).count());
}

long AnnotationTensor::total_nnz() const {
  long total = 0;
  for (int w = 0; w < num_workers(); ++w) total += nnz(w);
  return total;
}

AnnotationTensor AnnotationTensor::with_updates(
    std::span<const AnnotationUpdate> updates) const {
  std::vector<Matrix> copy = matrices_;
  for (const auto& u : updates) {
    if (u.worker < 0 || u.worker >= num_workers() || u.sample < 0 ||
        u.sample >= num_samples() || u.label < 0 || u.label >= num_labels()) {
      throw DimensionError("annotation update index out of range");
    }
    if (u.value != 1 && u.value != -1) {
      throw DataError("annotation update value must be +1 or -1");
    }
    copy[u.worker](u.sample, u.label) = u.value;
  }
  return AnnotationTensor(std::move(copy));
}

bool AnnotationTensor::operator==(const AnnotationTensor& other) const {
  if (matrices_.size() != other.matrices_.size()) return false;
  for (std::size_t w = 0; w < matrices_.size(); ++w) {
    if (matrices_[w].rows() != other.matrices_[w].rows() ||
        matrices_[w].cols() != other.matrices_[w].cols() ||
        matrices_[w] != other.matrices_[w]) {
      return false;
    }
  }
  return true;
}

double convexity_mu_ratio(int num_labels, int num_workers) {
  return 4.0 * num_labels * (num_workers - 1);
}

AmccConfig AmccConfig::resolved(int num_labels, int num_workers) const {
  AmccConfig out = *this;
  if (!out.mu) {
    // With beta = 0 or a single worker the bound is vacuous; any positive
    // penalty works.
    out.mu = beta > 0.0 && num_workers > 1
                 ? convexity_mu_ratio(num_labels, num_workers) * beta
                 : 1.0;
  }
  if (!out.consensus_threshold) out.consensus_threshold = 1.0 / num_labels;
  out.validate(num_labels, num_workers);
  return out;
}

void AmccConfig::validate(int num_labels, int num_workers) const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (num_labels < 2) fail("need at least two labels");
  if (num_workers < 1) fail("need at least one worker");
  if (num_groups < 1) fail("num_groups must be positive");
  if (num_groups > num_workers) {
    fail("num_groups (" + std::to_string(num_groups) +
         ") exceeds the number of workers (" + std::to_string(num_workers) + ")");
  }
  if (!(alpha >= 0.0)) fail("alpha must be non-negative");
  if (!(beta >= 0.0)) fail("beta must be non-negative");
  if (!(r > 1.0)) fail("r must be greater than 1");
  if (!mu || !(*mu > 0.0)) fail("mu must be positive");
  if (beta > 0.0 && num_workers > 1) {
    const double need = convexity_mu_ratio(num_labels, num_workers);
    // Relative slack absorbs rounding in user-supplied values.
    if (*mu / beta < need * (1.0 - 1e-12)) {
      fail("mu / beta = " + std::to_string(*mu / beta) +
           " violates the convexity bound mu / beta >= 4 L (W - 1) = " +
           std::to_string(need));
    }
  }
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
  if (knn_k < 1) fail("knn_k must be positive");
  if (max_inner_iters < 1) fail("max_inner_iters must be positive");
  if (!(convergence_tol > 0.0)) fail("convergence_tol must be positive");
  if (batch_size < 1) fail("batch_size must be positive");
  if (consensus_threshold &&
      !(*consensus_threshold > 0.0 && *consensus_threshold < 1.0)) {
    fail("consensus_threshold must lie in (0, 1)");
  }
  if (!(prob_floor > 0.0)) fail("prob_floor must be positive");
  if (admm_max_rounds < 1) fail("admm_max_rounds must be positive");
  if (!(admm_tol > 0.0)) fail("admm_tol must be positive");
}

std::vector<int> ConsensusModel::members(int group) const {
  std::vector<int> out;
  for (int w = 0; w < static_cast<int>(group_assignment.size()); ++w) {
    if (group_assignment[w] == group) out.push_back(w);
  }
  return out;
}

void ConsensusModel::validate(double tol) const {
  const int m_count = num_groups();
  if (group_weights.size() != m_count) {
    throw InvariantError("group weight vector length differs from group count");
  }
  if (static_cast<int>(group_assignment.size()) != num_workers()) {
    throw InvariantError("group assignment length differs from worker count");
  }
  for (int g : group_assignment) {
    if (g < 0 || g >= m_count) throw InvariantError("group index out of range");
  }
  if ((group_weights.array() < 0.0).any() ||
      std::abs(group_weights.sum() - 1.0) > tol) {
    throw InvariantError("group weights are not on the simplex");
  }
  for (int w = 0; w < num_workers(); ++w) {
    const Matrix& d = individuality[w];
    if ((d.array() < -tol).any()) {
      throw InvariantError("individuality of worker " + std::to_string(w) +
                           " has a negative entry");
    }
    const Vector sums = d.rowwise().sum();
    if ((sums.array() - 1.0).abs().maxCoeff() > tol) {
      throw InvariantError("individuality of worker " + std::to_string(w) +
                           " has a row off the simplex");
    }
  }
}

}  // namespace amcc
