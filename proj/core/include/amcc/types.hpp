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

// Domain types shared by every module: datasets, annotation tensors, model
// parameters and the solver configuration.

#ifndef AMCC_TYPES_HPP_
#define AMCC_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace amcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using LabelMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;
using LabelSet = std::vector<int>;  // sorted, unique label indices

enum class Partition : std::uint8_t { kLabeled, kUnlabeled, kTest };

// Samples, their optional feature vectors and (for evaluation only) their
// true label sets. Indices are 0-based throughout the library.
class Dataset {
 public:
  Dataset(int num_samples, int num_labels,
          std::optional<Matrix> features = std::nullopt,
          std::optional<LabelMatrix> true_labels = std::nullopt,
          std::vector<Partition> partition = {});

  int num_samples() const { return num_samples_; }
  int num_labels() const { return num_labels_; }
  bool has_features() const { return features_.has_value(); }
  bool has_truth() const { return true_labels_.has_value(); }
  const std::optional<Matrix>& features() const { return features_; }
  const std::optional<LabelMatrix>& true_labels() const { return true_labels_; }
  const std::vector<Partition>& partition() const { return partition_; }

  // Relevant labels of sample i; requires truth.
  LabelSet truth_set(int sample) const;
  std::vector<LabelSet> truth_sets() const;
  std::vector<int> samples_in(Partition p) const;

  Dataset with_partition(std::vector<Partition> partition) const;

 private:
  int num_samples_;
  int num_labels_;
  std::optional<Matrix> features_;
  std::optional<LabelMatrix> true_labels_;
  std::vector<Partition> partition_;
};

struct AnnotationUpdate {
  int worker;
  int sample;
  int label;
  int value;  // +1 or -1
};

// One N x L matrix per worker with entries in {-1, 0, +1}; 0 means "not
// annotated". Every worker carries at least one nonzero entry.
class AnnotationTensor {
 public:
  explicit AnnotationTensor(std::vector<Matrix> matrices);

  int num_workers() const { return static_cast<int>(matrices_.size()); }
  int num_samples() const { return static_cast<int>(matrices_.front().rows()); }
  int num_labels() const { return static_cast<int>(matrices_.front().cols()); }

  const Matrix& worker(int w) const { return matrices_[w]; }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  double at(int worker, int sample, int label) const {
    return matrices_[worker](sample, label);
  }

  // Number of nonzero entries of worker w.
  long nnz(int w) const;
  long total_nnz() const;

  // Copy with the given entries overwritten.
  AnnotationTensor with_updates(std::span<const AnnotationUpdate> updates) const;

  bool operator==(const AnnotationTensor& other) const;

 private:
  std::vector<Matrix> matrices_;
};

// Cosine label-correlation graph over labels, its degree matrix and
// Laplacian (degree - similarity).
struct LabelCorrelation {
  Matrix similarity;
  Matrix degree;
  Matrix laplacian;
};

struct AmccConfig {
  int num_groups = 5;
  double alpha = 0.1;  // weight of the HSIC grouping term
  double beta = 10.0;  // weight of the Laplacian label-correlation term
  double r = 2.0;      // exponent on the group weights
  std::optional<double> mu;  // ADMM penalty; defaults to 4 L (W - 1) beta
  double eta = 0.3;
  int knn_k = 5;
  int max_inner_iters = 100;
  double convergence_tol = 1e-5;
  int batch_size = 5;
  std::optional<double> consensus_threshold;  // defaults to 1 / L
  double prob_floor = 1e-12;
  // Inner ADMM rounds per individuality update and their stopping tolerance.
  int admm_max_rounds = 20000;
  double admm_tol = 1e-10;

  // Fills the defaulted fields for a problem with the given label and worker
  // counts and validates the result. Throws ConfigError.
  AmccConfig resolved(int num_labels, int num_workers) const;

  // Throws ConfigError unless this is a fully resolved, valid config.
  void validate(int num_labels, int num_workers) const;

  double mu_value() const { return mu.value_or(0.0); }
  double threshold_value(int num_labels) const {
    return consensus_threshold.value_or(1.0 / num_labels);
  }
};

// Lower bound on mu / beta that makes every individuality subproblem convex.
double convexity_mu_ratio(int num_labels, int num_workers);

struct ConsensusModel {
  std::vector<Matrix> individuality;  // D_w, L x L, rows on the simplex
  std::vector<Matrix> commonality;    // C_m, L x L
  Vector group_weights;               // lambda, on the simplex
  std::vector<int> group_assignment;  // worker -> group in [0, M)
  LabelCorrelation label_correlation;

  int num_workers() const { return static_cast<int>(individuality.size()); }
  int num_groups() const { return static_cast<int>(commonality.size()); }
  std::vector<int> members(int group) const;

  // Throws InvariantError when a documented invariant does not hold.
  void validate(double tol = 1e-8) const;
};

}  // namespace amcc

#endif  // AMCC_TYPES_HPP_
