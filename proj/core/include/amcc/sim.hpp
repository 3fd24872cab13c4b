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

// Synthetic crowds: ground truth with correlated labels, confusion-matrix
// worker archetypes, annotation sampling, sparsification and a memoizing
// oracle for the active loop.

#ifndef AMCC_SIM_HPP_
#define AMCC_SIM_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <string_view>
#include <tuple>
#include <vector>

#include "amcc/oracle.hpp"
#include "amcc/types.hpp"

namespace amcc {

enum class WorkerKind : std::uint8_t {
  kReliable,
  kNormal,
  kSloppy,
  kUniformSpammer,
  kRandomSpammer,
};

std::string_view to_string(WorkerKind kind);

struct WorkerArchetype {
  WorkerKind kind = WorkerKind::kReliable;
  Matrix confusion;  // L x L, row g is the emission distribution for truth g
  double annotation_rate = 1.0;
  double negative_rate = 0.1;

  // Diagonal `diagonal`, remaining mass spread evenly; the kind follows from
  // the diagonal (>= 0.9 reliable, >= 0.7 normal, otherwise sloppy).
  static WorkerArchetype graded(int num_labels, double diagonal, double rate,
                                double negative_rate = 0.1);
  static WorkerArchetype uniform_spammer(int num_labels, int column, double rate,
                                         double negative_rate = 0.1);
  static WorkerArchetype random_spammer(int num_labels, double rate,
                                        double negative_rate = 0.1);
  // Identity confusion, rate 1, no negatives.
  static WorkerArchetype noiseless(int num_labels);

  bool is_spammer() const {
    return kind == WorkerKind::kUniformSpammer || kind == WorkerKind::kRandomSpammer;
  }
  // Throws DomainError when the kind's invariants do not hold.
  void validate() const;
};

struct GroundTruthOptions {
  int feature_dim = 8;
  double feature_separation = 3.0;  // scale of the per-label feature means
  double feature_noise = 1.0;
  bool with_features = true;
};

// N label sets with expected size `cardinality`: one uniformly drawn label
// plus Binomial(L - 1, (cardinality - 1) / (L - 1)) extra labels drawn
// without replacement, biased toward ring neighbours of the labels already
// chosen with weight `correlation_strength` in [0, 1]. Features are the mean
// of the chosen labels' Gaussian centroids plus isotropic noise. Every
// sample starts in the labeled partition.
Dataset generate_ground_truth(int num_samples, int num_labels, double cardinality,
                              double correlation_strength, std::uint64_t seed,
                              const GroundTruthOptions& options = {});

// Seeded labeled / unlabeled / test split with the given fractions; the
// labeled part always holds at least one sample.
std::vector<Partition> random_partition(int num_samples, double labeled_fraction,
                                        double unlabeled_fraction, std::uint64_t seed);

// For every worker and every sample kept with probability annotation_rate,
// each true label g emits one +1 at a label drawn from confusion row g.
// Spammers then mark each remaining label -1 with probability
// negative_rate; other workers only mark labels that are neither true nor
// emitted. Workers that end up empty are redrawn once, then given one
// forced annotation.
AnnotationTensor annotate(const Dataset& dataset, std::span<const WorkerArchetype> workers,
                          std::uint64_t seed);

// Removes floor(fraction * nnz) entries per worker, keeping at least one.
// Removal follows a seeded per-worker permutation, so the removed sets are
// nested across fractions for a fixed seed.
AnnotationTensor sparsify(const AnnotationTensor& tensor, double remove_fraction,
                          std::uint64_t seed);

struct SimulatedCrowd {
  Dataset dataset;
  AnnotationTensor tensor;
  std::vector<WorkerArchetype> archetypes;
  std::uint64_t seed = 0;
};

struct CrowdOptions {
  int num_samples = 300;
  int num_labels = 6;
  double cardinality = 1.87;
  double correlation_strength = 0.5;
  double labeled_fraction = 0.05;
  double unlabeled_fraction = 0.70;
  GroundTruthOptions truth;
};

SimulatedCrowd simulate_crowd(const CrowdOptions& options,
                              std::vector<WorkerArchetype> archetypes, std::uint64_t seed);

// Seven graded workers with diagonals evenly spaced from 0.95 to 0.45 (rate
// 0.8), three uniform spammers on labels 0, 1, 2 and three random spammers
// (rate 1).
std::vector<WorkerArchetype> graded_with_spammers(int num_labels);

// `per_group` workers at each of the diagonals 0.95, 0.75 and 0.5 plus
// `per_group` random spammers. Generator group of worker w is w / per_group.
std::vector<WorkerArchetype> archetype_groups(int num_labels, int per_group = 3);

std::vector<WorkerArchetype> noiseless_crowd(int num_labels, int num_workers);

// Answers from the worker's confusion model given the sample's truth: +1
// with probability 1 - prod_{g in truth} (1 - confusion(g, label)), the
// chance that some true label emits `label`. Each answer is a
// pure function of (seed, sample, label, worker) and is cached.
class SimulatedOracle final : public AnnotationOracle {
 public:
  SimulatedOracle(const SimulatedCrowd& crowd, std::uint64_t seed);

  int answer(int sample, int label, int worker) override;
  double positive_probability(int sample, int label, int worker) const;
  std::size_t cache_size() const;

 private:
  const SimulatedCrowd& crowd_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::map<std::tuple<int, int, int>, int> cache_;
};

}  // namespace amcc

#endif  // AMCC_SIM_HPP_
