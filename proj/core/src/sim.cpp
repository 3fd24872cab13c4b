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

#include "amcc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <random>
#include <string>

#include "amcc/error.hpp"
#include "amcc/rng.hpp"

namespace amcc {
namespace {

// Stream tags keep the per-component generators independent.
enum : std::uint64_t {
  kTagTruth = 1,
  kTagFeatures = 2,
  kTagPartition = 3,
  kTagAnnotate = 4,
  kTagSparsify = 5,
  kTagOracle = 6,
};

Matrix graded_confusion(int num_labels, double diagonal) {
  const double off = (1.0 - diagonal) / (num_labels - 1);
  Matrix c = Matrix::Constant(num_labels, num_labels, off);
  c.diagonal().setConstant(diagonal);
  return c;
}

void check_rates(double rate, double negative_rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw DomainError("annotation rate must lie in (0, 1]");
  if (!(negative_rate >= 0.0 && negative_rate <= 1.0)) {
    throw DomainError("negative rate must lie in [0, 1]");
  }
}

int draw_label(const Matrix& confusion, int truth, std::mt19937_64& rng) {
  std::vector<double> weights(confusion.cols());
  for (Eigen::Index k = 0; k < confusion.cols(); ++k) weights[k] = confusion(truth, k);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  return pick(rng);
}

void annotate_worker(const Dataset& dataset, const std::vector<LabelSet>& truth,
                     const WorkerArchetype& worker, std::mt19937_64& rng, Matrix& out) {
  const int num_labels = dataset.num_labels();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < dataset.num_samples(); ++i) {
    if (unit(rng) >= worker.annotation_rate) continue;
    for (int g : truth[i]) out(i, draw_label(worker.confusion, g, rng)) = 1.0;
    for (int l = 0; l < num_labels; ++l) {
      if (out(i, l) != 0.0) continue;
      const bool truly = std::find(truth[i].begin(), truth[i].end(), l) != truth[i].end();
      if (!worker.is_spammer() && truly) continue;
      if (unit(rng) < worker.negative_rate) out(i, l) = -1.0;
    }
  }
}

}  // namespace

std::string_view to_string(WorkerKind kind) {
  switch (kind) {
    case WorkerKind::kReliable:
      return "reliable";
    case WorkerKind::kNormal:
      return "normal";
    case WorkerKind::kSloppy:
      return "sloppy";
    case WorkerKind::kUniformSpammer:
      return "uniform_spammer";
    case WorkerKind::kRandomSpammer:
      return "random_spammer";
  }
  return "unknown";
}

WorkerArchetype WorkerArchetype::graded(int num_labels, double diagonal, double rate,
                                        double negative_rate) {
  if (num_labels < 2) throw DomainError("archetype needs at least two labels");
  if (!(diagonal >= 0.4 && diagonal <= 1.0)) {
    throw DomainError("graded diagonal must lie in [0.4, 1]");
  }
  check_rates(rate, negative_rate);
  WorkerArchetype w;
  w.kind = diagonal >= 0.9   ? WorkerKind::kReliable
           : diagonal >= 0.7 ? WorkerKind::kNormal
                             : WorkerKind::kSloppy;
  w.confusion = graded_confusion(num_labels, diagonal);
  w.annotation_rate = rate;
  w.negative_rate = negative_rate;
  return w;
}

WorkerArchetype WorkerArchetype::uniform_spammer(int num_labels, int column, double rate,
                                                 double negative_rate) {
  if (num_labels < 2) throw DomainError("archetype needs at least two labels");
  if (column < 0 || column >= num_labels) throw DomainError("spam column out of range");
  check_rates(rate, negative_rate);
  WorkerArchetype w;
  w.kind = WorkerKind::kUniformSpammer;
  w.confusion = Matrix::Zero(num_labels, num_labels);
  w.confusion.col(column).setOnes();
  w.annotation_rate = rate;
  w.negative_rate = negative_rate;
  return w;
}

WorkerArchetype WorkerArchetype::random_spammer(int num_labels, double rate,
                                                double negative_rate) {
  if (num_labels < 2) throw DomainError("archetype needs at least two labels");
  check_rates(rate, negative_rate);
  WorkerArchetype w;
  w.kind = WorkerKind::kRandomSpammer;
  w.confusion = Matrix::Constant(num_labels, num_labels, 1.0 / num_labels);
  w.annotation_rate = rate;
  w.negative_rate = negative_rate;
  return w;
}

WorkerArchetype WorkerArchetype::noiseless(int num_labels) {
  WorkerArchetype w = graded(num_labels, 1.0, 1.0, 0.0);
  return w;
}

void WorkerArchetype::validate() const {
  const Eigen::Index n = confusion.rows();
  if (n < 2 || confusion.cols() != n) throw DomainError("confusion must be L x L");
  if ((confusion.array() < 0.0).any()) throw DomainError("negative confusion entry");
  if (((confusion.rowwise().sum().array() - 1.0).abs() > 1e-10).any()) {
    throw DomainError("confusion rows must sum to 1");
  }
  check_rates(annotation_rate, negative_rate);
  const double lo = confusion.diagonal().minCoeff();
  switch (kind) {
    case WorkerKind::kReliable:
      if (lo < 0.9) throw DomainError("reliable worker needs diagonal >= 0.9");
      break;
    case WorkerKind::kNormal:
      if (lo < 0.7 || confusion.diagonal().maxCoeff() >= 0.9) {
        throw DomainError("normal worker needs diagonal in [0.7, 0.9)");
      }
      break;
    case WorkerKind::kSloppy:
      if (lo < 0.4 || confusion.diagonal().maxCoeff() >= 0.7) {
        throw DomainError("sloppy worker needs diagonal in [0.4, 0.7)");
      }
      break;
    case WorkerKind::kUniformSpammer: {
      int full = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if ((confusion.col(c).array() == 1.0).all()) ++full;
      }
      if (full != 1) throw DomainError("uniform spammer must put all mass on one column");
      break;
    }
    case WorkerKind::kRandomSpammer:
      if (((confusion.array() - 1.0 / n).abs() > 1e-12).any()) {
        throw DomainError("random spammer rows must be uniform");
      }
      break;
  }
}

Dataset generate_ground_truth(int num_samples, int num_labels, double cardinality,
                              double correlation_strength, std::uint64_t seed,
                              const GroundTruthOptions& options) {
  if (num_samples < 1) throw DomainError("need at least one sample");
  if (num_labels < 2) throw DomainError("need at least two labels");
  if (!(cardinality >= 1.0 && cardinality < num_labels)) {
    throw DomainError("cardinality must lie in [1, L)");
  }
  if (!(correlation_strength >= 0.0 && correlation_strength <= 1.0)) {
    throw DomainError("correlation strength must lie in [0, 1]");
  }
  std::mt19937_64 rng = seeded_rng({seed, kTagTruth});
  std::uniform_int_distribution<int> first(0, num_labels - 1);
  std::binomial_distribution<int> extras(num_labels - 1,
                                         (cardinality - 1.0) / (num_labels - 1.0));

  LabelMatrix y = LabelMatrix::Zero(num_samples, num_labels);
  std::vector<double> weights(num_labels);
  for (int i = 0; i < num_samples; ++i) {
    y(i, first(rng)) = 1;
    const int count = extras(rng);
    for (int k = 0; k < count; ++k) {
      for (int l = 0; l < num_labels; ++l) {
        if (y(i, l) == 1) {
          weights[l] = 0.0;
          continue;
        }
        const int prev = (l + num_labels - 1) % num_labels;
        const int next = (l + 1) % num_labels;
        const double ring = (y(i, prev) == 1 || y(i, next) == 1) ? 1.0 : 0.0;
        weights[l] = (1.0 - correlation_strength) + correlation_strength * ring;
      }
      if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0.0) {
        // Only ring-distant labels remain at full correlation strength.
        for (int l = 0; l < num_labels; ++l) weights[l] = y(i, l) == 1 ? 0.0 : 1.0;
      }
      std::discrete_distribution<int> pick(weights.begin(), weights.end());
      y(i, pick(rng)) = 1;
    }
  }

  std::optional<Matrix> features;
  if (options.with_features) {
    if (options.feature_dim < 1) throw DomainError("feature_dim must be positive");
    std::mt19937_64 frng = seeded_rng({seed, kTagFeatures});
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix centroids(num_labels, options.feature_dim);
    for (Eigen::Index k = 0; k < centroids.size(); ++k) {
      centroids.data()[k] = options.feature_separation * normal(frng);
    }
    Matrix x(num_samples, options.feature_dim);
    for (int i = 0; i < num_samples; ++i) {
      Vector mean = Vector::Zero(options.feature_dim);
      int size = 0;
      for (int l = 0; l < num_labels; ++l) {
        if (y(i, l) == 1) {
          mean += centroids.row(l).transpose();
          ++size;
        }
      }
      mean /= size;
      for (int f = 0; f < options.feature_dim; ++f) {
        x(i, f) = mean[f] + options.feature_noise * normal(frng);
      }
    }
    features = std::move(x);
  }
  return Dataset(num_samples, num_labels, std::move(features), std::move(y));
}

std::vector<Partition> random_partition(int num_samples, double labeled_fraction,
                                        double unlabeled_fraction, std::uint64_t seed) {
  if (!(labeled_fraction > 0.0 && unlabeled_fraction >= 0.0 &&
        labeled_fraction + unlabeled_fraction <= 1.0)) {
    throw DomainError("partition fractions must be positive and sum to at most 1");
  }
  std::vector<int> order(num_samples);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng = seeded_rng({seed, kTagPartition});
  std::shuffle(order.begin(), order.end(), rng);
  const int labeled =
      std::max(1, static_cast<int>(std::lround(labeled_fraction * num_samples)));
  const int unlabeled = std::min(
      num_samples - labeled, static_cast<int>(std::lround(unlabeled_fraction * num_samples)));
  std::vector<Partition> out(num_samples, Partition::kTest);
  for (int k = 0; k < num_samples; ++k) {
    if (k < labeled) {
      out[order[k]] = Partition::kLabeled;
    } else if (k < labeled + unlabeled) {
      out[order[k]] = Partition::kUnlabeled;
    }
  }
  return out;
}

AnnotationTensor annotate(const Dataset& dataset, std::span<const WorkerArchetype> workers,
                          std::uint64_t seed) {
  if (!dataset.has_truth()) throw PreconditionError("annotate needs a dataset with truth");
  if (workers.empty()) throw DomainError("annotate needs at least one worker");
  const int n = dataset.num_samples();
  const int num_labels = dataset.num_labels();
  const std::vector<LabelSet> truth = dataset.truth_sets();

  std::vector<Matrix> matrices;
  matrices.reserve(workers.size());
  for (std::size_t w = 0; w < workers.size(); ++w) {
    const WorkerArchetype& worker = workers[w];
    if (worker.confusion.rows() != num_labels) {
      throw DimensionError("archetype " + std::to_string(w) + " has the wrong label count");
    }
    worker.validate();
    std::mt19937_64 rng = seeded_rng({seed, kTagAnnotate, static_cast<std::uint64_t>(w)});
    Matrix a = Matrix::Zero(n, num_labels);
    annotate_worker(dataset, truth, worker, rng, a);
    if ((a.array() == 0.0).all()) annotate_worker(dataset, truth, worker, rng, a);
    if ((a.array() == 0.0).all()) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      const int i = pick(rng);
      a(i, draw_label(worker.confusion, truth[i].front(), rng)) = 1.0;
    }
    matrices.push_back(std::move(a));
  }
  return AnnotationTensor(std::move(matrices));
}

AnnotationTensor sparsify(const AnnotationTensor& tensor, double remove_fraction,
                          std::uint64_t seed) {
  if (!(remove_fraction >= 0.0 && remove_fraction < 1.0)) {
    throw DomainError("remove fraction must lie in [0, 1)");
  }
  std::vector<Matrix> matrices = tensor.matrices();
  for (int w = 0; w < tensor.num_workers(); ++w) {
    Matrix& a = matrices[w];
    std::vector<std::pair<int, int>> entries;
    for (int i = 0; i < a.rows(); ++i) {
      for (int l = 0; l < a.cols(); ++l) {
        if (a(i, l) != 0.0) entries.emplace_back(i, l);
      }
    }
    const long total = static_cast<long>(entries.size());
    long remove = static_cast<long>(std::floor(remove_fraction * static_cast<double>(total)));
    remove = std::min(remove, total - 1);
    std::mt19937_64 rng = seeded_rng({seed, kTagSparsify, static_cast<std::uint64_t>(w)});
    std::shuffle(entries.begin(), entries.end(), rng);
    for (long k = 0; k < remove; ++k) a(entries[k].first, entries[k].second) = 0.0;
  }
  return AnnotationTensor(std::move(matrices));
}

SimulatedCrowd simulate_crowd(const CrowdOptions& options,
                              std::vector<WorkerArchetype> archetypes, std::uint64_t seed) {
  Dataset truth = generate_ground_truth(options.num_samples, options.num_labels,
                                        options.cardinality, options.correlation_strength,
                                        seed, options.truth);
  Dataset dataset = truth.with_partition(random_partition(
      options.num_samples, options.labeled_fraction, options.unlabeled_fraction, seed));
  AnnotationTensor tensor = annotate(dataset, archetypes, seed);
  return SimulatedCrowd{std::move(dataset), std::move(tensor), std::move(archetypes), seed};
}

std::vector<WorkerArchetype> graded_with_spammers(int num_labels) {
  std::vector<WorkerArchetype> out;
  constexpr int kGraded = 7;
  for (int k = 0; k < kGraded; ++k) {
    const double diagonal = 0.95 - 0.5 * k / (kGraded - 1);
    out.push_back(WorkerArchetype::graded(num_labels, diagonal, 0.8));
  }
  for (int k = 0; k < 3; ++k) {
    out.push_back(WorkerArchetype::uniform_spammer(num_labels, k % num_labels, 1.0));
  }
  for (int k = 0; k < 3; ++k) out.push_back(WorkerArchetype::random_spammer(num_labels, 1.0));
  return out;
}

std::vector<WorkerArchetype> archetype_groups(int num_labels, int per_group) {
  if (per_group < 1) throw DomainError("per_group must be positive");
  std::vector<WorkerArchetype> out;
  for (double diagonal : {0.95, 0.75, 0.5}) {
    for (int k = 0; k < per_group; ++k) {
      out.push_back(WorkerArchetype::graded(num_labels, diagonal, 0.8));
    }
  }
  for (int k = 0; k < per_group; ++k) {
    out.push_back(WorkerArchetype::random_spammer(num_labels, 1.0));
  }
  return out;
}

std::vector<WorkerArchetype> noiseless_crowd(int num_labels, int num_workers) {
  return std::vector<WorkerArchetype>(num_workers, WorkerArchetype::noiseless(num_labels));
}

SimulatedOracle::SimulatedOracle(const SimulatedCrowd& crowd, std::uint64_t seed)
    : crowd_(crowd), seed_(seed) {
  if (!crowd_.dataset.has_truth()) throw PreconditionError("oracle needs truth");
}

double SimulatedOracle::positive_probability(int sample, int label, int worker) const {
  if (sample < 0 || sample >= crowd_.dataset.num_samples() || label < 0 ||
      label >= crowd_.dataset.num_labels() || worker < 0 ||
      worker >= static_cast<int>(crowd_.archetypes.size())) {
    throw DimensionError("oracle query out of range");
  }
  const LabelSet truth = crowd_.dataset.truth_set(sample);
  const Matrix& confusion = crowd_.archetypes[worker].confusion;
  // Each true label emits independently, as in annotate().
  double miss = 1.0;
  for (int g : truth) miss *= 1.0 - confusion(g, label);
  return 1.0 - miss;
}

int SimulatedOracle::answer(int sample, int label, int worker) {
  const double p = positive_probability(sample, label, worker);
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = std::make_tuple(sample, label, worker);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::mt19937_64 rng =
      seeded_rng({seed_, kTagOracle, static_cast<std::uint64_t>(sample),
                  static_cast<std::uint64_t>(label), static_cast<std::uint64_t>(worker)});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int value = unit(rng) < p ? 1 : -1;
  cache_.emplace(key, value);
  return value;
}

std::size_t SimulatedOracle::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

}  // namespace amcc
