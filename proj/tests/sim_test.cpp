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

#include <numeric>

#include "amcc/error.hpp"
#include "amcc/sim.hpp"

namespace amcc {
namespace {

GroundTruthOptions no_features() {
  GroundTruthOptions o;
  o.with_features = false;
  return o;
}

// Pearson statistic of the pair co-occurrence counts against a uniform
// spread over all pairs.
double pair_homogeneity_chi2(const Dataset& d) {
  const int l = d.num_labels();
  const LabelMatrix& y = *d.true_labels();
  std::vector<double> counts;
  for (int a = 0; a < l; ++a) {
    for (int b = a + 1; b < l; ++b) {
      double c = 0.0;
      for (int i = 0; i < d.num_samples(); ++i) c += (y(i, a) && y(i, b)) ? 1.0 : 0.0;
      counts.push_back(c);
    }
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - mean) * (c - mean) / mean;
  return chi2;
}

TEST(GroundTruth, ZeroCorrelationSpreadsPairsEvenly) {
  const Dataset d = generate_ground_truth(10000, 6, 1.87, 0.0, 5, no_features());
  // 15 pairs, 14 degrees of freedom; 36.12 is the 0.999 quantile.
  EXPECT_LT(pair_homogeneity_chi2(d), 36.12);
  const Dataset corr = generate_ground_truth(10000, 6, 1.87, 1.0, 5, no_features());
  EXPECT_GT(pair_homogeneity_chi2(corr), 36.12);
}

TEST(GroundTruth, UnitCardinalityGivesSingletons) {
  const Dataset d = generate_ground_truth(500, 6, 1.0, 0.5, 2, no_features());
  for (const LabelSet& s : d.truth_sets()) EXPECT_EQ(s.size(), 1u);
}

TEST(GroundTruth, MeanCardinalityMatchesTarget) {
  const Dataset d = generate_ground_truth(10000, 6, 1.87, 0.5, 9, no_features());
  double total = 0.0;
  for (const LabelSet& s : d.truth_sets()) total += static_cast<double>(s.size());
  EXPECT_NEAR(total / 10000.0, 1.87, 0.1);
}

TEST(GroundTruth, FeaturesAndErrors) {
  const Dataset d = generate_ground_truth(50, 4, 1.5, 0.5, 1);
  ASSERT_TRUE(d.has_features());
  EXPECT_EQ(d.features()->rows(), 50);
  EXPECT_EQ(d.features()->cols(), GroundTruthOptions{}.feature_dim);
  EXPECT_THROW(generate_ground_truth(10, 4, 4.0, 0.5, 1), DomainError);
  EXPECT_THROW(generate_ground_truth(10, 4, 0.5, 0.5, 1), DomainError);
}

TEST(RandomPartition, FractionsAndDeterminism) {
  const std::vector<Partition> p = random_partition(200, 0.05, 0.70, 3);
  EXPECT_EQ(std::count(p.begin(), p.end(), Partition::kLabeled), 10);
  EXPECT_EQ(std::count(p.begin(), p.end(), Partition::kUnlabeled), 140);
  EXPECT_EQ(std::count(p.begin(), p.end(), Partition::kTest), 50);
  EXPECT_EQ(p, random_partition(200, 0.05, 0.70, 3));
  const std::vector<Partition> tiny = random_partition(5, 0.01, 0.5, 1);
  EXPECT_GE(std::count(tiny.begin(), tiny.end(), Partition::kLabeled), 1);
}

TEST(WorkerArchetype, KindsFollowDiagonal) {
  EXPECT_EQ(WorkerArchetype::graded(6, 0.95, 1.0).kind, WorkerKind::kReliable);
  EXPECT_EQ(WorkerArchetype::graded(6, 0.8, 1.0).kind, WorkerKind::kNormal);
  EXPECT_EQ(WorkerArchetype::graded(6, 0.5, 1.0).kind, WorkerKind::kSloppy);
  for (const WorkerArchetype& a : graded_with_spammers(6)) {
    EXPECT_NO_THROW(a.validate());
    EXPECT_LT((a.confusion.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
  }
  WorkerArchetype broken = WorkerArchetype::graded(6, 0.95, 1.0);
  broken.kind = WorkerKind::kSloppy;
  EXPECT_THROW(broken.validate(), DomainError);
}

TEST(WorkerArchetype, PresetComposition) {
  const auto crowd = graded_with_spammers(6);
  ASSERT_EQ(crowd.size(), 13u);
  int uniform = 0, random = 0;
  for (const auto& a : crowd) {
    uniform += a.kind == WorkerKind::kUniformSpammer;
    random += a.kind == WorkerKind::kRandomSpammer;
  }
  EXPECT_EQ(uniform, 3);
  EXPECT_EQ(random, 3);
  EXPECT_NEAR(crowd[0].confusion(0, 0), 0.95, 1e-12);
  EXPECT_NEAR(crowd[6].confusion(0, 0), 0.45, 1e-12);
  const auto groups = archetype_groups(6);
  ASSERT_EQ(groups.size(), 12u);
  EXPECT_TRUE(groups[9].is_spammer());
  EXPECT_FALSE(groups[8].is_spammer());
}

TEST(Annotate, NoiselessChannelReproducesTruth) {
  const Dataset d = generate_ground_truth(100, 5, 2.0, 0.5, 4, no_features());
  const std::vector<WorkerArchetype> w{WorkerArchetype::noiseless(5)};
  const AnnotationTensor t = annotate(d, w, 8);
  const LabelMatrix& y = *d.true_labels();
  for (int i = 0; i < 100; ++i) {
    for (int l = 0; l < 5; ++l) EXPECT_EQ(t.at(0, i, l) == 1.0, y(i, l) == 1);
  }
}

TEST(Annotate, UniformSpammerHitsOneColumn) {
  const Dataset d = generate_ground_truth(200, 6, 1.87, 0.5, 4, no_features());
  const std::vector<WorkerArchetype> w{WorkerArchetype::uniform_spammer(6, 2, 0.7)};
  const AnnotationTensor t = annotate(d, w, 1);
  for (int i = 0; i < 200; ++i) {
    for (int l = 0; l < 6; ++l) {
      if (l != 2) {
        EXPECT_NE(t.at(0, i, l), 1.0);
      }
    }
  }
  EXPECT_GT(t.nnz(0), 0);
}

TEST(Annotate, GradedAgreementMatchesDiagonal) {
  const Dataset d = generate_ground_truth(10000, 6, 1.0, 0.5, 6, no_features());
  const std::vector<WorkerArchetype> w{WorkerArchetype::graded(6, 0.9, 1.0, 0.0)};
  const AnnotationTensor t = annotate(d, w, 2);
  int agree = 0;
  for (int i = 0; i < 10000; ++i) agree += t.at(0, i, d.truth_set(i)[0]) == 1.0;
  EXPECT_NEAR(agree / 10000.0, 0.9, 0.02);
}

TEST(Annotate, SparseWorkersStillAnnotate) {
  const Dataset d = generate_ground_truth(3, 4, 1.0, 0.5, 1, no_features());
  std::vector<WorkerArchetype> w(20, WorkerArchetype::graded(4, 0.9, 1e-6, 0.0));
  const AnnotationTensor t = annotate(d, w, 3);
  for (int k = 0; k < 20; ++k) EXPECT_GE(t.nnz(k), 1);
}

TEST(Annotate, DeterministicPerSeed) {
  CrowdOptions o;
  o.num_samples = 50;
  const SimulatedCrowd a = simulate_crowd(o, graded_with_spammers(6), 12);
  const SimulatedCrowd b = simulate_crowd(o, graded_with_spammers(6), 12);
  const SimulatedCrowd c = simulate_crowd(o, graded_with_spammers(6), 13);
  EXPECT_EQ(a.tensor, b.tensor);
  EXPECT_EQ(*a.dataset.true_labels(), *b.dataset.true_labels());
  EXPECT_EQ(*a.dataset.features(), *b.dataset.features());
  EXPECT_EQ(a.dataset.partition(), b.dataset.partition());
  EXPECT_FALSE(a.tensor == c.tensor);
}

TEST(Sparsify, FloorCountsNestingAndFloor) {
  CrowdOptions o;
  o.num_samples = 60;
  const SimulatedCrowd crowd = simulate_crowd(o, graded_with_spammers(6), 4);
  EXPECT_EQ(sparsify(crowd.tensor, 0.0, 1), crowd.tensor);
  const AnnotationTensor light = sparsify(crowd.tensor, 0.1, 7);
  const AnnotationTensor heavy = sparsify(crowd.tensor, 0.5, 7);
  for (int w = 0; w < crowd.tensor.num_workers(); ++w) {
    const long n = crowd.tensor.nnz(w);
    EXPECT_EQ(heavy.nnz(w), std::max(1L, n - static_cast<long>(std::floor(0.5 * n))));
    const Matrix& h = heavy.worker(w);
    const Matrix& l = light.worker(w);
    for (int i = 0; i < h.rows(); ++i) {
      for (int k = 0; k < h.cols(); ++k) {
        if (h(i, k) != 0.0) {
          EXPECT_EQ(l(i, k), h(i, k));
          EXPECT_EQ(crowd.tensor.at(w, i, k), h(i, k));
        }
      }
    }
  }
  EXPECT_EQ(sparsify(crowd.tensor, 0.3, 7), sparsify(crowd.tensor, 0.3, 7));
  EXPECT_THROW(sparsify(crowd.tensor, 1.0, 7), DomainError);
}

TEST(Sparsify, TenAnnotationsHalved) {
  Matrix a = Matrix::Zero(10, 2);
  a.col(0).setOnes();
  const AnnotationTensor t({a});
  EXPECT_EQ(sparsify(t, 0.5, 3).nnz(0), 5);
  Matrix one = Matrix::Zero(2, 2);
  one(0, 0) = 1;
  EXPECT_EQ(sparsify(AnnotationTensor({one}), 0.99, 3).nnz(0), 1);
}

TEST(SimulatedOracle, NoiselessAnswersFollowTruth) {
  CrowdOptions o;
  o.num_samples = 30;
  const SimulatedCrowd crowd = simulate_crowd(o, noiseless_crowd(6, 2), 1);
  SimulatedOracle oracle(crowd, 5);
  for (int i = 0; i < 30; ++i) {
    const LabelSet truth = crowd.dataset.truth_set(i);
    for (int l = 0; l < 6; ++l) {
      const bool relevant = std::find(truth.begin(), truth.end(), l) != truth.end();
      EXPECT_EQ(oracle.answer(i, l, 1), relevant ? 1 : -1);
    }
  }
}

TEST(SimulatedOracle, PositiveRateMatchesDiagonal) {
  CrowdOptions o;
  o.num_samples = 10000;
  o.cardinality = 1.0;
  o.truth.with_features = false;
  const SimulatedCrowd crowd =
      simulate_crowd(o, {WorkerArchetype::graded(6, 0.8, 0.01, 0.0)}, 2);
  SimulatedOracle oracle(crowd, 3);
  int positive = 0;
  for (int i = 0; i < 10000; ++i) {
    positive += oracle.answer(i, crowd.dataset.truth_set(i)[0], 0) == 1;
  }
  EXPECT_NEAR(positive / 10000.0, 0.8, 0.02);
  EXPECT_DOUBLE_EQ(oracle.positive_probability(0, crowd.dataset.truth_set(0)[0], 0), 0.8);
}

TEST(SimulatedOracle, MultiLabelSamplesUseAnyEmission) {
  CrowdOptions o;
  o.num_samples = 200;
  o.cardinality = 3.0;
  o.truth.with_features = false;
  const WorkerArchetype w = WorkerArchetype::graded(6, 0.8, 1.0);
  const SimulatedCrowd crowd = simulate_crowd(o, {w}, 4);
  SimulatedOracle oracle(crowd, 1);
  for (int i = 0; i < 200; ++i) {
    const LabelSet truth = crowd.dataset.truth_set(i);
    for (int l = 0; l < 6; ++l) {
      double miss = 1.0;
      for (int g : truth) miss *= 1.0 - w.confusion(g, l);
      EXPECT_NEAR(oracle.positive_probability(i, l, 0), 1.0 - miss, 1e-15);
    }
  }
}

TEST(SimulatedOracle, MemoizedAndReplayable) {
  CrowdOptions o;
  o.num_samples = 40;
  const SimulatedCrowd crowd = simulate_crowd(o, graded_with_spammers(6), 6);
  SimulatedOracle first(crowd, 9);
  SimulatedOracle second(crowd, 9);
  std::vector<int> a, b, again;
  for (int q = 0; q < 200; ++q) a.push_back(first.answer(q % 40, q % 6, q % 13));
  // Reversed query order must not change any answer.
  for (int q = 199; q >= 0; --q) b.push_back(second.answer(q % 40, q % 6, q % 13));
  std::reverse(b.begin(), b.end());
  for (int q = 0; q < 200; ++q) again.push_back(first.answer(q % 40, q % 6, q % 13));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, again);
  EXPECT_LE(first.cache_size(), 200u);
}

}  // namespace
}  // namespace amcc
