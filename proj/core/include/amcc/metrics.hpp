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

// Multi-label evaluation metrics and the majority-vote baseline.

#ifndef AMCC_METRICS_HPP_
#define AMCC_METRICS_HPP_

#include <span>
#include <vector>

#include "amcc/types.hpp"

namespace amcc {

// Mean per-sample Jaccard overlap |T n T*| / |T u T*|. Truth sets must be
// non-empty.
double set_accuracy(std::span<const LabelSet> predicted, std::span<const LabelSet> truth);

struct RankingMetric {
  double value = 0.0;
  int evaluated = 0;
  int skipped = 0;  // samples with no relevant or no irrelevant label
};

// Fraction of (relevant, irrelevant) pairs with score(irrelevant) >=
// score(relevant), averaged over samples. Throws DomainError when every
// sample is skipped.
RankingMetric ranking_loss(const Matrix& scores, std::span<const LabelSet> truth);

// Fraction of samples whose top-scoring label (ties to the lowest index) is
// irrelevant. Skips the same samples as ranking_loss.
RankingMetric one_error(const Matrix& scores, std::span<const LabelSet> truth);

struct MajorityVote {
  std::vector<LabelSet> labels;
  Matrix scores;  // share of +1 among the +/-1 votes, 0.5 without votes
};

// Labels with a strict majority of positive votes; argmax when none.
MajorityVote majority_vote(const AnnotationTensor& tensor);

struct EvalReport {
  double accuracy = 0.0;
  double one_minus_rl = 0.0;
  double one_minus_oe = 0.0;
  int num_samples = 0;
  int ranking_skipped = 0;
  std::vector<double> per_sample_accuracy;

  bool operator==(const EvalReport&) const = default;
};

// All three metrics over the given samples (all samples when `samples` is
// empty). When no sample has an irrelevant label the ranking metrics are
// reported as 1.
EvalReport evaluate(std::span<const LabelSet> predicted, const Matrix& scores,
                    std::span<const LabelSet> truth, std::span<const int> samples = {});

}  // namespace amcc

#endif  // AMCC_METRICS_HPP_
