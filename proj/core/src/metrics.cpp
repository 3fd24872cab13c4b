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

#include "amcc/metrics.hpp"

#include <algorithm>
#include <string>

#include "amcc/error.hpp"

namespace amcc {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": " + std::to_string(a) + " vs " +
                         std::to_string(b) + " samples");
  }
}

std::vector<char> relevance(const LabelSet& truth, int num_labels) {
  std::vector<char> out(num_labels, 0);
  for (int l : truth) {
    if (l < 0 || l >= num_labels) throw DimensionError("truth label out of range");
    out[l] = 1;
  }
  return out;
}

double jaccard(const LabelSet& a, const LabelSet& b) {
  LabelSet x = a;
  LabelSet y = b;
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::sort(y.begin(), y.end());
  y.erase(std::unique(y.begin(), y.end()), y.end());
  LabelSet inter;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(inter));
  const std::size_t uni = x.size() + y.size() - inter.size();
  return uni == 0 ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

}  // namespace

double set_accuracy(std::span<const LabelSet> predicted, std::span<const LabelSet> truth) {
  check_lengths(predicted.size(), truth.size(), "set_accuracy");
  if (truth.empty()) throw DimensionError("set_accuracy: no samples");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].empty()) throw DataError("set_accuracy: empty truth set");
    total += jaccard(predicted[i], truth[i]);
  }
  return total / static_cast<double>(truth.size());
}

RankingMetric ranking_loss(const Matrix& scores, std::span<const LabelSet> truth) {
  check_lengths(static_cast<std::size_t>(scores.rows()), truth.size(), "ranking_loss");
  const int num_labels = static_cast<int>(scores.cols());
  RankingMetric out;
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::vector<char> rel = relevance(truth[i], num_labels);
    const long pos = std::count(rel.begin(), rel.end(), 1);
    if (pos == 0 || pos == num_labels) {
      ++out.skipped;
      continue;
    }
    long violations = 0;
    for (int a = 0; a < num_labels; ++a) {
      if (!rel[a]) continue;
      for (int b = 0; b < num_labels; ++b) {
        if (!rel[b] && scores(i, b) >= scores(i, a)) ++violations;
      }
    }
    total += static_cast<double>(violations) / static_cast<double>(pos * (num_labels - pos));
    ++out.evaluated;
  }
  if (out.evaluated == 0) throw DomainError("ranking_loss: every sample was skipped");
  out.value = total / out.evaluated;
  return out;
}

RankingMetric one_error(const Matrix& scores, std::span<const LabelSet> truth) {
  check_lengths(static_cast<std::size_t>(scores.rows()), truth.size(), "one_error");
  const int num_labels = static_cast<int>(scores.cols());
  RankingMetric out;
  long misses = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::vector<char> rel = relevance(truth[i], num_labels);
    const long pos = std::count(rel.begin(), rel.end(), 1);
    if (pos == 0 || pos == num_labels) {
      ++out.skipped;
      continue;
    }
    int top = 0;
    for (int l = 1; l < num_labels; ++l) {
      if (scores(i, l) > scores(i, top)) top = l;
    }
    if (!rel[top]) ++misses;
    ++out.evaluated;
  }
  if (out.evaluated == 0) throw DomainError("one_error: every sample was skipped");
  out.value = static_cast<double>(misses) / out.evaluated;
  return out;
}

MajorityVote majority_vote(const AnnotationTensor& tensor) {
  const int n = tensor.num_samples();
  const int num_labels = tensor.num_labels();
  Matrix positive = Matrix::Zero(n, num_labels);
  Matrix votes = Matrix::Zero(n, num_labels);
  for (const Matrix& a : tensor.matrices()) {
    positive += (a.array() > 0.0).cast<double>().matrix();
    votes += (a.array() != 0.0).cast<double>().matrix();
  }
  MajorityVote out;
  out.scores = (votes.array() > 0.0)
                   .select(positive.array() / votes.array().max(1.0), 0.5)
                   .matrix();
  out.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < num_labels; ++l) {
      if (out.scores(i, l) > 0.5) out.labels[i].push_back(l);
    }
    if (out.labels[i].empty()) {
      Eigen::Index best = 0;
      out.scores.row(i).maxCoeff(&best);
      out.labels[i].push_back(static_cast<int>(best));
    }
  }
  return out;
}

EvalReport evaluate(std::span<const LabelSet> predicted, const Matrix& scores,
                    std::span<const LabelSet> truth, std::span<const int> samples) {
  check_lengths(predicted.size(), truth.size(), "evaluate");
  check_lengths(static_cast<std::size_t>(scores.rows()), truth.size(), "evaluate");
  std::vector<int> rows(samples.begin(), samples.end());
  if (rows.empty()) {
    rows.resize(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) rows[i] = static_cast<int>(i);
  }
  std::vector<LabelSet> pred_sub;
  std::vector<LabelSet> truth_sub;
  Matrix score_sub(static_cast<Eigen::Index>(rows.size()), scores.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int i = rows[k];
    if (i < 0 || i >= static_cast<int>(truth.size())) {
      throw DimensionError("evaluate: sample index out of range");
    }
    pred_sub.push_back(predicted[i]);
    truth_sub.push_back(truth[i]);
    score_sub.row(static_cast<Eigen::Index>(k)) = scores.row(i);
  }

  EvalReport report;
  report.num_samples = static_cast<int>(rows.size());
  report.accuracy = set_accuracy(pred_sub, truth_sub);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    report.per_sample_accuracy.push_back(jaccard(pred_sub[k], truth_sub[k]));
  }
  try {
    const RankingMetric rl = ranking_loss(score_sub, truth_sub);
    const RankingMetric oe = one_error(score_sub, truth_sub);
    report.one_minus_rl = 1.0 - rl.value;
    report.one_minus_oe = 1.0 - oe.value;
    report.ranking_skipped = rl.skipped;
  } catch (const DomainError&) {
    report.one_minus_rl = 1.0;
    report.one_minus_oe = 1.0;
    report.ranking_skipped = report.num_samples;
  }
  return report;
}

}  // namespace amcc
