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

// Cost-aware selection of (sample, label, worker) queries and the
// fit / select / query / refit loop.
//
// A pair (i, l) is scored by an integrative uncertainty u blending the
// decision-boundary uncertainty of its consensus probability with the mean
// absolute integrated label correlation to the sample's other unqueried
// labels. A worker is scored by credibility q over the sample's nearest
// labeled neighbours and by a cost c affine in its estimated quality. The
// selected triplets maximize u * q / c.

#ifndef AMCC_ACTIVE_HPP_
#define AMCC_ACTIVE_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amcc/consensus.hpp"
#include "amcc/metrics.hpp"
#include "amcc/oracle.hpp"
#include "amcc/types.hpp"

namespace amcc {

// 1 - |1/2 - p|.
double label_uncertainty(double p);

// (1/M) sum_m lambda_m^r C_m.
Matrix integrated_correlation(const ConsensusModel& model, double r);

// Mean of |cbar(label, k)| over the unqueried labels k (label included); 0
// when `label` is the only unqueried label.
double correlation_gain(const Matrix& cbar, int label, std::span<const int> unqueried);

struct Neighbor {
  int sample;
  double similarity;
};

// Up to k nearest samples of the labeled pool (the sample itself excluded;
// the whole non-test pool when nothing else is labeled). With features the
// similarity is 1 / max(distance, 1e-6); without features it is the
// non-negative cosine between worker-averaged annotation rows.
std::vector<Neighbor> labeled_neighbors(const Dataset& dataset, const AnnotationTensor& tensor,
                                        int sample, int k);

// (1/|nbrs|) sum_j S_j P_w(j), where log P_w(j) sums
// log max(C_m(g, l) + D_w(g, l), floor) over the neighbour's consensus labels
// g and the worker's positive annotations l on it.
double worker_credibility(int worker, std::span<const Neighbor> neighbors,
                          const AnnotationTensor& tensor, const ConsensusModel& model,
                          std::span<const LabelSet> consensus, double prob_floor);

// Mean over annotated samples of prod_{l positive} D_w(l, l).
Vector worker_qualities(const AnnotationTensor& tensor, const ConsensusModel& model);

// 1 + (W - 1)(q - q_min) / (q_max - q_min); all ones when q_max = q_min.
Vector costs_from_qualities(const Vector& qualities);
Vector worker_costs(const AnnotationTensor& tensor, const ConsensusModel& model);

struct TripletScore {
  int sample = 0;
  int label = 0;
  int worker = 0;
  double u1 = 0.0;
  double u2 = 0.0;
  double u = 0.0;
  double q = 0.0;
  double c = 1.0;
  double combined = 0.0;

  bool operator==(const TripletScore&) const = default;
};

using PairSet = std::set<std::pair<int, int>>;  // (sample, label)

struct SelectionOptions {
  // Weight of the correlation gain; the config's eta when unset.
  std::optional<double> eta;
};

struct SelectionResult {
  std::vector<TripletScore> triplets;
  bool pool_exhausted = false;  // fewer candidates than requested
};

// Every unqueried pair of the labeled and unlabeled pool that some worker
// has not annotated yet is a candidate; its worker maximizes q / c (ties to
// the lowest index). Returns the top `batch` by u * q / c, ordered by score
// then sample, label and worker.
SelectionResult select_triplets(const Dataset& dataset, const AnnotationTensor& tensor,
                                const ConsensusModel& model, const AmccConfig& cfg,
                                const PairSet& queried, int batch,
                                const SelectionOptions& options = {});

enum class Strategy : std::uint8_t {
  kAmcc,
  kRandomWorker,    // pairs by u, worker uniformly at random
  kRandomPair,      // pairs uniformly at random, worker by q / c
  kNoLabelCorr,     // eta = 0
  kMvRandom,        // random pairs and workers, majority-vote consensus
  kGreedyReliable,  // pairs by u, the highest-quality eligible worker
};

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

struct LedgerRound {
  int round = 0;
  std::vector<TripletScore> triplets;
  std::vector<int> answers;
  int queries = 0;  // cumulative
  double round_cost = 0.0;
  double cumulative_cost = 0.0;
  std::optional<EvalReport> snapshot;

  bool operator==(const LedgerRound&) const = default;
};

struct QueryLedger {
  std::string strategy;
  LedgerRound initial;  // round 0: the first fit, no queries
  std::vector<LedgerRound> rounds;
  bool pool_exhausted = false;
  std::optional<std::string> error;  // set when the oracle failed mid-round

  bool operator==(const QueryLedger&) const = default;
};

struct ActiveResult {
  QueryLedger ledger;
  AnnotationTensor tensor;
  FitResult fit;
};

// Fits, then for each round selects a batch, queries the oracle, writes the
// answers into the tensor, moves the queried samples into the labeled pool
// and refits warm. Accuracy snapshots cover the labeled and unlabeled pool
// when the dataset carries truth.
ActiveResult run_active_loop(const Dataset& dataset, const AnnotationTensor& tensor,
                             AnnotationOracle& oracle, const AmccConfig& cfg, int rounds,
                             Strategy strategy, std::uint64_t seed);

}  // namespace amcc

#endif  // AMCC_ACTIVE_HPP_
