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

#include "amcc/active.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "amcc/error.hpp"
#include "amcc/rng.hpp"

namespace amcc {
namespace {

constexpr double kDistanceFloor = 1e-6;

enum : std::uint64_t { kTagFit = 11, kTagSelect = 12 };

struct Candidate {
  int sample;
  int label;
  double u1;
  double u2;
  double u;
  std::vector<int> workers;  // eligible: have not annotated (sample, label)
};

// Everything selection needs from one model snapshot.
class SelectionContext {
 public:
  SelectionContext(const Dataset& dataset, const AnnotationTensor& tensor,
                   const ConsensusModel& model, const AmccConfig& cfg,
                   const AnnotationOracle* oracle = nullptr)
      : dataset_(dataset),
        tensor_(tensor),
        model_(model),
        cfg_(cfg),
        consensus_(consensus_all(tensor, model, cfg)),
        cbar_(integrated_correlation(model, cfg.r)),
        qualities_(worker_qualities(tensor, model)),
        costs_(costs_from_qualities(qualities_)),
        credibility_(dataset.num_samples()),
        oracle_(oracle) {}

  const Vector& costs() const { return costs_; }
  const Vector& qualities() const { return qualities_; }

  std::vector<Candidate> candidates(const PairSet& queried, double eta) const {
    std::vector<Candidate> out;
    const int num_labels = tensor_.num_labels();
    for (int i = 0; i < dataset_.num_samples(); ++i) {
      if (dataset_.partition()[i] == Partition::kTest) continue;
      std::vector<int> unqueried;
      for (int l = 0; l < num_labels; ++l) {
        if (!queried.count({i, l})) unqueried.push_back(l);
      }
      for (int l : unqueried) {
        Candidate c{i, l, 0.0, 0.0, 0.0, {}};
        for (int w = 0; w < tensor_.num_workers(); ++w) {
          if (tensor_.at(w, i, l) == 0.0 && (!oracle_ || oracle_->can_answer(i, l, w))) {
            c.workers.push_back(w);
          }
        }
        if (c.workers.empty()) continue;
        const double p = std::clamp(consensus_.scores(i, l), 0.0, 1.0);
        c.u1 = label_uncertainty(p);
        c.u2 = correlation_gain(cbar_, l, unqueried);
        c.u = eta * c.u2 + (1.0 - eta) * c.u1;
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  double credibility(int sample, int worker) {
    std::optional<Vector>& cached = credibility_[sample];
    if (!cached) {
      const std::vector<Neighbor> nbrs =
          labeled_neighbors(dataset_, tensor_, sample, cfg_.knn_k);
      Vector q(tensor_.num_workers());
      for (int w = 0; w < tensor_.num_workers(); ++w) {
        q[w] = worker_credibility(w, nbrs, tensor_, model_, consensus_.labels,
                                  cfg_.prob_floor);
      }
      cached = std::move(q);
    }
    return (*cached)[worker];
  }

  TripletScore triplet(const Candidate& c, int worker) {
    TripletScore t;
    t.sample = c.sample;
    t.label = c.label;
    t.worker = worker;
    t.u1 = c.u1;
    t.u2 = c.u2;
    t.u = c.u;
    t.q = credibility(c.sample, worker);
    t.c = costs_[worker];
    t.combined = t.u * t.q / t.c;
    return t;
  }

  // Eligible worker with the largest q / c; ties to the lowest index.
  TripletScore best_ratio(const Candidate& c) {
    TripletScore best;
    double best_ratio = -1.0;
    for (int w : c.workers) {
      const double ratio = credibility(c.sample, w) / costs_[w];
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = triplet(c, w);
      }
    }
    return best;
  }

 private:
  const Dataset& dataset_;
  const AnnotationTensor& tensor_;
  const ConsensusModel& model_;
  const AmccConfig& cfg_;
  ConsensusResult consensus_;
  Matrix cbar_;
  Vector qualities_;
  Vector costs_;
  std::vector<std::optional<Vector>> credibility_;
  const AnnotationOracle* oracle_;
};

bool triplet_order(const TripletScore& a, const TripletScore& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  if (a.sample != b.sample) return a.sample < b.sample;
  if (a.label != b.label) return a.label < b.label;
  return a.worker < b.worker;
}

void sort_by_u(std::vector<Candidate>& cands) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.u > b.u;
  });
}

SelectionResult select_with_strategy(SelectionContext& ctx, const PairSet& queried, int batch,
                                     Strategy strategy, double eta, std::mt19937_64& rng) {
  if (batch < 1) throw DomainError("batch must be positive");
  const double used_eta = strategy == Strategy::kNoLabelCorr ? 0.0 : eta;
  std::vector<Candidate> cands = ctx.candidates(queried, used_eta);
  SelectionResult out;
  out.pool_exhausted = static_cast<int>(cands.size()) < batch;
  const std::size_t take = std::min<std::size_t>(batch, cands.size());

  auto random_worker = [&rng](const Candidate& c) {
    std::uniform_int_distribution<std::size_t> pick(0, c.workers.size() - 1);
    return c.workers[pick(rng)];
  };

  switch (strategy) {
    case Strategy::kAmcc:
    case Strategy::kNoLabelCorr: {
      std::vector<TripletScore> all;
      all.reserve(cands.size());
      for (const Candidate& c : cands) all.push_back(ctx.best_ratio(c));
      std::sort(all.begin(), all.end(), triplet_order);
      all.resize(take);
      out.triplets = std::move(all);
      break;
    }
    case Strategy::kRandomWorker:
      sort_by_u(cands);
      for (std::size_t k = 0; k < take; ++k) {
        out.triplets.push_back(ctx.triplet(cands[k], random_worker(cands[k])));
      }
      break;
    case Strategy::kGreedyReliable:
      sort_by_u(cands);
      for (std::size_t k = 0; k < take; ++k) {
        int best = cands[k].workers.front();
        for (int w : cands[k].workers) {
          if (ctx.qualities()[w] > ctx.qualities()[best]) best = w;
        }
        out.triplets.push_back(ctx.triplet(cands[k], best));
      }
      break;
    case Strategy::kRandomPair:
    case Strategy::kMvRandom:
      std::shuffle(cands.begin(), cands.end(), rng);
      for (std::size_t k = 0; k < take; ++k) {
        out.triplets.push_back(strategy == Strategy::kRandomPair
                                   ? ctx.best_ratio(cands[k])
                                   : ctx.triplet(cands[k], random_worker(cands[k])));
      }
      break;
  }
  return out;
}

std::optional<EvalReport> snapshot(const Dataset& dataset, const AnnotationTensor& tensor,
                                   const ConsensusModel& model, const AmccConfig& cfg,
                                   Strategy strategy) {
  if (!dataset.has_truth()) return std::nullopt;
  std::vector<int> pool;
  for (int i = 0; i < dataset.num_samples(); ++i) {
    if (dataset.partition()[i] != Partition::kTest) pool.push_back(i);
  }
  if (pool.empty()) return std::nullopt;
  const std::vector<LabelSet> truth = dataset.truth_sets();
  if (strategy == Strategy::kMvRandom) {
    const MajorityVote mv = majority_vote(tensor);
    return evaluate(mv.labels, mv.scores, truth, pool);
  }
  const ConsensusResult c = consensus_all(tensor, model, cfg);
  return evaluate(c.labels, c.scores, truth, pool);
}

}  // namespace

double label_uncertainty(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0, 1]");
  return 1.0 - std::abs(0.5 - p);
}

Matrix integrated_correlation(const ConsensusModel& model, double r) {
  if (model.num_groups() == 0) throw DimensionError("model has no groups");
  Matrix out = Matrix::Zero(model.commonality.front().rows(), model.commonality.front().cols());
  for (int m = 0; m < model.num_groups(); ++m) {
    out += std::pow(model.group_weights[m], r) * model.commonality[m];
  }
  return out / static_cast<double>(model.num_groups());
}

double correlation_gain(const Matrix& cbar, int label, std::span<const int> unqueried) {
  if (std::find(unqueried.begin(), unqueried.end(), label) == unqueried.end()) {
    throw PreconditionError("label " + std::to_string(label) + " was already queried");
  }
  if (unqueried.size() == 1) return 0.0;
  double total = 0.0;
  for (int k : unqueried) total += std::abs(cbar(label, k));
  return total / static_cast<double>(unqueried.size());
}

std::vector<Neighbor> labeled_neighbors(const Dataset& dataset, const AnnotationTensor& tensor,
                                        int sample, int k) {
  if (k < 1) throw DomainError("k must be positive");
  std::vector<int> pool;
  for (int j : dataset.samples_in(Partition::kLabeled)) {
    if (j != sample) pool.push_back(j);
  }
  if (pool.empty()) {
    for (int j = 0; j < dataset.num_samples(); ++j) {
      if (j != sample && dataset.partition()[j] != Partition::kTest) pool.push_back(j);
    }
  }

  std::vector<Neighbor> scored;
  scored.reserve(pool.size());
  if (dataset.has_features()) {
    const Matrix& x = *dataset.features();
    for (int j : pool) {
      const double dist = (x.row(sample) - x.row(j)).norm();
      scored.push_back({j, 1.0 / std::max(dist, kDistanceFloor)});
    }
  } else {
    Matrix mean = Matrix::Zero(tensor.num_samples(), tensor.num_labels());
    for (const Matrix& a : tensor.matrices()) mean += a;
    const double self_norm = mean.row(sample).norm();
    for (int j : pool) {
      const double norm = mean.row(j).norm();
      double cosine = 0.0;
      if (self_norm > 0.0 && norm > 0.0) {
        cosine = mean.row(sample).dot(mean.row(j)) / (self_norm * norm);
      }
      scored.push_back({j, std::max(cosine, 0.0)});
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.similarity > b.similarity;
  });
  if (static_cast<int>(scored.size()) > k) scored.resize(k);
  return scored;
}

double worker_credibility(int worker, std::span<const Neighbor> neighbors,
                          const AnnotationTensor& tensor, const ConsensusModel& model,
                          std::span<const LabelSet> consensus, double prob_floor) {
  if (neighbors.empty()) return 0.0;
  const int group = model.group_assignment.at(worker);
  const Matrix& c = model.commonality[group];
  const Matrix& d = model.individuality[worker];
  const int num_labels = tensor.num_labels();
  double total = 0.0;
  for (const Neighbor& nb : neighbors) {
    double log_p = 0.0;
    for (int l = 0; l < num_labels; ++l) {
      if (tensor.at(worker, nb.sample, l) != 1.0) continue;
      for (int g : consensus[nb.sample]) {
        log_p += std::log(std::max(c(g, l) + d(g, l), prob_floor));
      }
    }
    total += nb.similarity * std::exp(log_p);
  }
  return total / static_cast<double>(neighbors.size());
}

Vector worker_qualities(const AnnotationTensor& tensor, const ConsensusModel& model) {
  const int num_workers = tensor.num_workers();
  Vector out(num_workers);
  for (int w = 0; w < num_workers; ++w) {
    const Matrix& a = tensor.worker(w);
    const Matrix& d = model.individuality[w];
    double total = 0.0;
    int annotated = 0;
    for (int i = 0; i < a.rows(); ++i) {
      bool any = false;
      double log_q = 0.0;
      for (int l = 0; l < a.cols(); ++l) {
        any = any || a(i, l) != 0.0;
        if (a(i, l) == 1.0) log_q += std::log(std::max(d(l, l), 1e-300));
      }
      if (!any) continue;
      total += std::exp(log_q);
      ++annotated;
    }
    out[w] = annotated > 0 ? total / annotated : 0.0;
  }
  return out;
}

Vector costs_from_qualities(const Vector& qualities) {
  const Eigen::Index n = qualities.size();
  if (n == 0) return qualities;
  const double lo = qualities.minCoeff();
  const double hi = qualities.maxCoeff();
  if (!(hi > lo)) return Vector::Ones(n);
  return (1.0 + (n - 1.0) * (qualities.array() - lo) / (hi - lo)).matrix();
}

Vector worker_costs(const AnnotationTensor& tensor, const ConsensusModel& model) {
  return costs_from_qualities(worker_qualities(tensor, model));
}

SelectionResult select_triplets(const Dataset& dataset, const AnnotationTensor& tensor,
                                const ConsensusModel& model, const AmccConfig& cfg,
                                const PairSet& queried, int batch,
                                const SelectionOptions& options) {
  if (dataset.num_samples() != tensor.num_samples() ||
      dataset.num_labels() != tensor.num_labels()) {
    throw DimensionError("dataset and tensor dimensions differ");
  }
  const AmccConfig resolved = cfg.resolved(tensor.num_labels(), tensor.num_workers());
  SelectionContext ctx(dataset, tensor, model, resolved);
  std::mt19937_64 unused(0);
  return select_with_strategy(ctx, queried, batch, Strategy::kAmcc,
                              options.eta.value_or(resolved.eta), unused);
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kAmcc:
      return "amcc";
    case Strategy::kRandomWorker:
      return "random-worker";
    case Strategy::kRandomPair:
      return "random-pair";
    case Strategy::kNoLabelCorr:
      return "no-label-corr";
    case Strategy::kMvRandom:
      return "mv-random";
    case Strategy::kGreedyReliable:
      return "greedy-reliable";
  }
  return "unknown";
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> kAll = {
      Strategy::kAmcc,        Strategy::kRandomWorker, Strategy::kRandomPair,
      Strategy::kNoLabelCorr, Strategy::kMvRandom,     Strategy::kGreedyReliable};
  return kAll;
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

ActiveResult run_active_loop(const Dataset& dataset, const AnnotationTensor& tensor,
                             AnnotationOracle& oracle, const AmccConfig& cfg, int rounds,
                             Strategy strategy, std::uint64_t seed) {
  if (rounds < 0) throw DomainError("rounds must be non-negative");
  if (dataset.num_samples() != tensor.num_samples() ||
      dataset.num_labels() != tensor.num_labels()) {
    throw DimensionError("dataset and tensor dimensions differ");
  }
  const AmccConfig resolved = cfg.resolved(tensor.num_labels(), tensor.num_workers());
  Dataset current = dataset;
  AnnotationTensor annotations = tensor;
  FitResult model = fit(annotations, resolved, derive_seed(seed, kTagFit));
  std::mt19937_64 rng = seeded_rng({seed, kTagSelect});

  QueryLedger ledger;
  ledger.strategy = std::string(to_string(strategy));
  ledger.initial.snapshot = snapshot(current, annotations, model.model, resolved, strategy);
  PairSet queried;
  int queries = 0;
  double cumulative = 0.0;

  for (int round = 1; round <= rounds; ++round) {
    SelectionResult sel;
    {
      SelectionContext ctx(current, annotations, model.model, resolved, &oracle);
      sel = select_with_strategy(ctx, queried, resolved.batch_size, strategy, resolved.eta,
                                 rng);
    }
    if (sel.triplets.empty()) {
      ledger.pool_exhausted = true;
      break;
    }
    LedgerRound entry;
    entry.round = round;
    std::vector<AnnotationUpdate> updates;
    try {
      for (const TripletScore& t : sel.triplets) {
        const int value = oracle.answer(t.sample, t.label, t.worker);
        if (value != 1 && value != -1) {
          throw DataError("oracle returned " + std::to_string(value) + " for sample " +
                          std::to_string(t.sample));
        }
        entry.answers.push_back(value);
        updates.push_back({t.worker, t.sample, t.label, value});
      }
    } catch (const std::exception& e) {
      ledger.error = "round " + std::to_string(round) + ": " + e.what();
      break;
    }

    std::vector<Partition> partition = current.partition();
    for (const TripletScore& t : sel.triplets) {
      queried.insert({t.sample, t.label});
      entry.round_cost += t.c;
      partition[t.sample] = Partition::kLabeled;
    }
    current = current.with_partition(std::move(partition));
    annotations = annotations.with_updates(updates);
    model = refit(annotations, resolved, model);

    queries += static_cast<int>(sel.triplets.size());
    cumulative += entry.round_cost;
    entry.triplets = std::move(sel.triplets);
    entry.queries = queries;
    entry.cumulative_cost = cumulative;
    entry.snapshot = snapshot(current, annotations, model.model, resolved, strategy);
    ledger.rounds.push_back(std::move(entry));
    if (sel.pool_exhausted) {
      ledger.pool_exhausted = true;
      break;
    }
  }
  return ActiveResult{std::move(ledger), std::move(annotations), std::move(model)};
}

}  // namespace amcc
