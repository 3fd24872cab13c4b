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

#include "amcc/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "amcc/error.hpp"
#include "amcc/linalg.hpp"

namespace amcc {
namespace {

constexpr double kCommonalityRidge = 1e-8;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Matrix> worker_grams(const AnnotationTensor& tensor) {
  std::vector<Matrix> grams;
  grams.reserve(tensor.num_workers());
  for (const Matrix& a : tensor.matrices()) grams.push_back(a.transpose() * a);
  return grams;
}

// tr(X^T G X) = ||A X||_F^2 for G = A^T A.
double gram_quadratic(const Matrix& gram, const Matrix& x) {
  return (x.transpose() * gram * x).trace();
}

void check_shapes(const AnnotationTensor& tensor, const ConsensusModel& model) {
  const int num_labels = tensor.num_labels();
  if (model.num_workers() != tensor.num_workers()) {
    throw DimensionError("model has " + std::to_string(model.num_workers()) +
                         " workers, tensor has " + std::to_string(tensor.num_workers()));
  }
  auto square = [num_labels](const Matrix& m) {
    return m.rows() == num_labels && m.cols() == num_labels;
  };
  for (const Matrix& d : model.individuality) {
    if (!square(d)) throw DimensionError("individuality matrix is not L x L");
  }
  for (const Matrix& c : model.commonality) {
    if (!square(c)) throw DimensionError("commonality matrix is not L x L");
  }
  if (model.group_weights.size() != model.num_groups() ||
      static_cast<int>(model.group_assignment.size()) != model.num_workers()) {
    throw DimensionError("group weights or assignment have the wrong length");
  }
}

Vector powered_weights(const Vector& weights, double r) {
  return weights.array().pow(r).matrix();
}

// Projects each row of `in` onto the simplex, writing to `out`.
void project_rows_into(const RowMatrix& in, RowMatrix& out, std::vector<double>& scratch) {
  const Eigen::Index n = in.cols();
  scratch.resize(n);
  for (Eigen::Index i = 0; i < in.rows(); ++i) {
    const double* row = in.row(i).data();
    std::copy(row, row + n, scratch.begin());
    std::sort(scratch.begin(), scratch.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      cumulative += scratch[k];
      const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
      if (scratch[k] - t > 0.0) theta = t;
    }
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      out(i, k) = std::max(row[k] - theta, 0.0);
      total += out(i, k);
    }
    if (total > 0.0) out.row(i) /= total;
  }
}

FitResult run_alternating(const AnnotationTensor& tensor, const AmccConfig& cfg,
                          ConsensusModel model, AdmmState admm, bool keep_first_grouping) {
  FitResult result;
  FitTrace& trace = result.trace;
  double previous = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0; iter < cfg.max_inner_iters; ++iter) {
    if (!(iter == 0 && keep_first_grouping)) {
      model.group_assignment = assign_groups(tensor, model, cfg);
    }
    const IndividualityStats stats = update_individuality(tensor, model, admm, cfg);
    CommonalityUpdate common = update_commonality(tensor, model, cfg);
    model.commonality = std::move(common.commonality);
    model.group_weights = update_group_weights(tensor, model, cfg);
    model.validate();

    const double objective = evaluate_objective(tensor, model, cfg);
    trace.objective_history.push_back(objective);
    trace.group_assignment_history.push_back(model.group_assignment);
    trace.convexity_min_eigenvalue.push_back(stats.convexity_min_eigenvalue);
    trace.commonality_residual.push_back(
        *std::max_element(common.stationarity_residual.begin(),
                          common.stationarity_residual.end()));
    trace.admm_rounds.push_back(stats.max_rounds);
    trace.iterations_run = iter + 1;

    if (iter > 0 && std::abs(objective - previous) < cfg.convergence_tol) {
      trace.converged = true;
      break;
    }
    previous = objective;
  }
  result.model = std::move(model);
  result.admm = std::move(admm);
  return result;
}

}  // namespace

AdmmState AdmmState::from_model(const ConsensusModel& model, double mu) {
  AdmmState state;
  state.mu = mu;
  state.s = model.individuality;
  for (const Matrix& d : model.individuality) {
    state.t.push_back(Matrix::Zero(d.rows(), d.cols()));
  }
  return state;
}

double reconstruction_residual(const Matrix& annotations, const Matrix& individuality,
                               const Matrix& commonality) {
  return (annotations - annotations * (individuality + commonality)).squaredNorm();
}

Matrix residual_table(const AnnotationTensor& tensor, const ConsensusModel& model) {
  check_shapes(tensor, model);
  const int num_labels = tensor.num_labels();
  const Matrix identity = Matrix::Identity(num_labels, num_labels);
  const std::vector<Matrix> grams = worker_grams(tensor);
  Matrix table(model.num_workers(), model.num_groups());
  for (int w = 0; w < model.num_workers(); ++w) {
    for (int m = 0; m < model.num_groups(); ++m) {
      const Matrix x = identity - model.individuality[w] - model.commonality[m];
      table(w, m) = std::max(gram_quadratic(grams[w], x), 0.0);
    }
  }
  return table;
}

double evaluate_objective(const AnnotationTensor& tensor, const ConsensusModel& model,
                          const AmccConfig& cfg) {
  check_shapes(tensor, model);
  const Vector weights = powered_weights(model.group_weights, cfg.r);
  const Matrix residuals = residual_table(tensor, model);

  double reconstruction = 0.0;
  for (int m = 0; m < model.num_groups(); ++m) {
    reconstruction += weights[m] * residuals.col(m).sum();
  }

  double dependence = 0.0;
  if (cfg.alpha != 0.0) {
    for (int m = 0; m < model.num_groups(); ++m) {
      const std::vector<int> members = model.members(m);
      for (int w : members) {
        for (int v : members) {
          if (w != v) {
            dependence += empirical_hsic(model.individuality[w], model.individuality[v]);
          }
        }
      }
    }
  }

  double smoothness = 0.0;
  if (cfg.beta != 0.0) {
    const Matrix& lap = model.label_correlation.laplacian;
    for (const Matrix& c : model.commonality) {
      smoothness += (c.transpose() * lap * c).trace();
    }
  }
  return reconstruction - cfg.alpha * dependence + cfg.beta * smoothness;
}

IndividualityStats update_individuality(const AnnotationTensor& tensor,
                                        ConsensusModel& model, AdmmState& state,
                                        const AmccConfig& cfg) {
  check_shapes(tensor, model);
  const int num_labels = tensor.num_labels();
  const int num_workers = tensor.num_workers();
  if (static_cast<int>(state.s.size()) != num_workers ||
      static_cast<int>(state.t.size()) != num_workers) {
    throw DimensionError("ADMM state does not match the worker count");
  }
  const double mu = state.mu;

  IndividualityStats stats;
  const ConvexityReport convexity =
      verify_convexity_bound(model.individuality, mu, cfg.beta);
  stats.convexity_min_eigenvalue = convexity.min_eigenvalue;
  if (!convexity.convex) {
    throw ConfigError(
        "individuality subproblem is not convex: min eigenvalue of mu I - beta Q is " +
        std::to_string(convexity.min_eigenvalue) + "; require mu / beta >= 4 L (W - 1)");
  }

  const Matrix identity = Matrix::Identity(num_labels, num_labels);
  const Vector weights = powered_weights(model.group_weights, cfg.r);
  const double weight_sum = weights.sum();
  Matrix target = Matrix::Zero(num_labels, num_labels);
  for (int m = 0; m < model.num_groups(); ++m) {
    target += weights[m] * (identity - model.commonality[m]);
  }

  // Jacobi snapshot: every worker sees the previous iterate of the others.
  const Matrix h = centering_matrix(num_labels);
  std::vector<Matrix> centered_grams;
  centered_grams.reserve(num_workers);
  for (const Matrix& d : model.individuality) {
    const Matrix hd = h * d;
    centered_grams.push_back(hd * hd.transpose());
  }
  // d/dD_w of -alpha sum_{ordered pairs} HSIC is -4 alpha c Q_w D_w; halved in
  // the stationarity system below together with the other gradients.
  const double hsic_scale =
      num_labels > 1 ? 1.0 / ((num_labels - 1.0) * (num_labels - 1.0)) : 0.0;
  const std::vector<Matrix> grams = worker_grams(tensor);

  RowMatrix d(num_labels, num_labels);
  RowMatrix s(num_labels, num_labels);
  RowMatrix s_next(num_labels, num_labels);
  RowMatrix t(num_labels, num_labels);
  RowMatrix shifted(num_labels, num_labels);
  std::vector<double> scratch;

  for (int w = 0; w < num_workers; ++w) {
    Matrix q = Matrix::Zero(num_labels, num_labels);
    for (int v : model.members(model.group_assignment[w])) {
      if (v != w) q += centered_grams[v];
    }
    const Matrix system = weight_sum * grams[w] -
                          2.0 * cfg.alpha * hsic_scale * q +
                          mu * identity;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("individuality subproblem for worker " + std::to_string(w) +
                           " is not positive definite");
    }
    const RowMatrix linear = grams[w] * target;

    s = state.s[w];
    t = state.t[w];
    int rounds = 0;
    for (; rounds < cfg.admm_max_rounds;) {
      ++rounds;
      d = linear + mu * (s - t);
      llt.solveInPlace(d);
      shifted = d + t;
      project_rows_into(shifted, s_next, scratch);
      t += d - s_next;
      const double primal = (d - s_next).norm();
      const double change = (s_next - s).norm();
      s.swap(s_next);
      if (primal <= cfg.admm_tol && change <= cfg.admm_tol) break;
    }
    stats.max_rounds = std::max(stats.max_rounds, rounds);
    state.s[w] = s;
    state.t[w] = t;
    model.individuality[w] = s;
  }
  return stats;
}

double commonality_stationarity_residual(const AnnotationTensor& tensor,
                                         const ConsensusModel& model, int group,
                                         const Matrix& commonality,
                                         double laplacian_weight) {
  const int num_labels = tensor.num_labels();
  Matrix total = Matrix::Zero(num_labels, num_labels);
  for (int w : model.members(group)) {
    const Matrix& a = tensor.worker(w);
    const Matrix gram = a.transpose() * a;
    total += gram * commonality - gram;
  }
  total += laplacian_weight * model.label_correlation.laplacian * commonality;
  return total.norm();
}

CommonalityUpdate update_commonality(const AnnotationTensor& tensor,
                                     const ConsensusModel& model, const AmccConfig& cfg) {
  check_shapes(tensor, model);
  const int num_labels = tensor.num_labels();
  const Matrix& lap = model.label_correlation.laplacian;
  if (lap.rows() != num_labels || lap.cols() != num_labels) {
    throw PreconditionError("label correlation has not been built for this tensor");
  }
  const std::vector<Matrix> grams = worker_grams(tensor);
  const Matrix ridge = kCommonalityRidge * Matrix::Identity(num_labels, num_labels);

  CommonalityUpdate out;
  for (int m = 0; m < model.num_groups(); ++m) {
    Matrix group_gram = Matrix::Zero(num_labels, num_labels);
    for (int w : model.members(m)) group_gram += grams[w];
    const Matrix system = group_gram + cfg.beta * lap + ridge;
    Matrix c = solve_spd_system(system, group_gram,
                                "commonality subproblem (group " + std::to_string(m) + ")");
    out.stationarity_residual.push_back(
        commonality_stationarity_residual(tensor, model, m, c, cfg.beta));
    out.commonality.push_back(std::move(c));
  }
  return out;
}

Vector group_weights_from_residuals(const Vector& residuals, double r) {
  if (!(r > 1.0)) throw DomainError("group weight exponent r must exceed 1");
  const Eigen::Index m = residuals.size();
  if (m == 0) throw DimensionError("no groups");
  if ((residuals.array() < 0.0).any()) throw DomainError("negative residual");

  Vector weights = Vector::Zero(m);
  const Eigen::Index zero_count = (residuals.array() == 0.0).count();
  if (zero_count > 0) {
    // Limit of R^(1/(1-r)) as R -> 0: the zero-residual groups take all mass.
    for (Eigen::Index k = 0; k < m; ++k) {
      if (residuals[k] == 0.0) weights[k] = 1.0 / static_cast<double>(zero_count);
    }
    return weights;
  }
  // Log domain: log R^(1/(1-r)) = -log(R) / (r - 1).
  Vector logs = -residuals.array().log() / (r - 1.0);
  const double top = logs.maxCoeff();
  weights = (logs.array() - top).exp().matrix();
  return weights / weights.sum();
}

Vector update_group_weights(const AnnotationTensor& tensor, const ConsensusModel& model,
                            const AmccConfig& cfg) {
  const Matrix table = residual_table(tensor, model);
  return group_weights_from_residuals(table.colwise().sum().transpose(), cfg.r);
}

std::vector<int> assign_from_residuals(const Matrix& residuals) {
  const int num_workers = static_cast<int>(residuals.rows());
  const int num_groups = static_cast<int>(residuals.cols());
  std::vector<int> assignment(num_workers, 0);
  for (int w = 0; w < num_workers; ++w) {
    int best = 0;
    for (int m = 1; m < num_groups; ++m) {
      if (residuals(w, m) < residuals(w, best)) best = m;
    }
    assignment[w] = best;
  }
  std::vector<int> sizes(num_groups, 0);
  for (int g : assignment) ++sizes[g];
  for (int m = 0; m < num_groups; ++m) {
    if (sizes[m] > 0) continue;
    int chosen = -1;
    for (int w = 0; w < num_workers; ++w) {
      if (sizes[assignment[w]] <= 1) continue;
      if (chosen < 0 || residuals(w, m) < residuals(chosen, m)) chosen = w;
    }
    if (chosen < 0) break;  // fewer workers than groups
    --sizes[assignment[chosen]];
    assignment[chosen] = m;
    ++sizes[m];
  }
  return assignment;
}

std::vector<int> assign_groups(const AnnotationTensor& tensor, const ConsensusModel& model,
                               const AmccConfig& /*cfg*/) {
  return assign_from_residuals(residual_table(tensor, model));
}

ConsensusModel initial_model(const AnnotationTensor& tensor, const AmccConfig& cfg,
                             std::uint64_t seed) {
  const int num_labels = tensor.num_labels();
  const int num_workers = tensor.num_workers();
  const int num_groups = cfg.num_groups;
  if (num_groups < 1 || num_groups > num_workers) {
    throw ConfigError("num_groups must lie in [1, W]");
  }
  ConsensusModel model;
  model.individuality.assign(num_workers,
                             Matrix::Constant(num_labels, num_labels, 1.0 / num_labels));
  model.commonality.assign(num_groups, Matrix::Zero(num_labels, num_labels));
  model.group_weights = Vector::Constant(num_groups, 1.0 / num_groups);
  model.group_assignment.resize(num_workers);
  for (int w = 0; w < num_workers; ++w) model.group_assignment[w] = w % num_groups;
  std::mt19937_64 rng(seed);
  std::shuffle(model.group_assignment.begin(), model.group_assignment.end(), rng);
  model.label_correlation = build_label_correlation(tensor);
  return model;
}

FitResult fit(const AnnotationTensor& tensor, const AmccConfig& cfg, std::uint64_t seed) {
  const AmccConfig resolved = cfg.resolved(tensor.num_labels(), tensor.num_workers());
  ConsensusModel model = initial_model(tensor, resolved, seed);
  AdmmState admm = AdmmState::from_model(model, resolved.mu_value());
  // All commonalities start equal, so the first iteration keeps the seeded
  // grouping instead of collapsing every worker onto group 0.
  return run_alternating(tensor, resolved, std::move(model), std::move(admm), true);
}

FitResult refit(const AnnotationTensor& tensor, const AmccConfig& cfg,
                const FitResult& previous) {
  const AmccConfig resolved = cfg.resolved(tensor.num_labels(), tensor.num_workers());
  ConsensusModel model = previous.model;
  check_shapes(tensor, model);
  model.label_correlation = build_label_correlation(tensor);
  AdmmState admm = previous.admm;
  admm.mu = resolved.mu_value();
  return run_alternating(tensor, resolved, std::move(model), std::move(admm), false);
}

SampleScores consensus_scores(const AnnotationTensor& tensor, const ConsensusModel& model,
                              const AmccConfig& cfg, int sample) {
  check_shapes(tensor, model);
  const int num_labels = tensor.num_labels();
  if (sample < 0 || sample >= tensor.num_samples()) {
    throw DimensionError("sample index out of range");
  }
  SampleScores out;
  std::vector<std::pair<int, int>> positives;  // (worker, label)
  for (int w = 0; w < tensor.num_workers(); ++w) {
    for (int l = 0; l < num_labels; ++l) {
      if (tensor.at(w, sample, l) == 1.0) positives.emplace_back(w, l);
    }
  }
  if (positives.empty()) {
    out.scores = Vector::Constant(num_labels, 1.0 / num_labels);
    out.no_evidence = true;
    return out;
  }

  const double floor = cfg.prob_floor;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // Per-group log evidence, combined with log-sum-exp across groups.
  Vector combined = Vector::Constant(num_labels, neg_inf);
  for (int m = 0; m < model.num_groups(); ++m) {
    const double lambda = model.group_weights[m];
    if (lambda <= 0.0) continue;
    const Matrix& c = model.commonality[m];
    for (int g = 0; g < num_labels; ++g) {
      double log_evidence = cfg.r * std::log(lambda);
      for (const auto& [w, l] : positives) {
        log_evidence += std::log(std::max(c(g, l) + model.individuality[w](g, l), floor));
      }
      const double a = combined[g];
      const double hi = std::max(a, log_evidence);
      combined[g] = hi == neg_inf
                        ? neg_inf
                        : hi + std::log(std::exp(a - hi) + std::exp(log_evidence - hi));
    }
  }
  const double top = combined.maxCoeff();
  if (top == neg_inf) {
    out.scores = Vector::Constant(num_labels, 1.0 / num_labels);
    out.no_evidence = true;
    return out;
  }
  out.scores = (combined.array() - top).exp().matrix();
  out.scores /= out.scores.sum();
  return out;
}

LabelSet labels_from_scores(const Vector& scores, double threshold) {
  // Scores are normalized, so a uniform row sits on 1 / L up to rounding.
  constexpr double kThresholdSlack = 1e-12;
  LabelSet out;
  for (Eigen::Index g = 0; g < scores.size(); ++g) {
    if (scores[g] >= threshold - kThresholdSlack) out.push_back(static_cast<int>(g));
  }
  if (out.empty() && scores.size() > 0) {
    Eigen::Index best = 0;
    scores.maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

LabelSet consensus_labels(const AnnotationTensor& tensor, const ConsensusModel& model,
                          const AmccConfig& cfg, int sample) {
  const SampleScores s = consensus_scores(tensor, model, cfg, sample);
  return labels_from_scores(s.scores, cfg.threshold_value(tensor.num_labels()));
}

ConsensusResult consensus_all(const AnnotationTensor& tensor, const ConsensusModel& model,
                              const AmccConfig& cfg) {
  const int n = tensor.num_samples();
  const double threshold = cfg.threshold_value(tensor.num_labels());
  ConsensusResult out;
  out.scores.resize(n, tensor.num_labels());
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const SampleScores s = consensus_scores(tensor, model, cfg, i);
    out.scores.row(i) = s.scores.transpose();
    out.labels.push_back(labels_from_scores(s.scores, threshold));
    if (s.no_evidence) out.no_evidence.push_back(i);
  }
  return out;
}

}  // namespace amcc
