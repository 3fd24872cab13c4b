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

// Grouped multi-label crowd consensus.
//
// Each worker's annotation matrix A_w is modelled as A_w (D_w + C_m): D_w is
// the worker's row-stochastic individuality, C_m the commonality of the
// worker's group m. The fitted objective is
//
//   sum_m sum_w lambda_m^r ||A_w - A_w (D_w + C_m)||_F^2
//     - alpha sum_m sum_{w != v in group m} HSIC(D_w, D_v)
//     + beta  sum_m tr(C_m^T Lap C_m)
//
// and is minimized by alternating over group membership, D (ADMM with a
// simplex-projected auxiliary copy), C (closed-form solve) and lambda
// (closed form). Consensus labels come from a group-weighted product of
// per-worker label-emission probabilities.

#ifndef AMCC_CONSENSUS_HPP_
#define AMCC_CONSENSUS_HPP_

#include <cstdint>
#include <vector>

#include "amcc/types.hpp"

namespace amcc {

struct FitTrace {
  std::vector<double> objective_history;  // one entry per outer iteration
  bool converged = false;
  int iterations_run = 0;
  std::vector<std::vector<int>> group_assignment_history;
  // Diagnostics recorded at every outer iteration.
  std::vector<double> convexity_min_eigenvalue;
  std::vector<double> commonality_residual;  // max over groups
  std::vector<int> admm_rounds;              // max over workers
};

// Auxiliary copy S_w and scaled dual T_w of the individuality ADMM.
struct AdmmState {
  std::vector<Matrix> s;
  std::vector<Matrix> t;
  double mu = 0.0;

  static AdmmState from_model(const ConsensusModel& model, double mu);
};

struct FitResult {
  ConsensusModel model;
  FitTrace trace;
  AdmmState admm;
};

// ||A - A (D + C)||_F^2.
double reconstruction_residual(const Matrix& annotations, const Matrix& individuality,
                               const Matrix& commonality);

// W x M matrix of reconstruction residuals of every worker against every
// group's commonality.
Matrix residual_table(const AnnotationTensor& tensor, const ConsensusModel& model);

double evaluate_objective(const AnnotationTensor& tensor, const ConsensusModel& model,
                          const AmccConfig& cfg);

struct IndividualityStats {
  int max_rounds = 0;  // ADMM rounds used by the slowest worker
  double convexity_min_eigenvalue = 0.0;
};

// Runs the individuality ADMM for every worker against a snapshot of the
// other workers' D (Jacobi sweep). On return every D_w equals its
// simplex-feasible copy S_w. Throws ConfigError when the convexity check
// fails, NumericalError when a D-step solve fails.
IndividualityStats update_individuality(const AnnotationTensor& tensor,
                                        ConsensusModel& model, AdmmState& state,
                                        const AmccConfig& cfg);

struct CommonalityUpdate {
  std::vector<Matrix> commonality;
  std::vector<double> stationarity_residual;  // per group
};

// Solves (sum_{w in m} A_w^T A_w + beta Lap) C_m = sum_{w in m} A_w^T A_w
// per group (with a 1e-8 ridge). beta is the Laplacian weight of the
// objective, so this step and the objective agree on the smoothness term.
CommonalityUpdate update_commonality(const AnnotationTensor& tensor,
                                     const ConsensusModel& model,
                                     const AmccConfig& cfg);

// Stationarity residual ||sum_w (G_w C - G_w) + laplacian_weight Lap C||_F of
// one group.
double commonality_stationarity_residual(const AnnotationTensor& tensor,
                                         const ConsensusModel& model, int group,
                                         const Matrix& commonality,
                                         double laplacian_weight);

// lambda_m proportional to R_m^(1 / (1 - r)); zero-residual groups share all
// weight, all-zero residuals give uniform weights.
Vector group_weights_from_residuals(const Vector& residuals, double r);
Vector update_group_weights(const AnnotationTensor& tensor, const ConsensusModel& model,
                            const AmccConfig& cfg);

// Residual-based hard assignment: argmin over groups (ties to the lower
// index), then each empty group takes its single nearest worker from a group
// that can spare one.
std::vector<int> assign_from_residuals(const Matrix& residuals);
std::vector<int> assign_groups(const AnnotationTensor& tensor, const ConsensusModel& model,
                               const AmccConfig& cfg);

// Uniform D, zero C, uniform lambda and a seeded balanced random grouping.
ConsensusModel initial_model(const AnnotationTensor& tensor, const AmccConfig& cfg,
                             std::uint64_t seed);

// Alternating minimization from the initial model. `cfg` is resolved
// against the tensor's dimensions first.
FitResult fit(const AnnotationTensor& tensor, const AmccConfig& cfg, std::uint64_t seed);

// Same loop warm-started from a previous fit (groups, D, C, lambda and ADMM
// state carried over); the label correlation is rebuilt from `tensor`.
FitResult refit(const AnnotationTensor& tensor, const AmccConfig& cfg,
                const FitResult& previous);

struct SampleScores {
  Vector scores;             // normalized to sum to 1
  bool no_evidence = false;  // the sample has no positive annotation
};

SampleScores consensus_scores(const AnnotationTensor& tensor, const ConsensusModel& model,
                              const AmccConfig& cfg, int sample);

// {g : score(g) >= threshold - 1e-12}, or {argmax} when that set is empty.
LabelSet labels_from_scores(const Vector& scores, double threshold);

LabelSet consensus_labels(const AnnotationTensor& tensor, const ConsensusModel& model,
                          const AmccConfig& cfg, int sample);

struct ConsensusResult {
  Matrix scores;                  // N x L, rows sum to 1
  std::vector<LabelSet> labels;
  std::vector<int> no_evidence;   // samples that fell back to uniform scores
};

ConsensusResult consensus_all(const AnnotationTensor& tensor, const ConsensusModel& model,
                              const AmccConfig& cfg);

}  // namespace amcc

#endif  // AMCC_CONSENSUS_HPP_
