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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <numeric>
#include <sstream>

#include "amcc/consensus.hpp"
#include "amcc/error.hpp"
#include "amcc/io.hpp"
#include "amcc/metrics.hpp"
#include "amcc/rng.hpp"

namespace amcc::cli {
namespace {

using nlohmann::json;

// Child seeds of one repeat.
enum : std::uint64_t { kSeedCrowd = 1, kSeedFit = 2, kSeedSparsify = 3, kSeedActive = 4,
                       kSeedOracle = 5 };

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

Stat summarize(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

json stat_json(const std::vector<double>& xs) {
  const Stat s = summarize(xs);
  return json{{"mean", s.mean}, {"std", s.std}};
}

std::uint64_t repeat_seed(const ExperimentSpec& spec, int repeat) {
  return derive_seed(spec.seed, static_cast<std::uint64_t>(repeat));
}

// A crowd either simulated or loaded from files, with archetypes only for
// simulated ones.
struct Problem {
  Dataset dataset;
  AnnotationTensor tensor;
  IdMaps ids;
  std::optional<SimulatedCrowd> crowd;
};

std::vector<WorkerArchetype> preset_archetypes(const ExperimentSpec& spec) {
  const int num_labels = spec.simulation.num_labels;
  switch (spec.crowd) {
    case CrowdPreset::kGradedSpammers:
      return graded_with_spammers(num_labels);
    case CrowdPreset::kArchetypes:
      return archetype_groups(num_labels);
    case CrowdPreset::kNoiseless:
      return noiseless_crowd(num_labels, spec.noiseless_workers);
  }
  throw ConfigError("unknown crowd preset");
}

Problem load_problem(const ExperimentSpec& spec, std::uint64_t seed) {
  if (!spec.annotations) {
    SimulatedCrowd crowd = simulate_crowd(spec.simulation, preset_archetypes(spec),
                                          derive_seed(seed, kSeedCrowd));
    IdMaps ids = default_ids(crowd.tensor.num_workers(), crowd.tensor.num_samples(),
                             crowd.tensor.num_labels());
    Problem problem{crowd.dataset, crowd.tensor, std::move(ids), std::nullopt};
    problem.crowd.emplace(std::move(crowd));
    return problem;
  }
  LoadedAnnotations loaded = load_annotations(*spec.annotations, spec.min_annotations);
  std::optional<LabelMatrix> truth;
  if (spec.truth) truth = load_truth(*spec.truth, loaded.ids);
  std::optional<Matrix> features;
  if (spec.features) features = load_features(*spec.features, loaded.ids.samples);
  const int n = loaded.tensor.num_samples();
  std::vector<Partition> partition =
      random_partition(n, spec.simulation.labeled_fraction, spec.simulation.unlabeled_fraction,
                       derive_seed(seed, kSeedCrowd));
  Dataset dataset(n, loaded.tensor.num_labels(), std::move(features), std::move(truth),
                  std::move(partition));
  return Problem{std::move(dataset), std::move(loaded.tensor), std::move(loaded.ids),
                 std::nullopt};
}

json report_json(const EvalReport& r) {
  return json{{"accuracy", r.accuracy},
              {"one_minus_rl", r.one_minus_rl},
              {"one_minus_oe", r.one_minus_oe}};
}

struct ConsensusRun {
  json amcc;
  json mv;
  std::optional<EvalReport> amcc_report;
  std::optional<EvalReport> mv_report;
};

ConsensusRun consensus_once(const ExperimentSpec& spec, const Dataset& dataset,
                            const AnnotationTensor& tensor, std::uint64_t fit_seed) {
  const AmccConfig cfg = spec.config.resolved(tensor.num_labels(), tensor.num_workers());
  const FitResult fitted = fit(tensor, cfg, fit_seed);
  const ConsensusResult result = consensus_all(tensor, fitted.model, cfg);
  ConsensusRun run;
  run.amcc = json{{"converged", fitted.trace.converged},
                  {"iterations", fitted.trace.iterations_run},
                  {"objective", fitted.trace.objective_history.back()},
                  {"group_weights", std::vector<double>(fitted.model.group_weights.begin(),
                                                        fitted.model.group_weights.end())},
                  {"group_assignment", fitted.model.group_assignment},
                  {"no_evidence_samples", result.no_evidence.size()}};
  if (dataset.has_truth()) {
    const std::vector<LabelSet> truth = dataset.truth_sets();
    run.amcc_report = evaluate(result.labels, result.scores, truth);
    run.amcc["metrics"] = report_json(*run.amcc_report);
    if (spec.majority_vote) {
      const MajorityVote mv = majority_vote(tensor);
      run.mv_report = evaluate(mv.labels, mv.scores, truth);
      run.mv = json{{"metrics", report_json(*run.mv_report)}};
    }
  }
  return run;
}

// {"amcc": {"accuracy": {mean, std}, ...}, "mv": {...}} over the runs.
json method_summary(const std::vector<ConsensusRun>& runs) {
  json out = json::object();
  auto add = [&](const char* name, auto getter) {
    std::vector<double> acc, rl, oe;
    for (const ConsensusRun& r : runs) {
      const std::optional<EvalReport>& rep = getter(r);
      if (!rep) return;
      acc.push_back(rep->accuracy);
      rl.push_back(rep->one_minus_rl);
      oe.push_back(rep->one_minus_oe);
    }
    if (acc.empty()) return;
    out[name] = json{{"accuracy", stat_json(acc)},
                     {"one_minus_rl", stat_json(rl)},
                     {"one_minus_oe", stat_json(oe)}};
  };
  add("amcc", [](const ConsensusRun& r) -> const std::optional<EvalReport>& {
    return r.amcc_report;
  });
  add("mv", [](const ConsensusRun& r) -> const std::optional<EvalReport>& {
    return r.mv_report;
  });
  return out;
}

void check_repeats(const ExperimentSpec& spec) {
  if (spec.repeats < 1) throw ConfigError("--repeats must be positive");
  if (spec.rounds < 0) throw ConfigError("--rounds must be non-negative");
}

struct ActiveRun {
  QueryLedger ledger;
};

ActiveRun active_once(const ExperimentSpec& spec, const AmccConfig& config,
                      std::uint64_t seed) {
  Problem problem = load_problem(spec, seed);
  if (problem.crowd) {
    SimulatedOracle oracle(*problem.crowd, derive_seed(seed, kSeedOracle));
    ActiveResult r = run_active_loop(problem.dataset, problem.tensor, oracle, config,
                                     spec.rounds, spec.strategy, derive_seed(seed, kSeedActive));
    return ActiveRun{std::move(r.ledger)};
  }
  if (!(spec.holdout > 0.0 && spec.holdout < 1.0)) {
    throw ConfigError("--holdout must lie in (0, 1)");
  }
  // Hidden annotations stay behind the replay oracle.
  ReplayOracle oracle(problem.tensor);
  const AnnotationTensor visible =
      sparsify(problem.tensor, spec.holdout, derive_seed(seed, kSeedSparsify));
  ActiveResult r = run_active_loop(problem.dataset, visible, oracle, config, spec.rounds,
                                   spec.strategy, derive_seed(seed, kSeedActive));
  return ActiveRun{std::move(r.ledger)};
}

// Per-round means across repeats: [{round, queries, cumulative_cost, accuracy, ...}].
json round_curve(const std::vector<QueryLedger>& ledgers) {
  std::size_t rounds = std::numeric_limits<std::size_t>::max();
  for (const QueryLedger& l : ledgers) rounds = std::min(rounds, l.rounds.size());
  json curve = json::array();
  for (std::size_t k = 0; k <= rounds && !ledgers.empty(); ++k) {
    std::vector<double> queries, cost, acc, rl, oe;
    for (const QueryLedger& l : ledgers) {
      const LedgerRound& r = k == 0 ? l.initial : l.rounds[k - 1];
      queries.push_back(r.queries);
      cost.push_back(r.cumulative_cost);
      if (r.snapshot) {
        acc.push_back(r.snapshot->accuracy);
        rl.push_back(r.snapshot->one_minus_rl);
        oe.push_back(r.snapshot->one_minus_oe);
      }
    }
    json point{{"round", k},
               {"queries", summarize(queries).mean},
               {"cumulative_cost", stat_json(cost)}};
    if (!acc.empty()) {
      point["accuracy"] = stat_json(acc);
      point["one_minus_rl"] = stat_json(rl);
      point["one_minus_oe"] = stat_json(oe);
    }
    curve.push_back(point);
  }
  return curve;
}

std::string csv_number(const json& j) { return format_double(j.get<double>()); }

std::string stat_cells(const json& stat) {
  return csv_number(stat.at("mean")) + "," + csv_number(stat.at("std"));
}

std::string consensus_csv(const json& summary, const std::string& prefix,
                          const std::string& prefix_value) {
  std::string out;
  for (const auto& [method, m] : summary.items()) {
    if (!prefix.empty()) out += prefix_value + ",";
    out += method + "," + stat_cells(m.at("accuracy")) + "," + stat_cells(m.at("one_minus_rl")) +
           "," + stat_cells(m.at("one_minus_oe")) + "\n";
  }
  return out;
}

constexpr const char* kMethodColumns =
    "method,accuracy_mean,accuracy_std,one_minus_rl_mean,one_minus_rl_std,"
    "one_minus_oe_mean,one_minus_oe_std";

std::string curve_csv(const json& curve, const std::string& prefix_value) {
  std::string out;
  for (const json& p : curve) {
    if (!prefix_value.empty()) out += prefix_value + ",";
    out += std::to_string(p.at("round").get<int>()) + "," + csv_number(p.at("queries")) + "," +
           stat_cells(p.at("cumulative_cost"));
    if (p.contains("accuracy")) {
      out += "," + stat_cells(p.at("accuracy")) + "," + stat_cells(p.at("one_minus_rl")) + "," +
             stat_cells(p.at("one_minus_oe"));
    } else {
      out += ",,,,,,";
    }
    out += "\n";
  }
  return out;
}

constexpr const char* kCurveColumns =
    "round,queries,cumulative_cost_mean,cumulative_cost_std,accuracy_mean,accuracy_std,"
    "one_minus_rl_mean,one_minus_rl_std,one_minus_oe_mean,one_minus_oe_std";

std::string to_table(const json& doc) {
  const std::string command = doc.at("spec").at("command").get<std::string>();
  const json& result = doc.at("result");
  if (command == "consensus") {
    return std::string(kMethodColumns) + "\n" + consensus_csv(result.at("summary"), "", "");
  }
  if (command == "sparsity-sweep") {
    std::string out = std::string("ratio,") + kMethodColumns + "\n";
    for (const json& row : result.at("rows")) {
      out += consensus_csv(row.at("summary"), "ratio", csv_number(row.at("ratio")));
    }
    return out;
  }
  if (command == "active") {
    return std::string(kCurveColumns) + "\n" + curve_csv(result.at("curve"), "");
  }
  if (command == "batch-sweep") {
    std::string out = std::string("batch,") + kCurveColumns + "\n";
    for (const json& c : result.at("curves")) {
      out += curve_csv(c.at("curve"), std::to_string(c.at("batch").get<int>()));
    }
    return out;
  }
  throw ConfigError("command '" + command + "' has no tabular form");
}

}  // namespace

std::string_view to_string(CrowdPreset preset) {
  switch (preset) {
    case CrowdPreset::kGradedSpammers:
      return "graded-spammers";
    case CrowdPreset::kArchetypes:
      return "archetypes";
    case CrowdPreset::kNoiseless:
      return "noiseless";
  }
  return "unknown";
}

CrowdPreset parse_crowd(std::string_view name) {
  for (CrowdPreset p :
       {CrowdPreset::kGradedSpammers, CrowdPreset::kArchetypes, CrowdPreset::kNoiseless}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown crowd preset '" + std::string(name) + "'");
}

void apply_config_file(const std::filesystem::path& path, AmccConfig& config) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "num_groups") config.num_groups = value.get<int>();
      else if (key == "alpha") config.alpha = value.get<double>();
      else if (key == "beta") config.beta = value.get<double>();
      else if (key == "r") config.r = value.get<double>();
      else if (key == "mu") config.mu = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "eta") config.eta = value.get<double>();
      else if (key == "knn_k") config.knn_k = value.get<int>();
      else if (key == "max_inner_iters") config.max_inner_iters = value.get<int>();
      else if (key == "convergence_tol") config.convergence_tol = value.get<double>();
      else if (key == "batch_size") config.batch_size = value.get<int>();
      else if (key == "consensus_threshold")
        config.consensus_threshold =
            value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "prob_floor") config.prob_floor = value.get<double>();
      else if (key == "admm_max_rounds") config.admm_max_rounds = value.get<int>();
      else if (key == "admm_tol") config.admm_tol = value.get<double>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::type_error&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
}

json config_to_json(const AmccConfig& c) {
  json j{{"num_groups", c.num_groups},
         {"alpha", c.alpha},
         {"beta", c.beta},
         {"r", c.r},
         {"eta", c.eta},
         {"knn_k", c.knn_k},
         {"max_inner_iters", c.max_inner_iters},
         {"convergence_tol", c.convergence_tol},
         {"batch_size", c.batch_size},
         {"prob_floor", c.prob_floor},
         {"admm_max_rounds", c.admm_max_rounds},
         {"admm_tol", c.admm_tol}};
  j["mu"] = c.mu ? json(*c.mu) : json(nullptr);
  j["consensus_threshold"] = c.consensus_threshold ? json(*c.consensus_threshold) : json(nullptr);
  return j;
}

json spec_to_json(const ExperimentSpec& spec) {
  json j{{"command", spec.command},
         {"config", config_to_json(spec.config)},
         {"seed", spec.seed},
         {"repeats", spec.repeats},
         {"rounds", spec.rounds},
         {"strategy", std::string(to_string(spec.strategy))},
         {"majority_vote", spec.majority_vote},
         {"removal_ratios", spec.removal_ratios},
         {"batch_sizes", spec.batch_sizes},
         {"query_budget", spec.query_budget}};
  if (spec.annotations) {
    j["data"] = json{{"annotations", spec.annotations->string()},
                     {"truth", spec.truth ? json(spec.truth->string()) : json(nullptr)},
                     {"features", spec.features ? json(spec.features->string()) : json(nullptr)},
                     {"min_annotations", spec.min_annotations},
                     {"holdout", spec.holdout}};
  } else {
    const CrowdOptions& s = spec.simulation;
    j["simulation"] = json{{"crowd", std::string(to_string(spec.crowd))},
                           {"samples", s.num_samples},
                           {"labels", s.num_labels},
                           {"cardinality", s.cardinality},
                           {"correlation", s.correlation_strength},
                           {"noiseless_workers", spec.noiseless_workers}};
  }
  j["partition"] = json{{"labeled", spec.simulation.labeled_fraction},
                        {"unlabeled", spec.simulation.unlabeled_fraction}};
  return j;
}

json cmd_consensus(const ExperimentSpec& spec) {
  check_repeats(spec);
  std::vector<ConsensusRun> runs;
  json run_docs = json::array();
  json resolved;
  for (int k = 0; k < spec.repeats; ++k) {
    const std::uint64_t seed = repeat_seed(spec, k);
    const Problem problem = load_problem(spec, seed);
    if (k == 0) {
      resolved = config_to_json(
          spec.config.resolved(problem.tensor.num_labels(), problem.tensor.num_workers()));
    }
    runs.push_back(consensus_once(spec, problem.dataset, problem.tensor,
                                  derive_seed(seed, kSeedFit)));
    json doc{{"repeat", k}, {"seed", seed}, {"amcc", runs.back().amcc}};
    if (!runs.back().mv.is_null()) doc["mv"] = runs.back().mv;
    run_docs.push_back(doc);
  }
  return json{{"spec", spec_to_json(spec)},
              {"result",
               {{"resolved_config", resolved},
                {"summary", method_summary(runs)},
                {"runs", run_docs}}}};
}

json cmd_sparsity_sweep(const ExperimentSpec& spec) {
  check_repeats(spec);
  json rows = json::array();
  for (double ratio : spec.removal_ratios) {
    std::vector<ConsensusRun> runs;
    for (int k = 0; k < spec.repeats; ++k) {
      const std::uint64_t seed = repeat_seed(spec, k);
      const Problem problem = load_problem(spec, seed);
      const AnnotationTensor sparse =
          sparsify(problem.tensor, ratio, derive_seed(seed, kSeedSparsify));
      runs.push_back(consensus_once(spec, problem.dataset, sparse, derive_seed(seed, kSeedFit)));
    }
    rows.push_back(json{{"ratio", ratio}, {"summary", method_summary(runs)}});
  }
  return json{{"spec", spec_to_json(spec)}, {"result", {{"rows", rows}}}};
}

json cmd_active(const ExperimentSpec& spec) {
  check_repeats(spec);
  std::vector<QueryLedger> ledgers;
  json run_docs = json::array();
  for (int k = 0; k < spec.repeats; ++k) {
    const std::uint64_t seed = repeat_seed(spec, k);
    ActiveRun run = active_once(spec, spec.config, seed);
    if (run.ledger.error) {
      throw OracleError("repeat " + std::to_string(k) + ": " + *run.ledger.error);
    }
    run_docs.push_back(json::parse(to_json(run.ledger)));
    ledgers.push_back(std::move(run.ledger));
  }
  return json{{"spec", spec_to_json(spec)},
              {"result", {{"curve", round_curve(ledgers)}, {"ledgers", run_docs}}}};
}

json cmd_batch_sweep(const ExperimentSpec& spec) {
  check_repeats(spec);
  if (spec.query_budget < 1) throw ConfigError("--budget must be positive");
  json curves = json::array();
  for (int batch : spec.batch_sizes) {
    if (batch < 1 || spec.query_budget % batch != 0) {
      throw ConfigError("batch size " + std::to_string(batch) +
                        " does not divide the query budget " +
                        std::to_string(spec.query_budget));
    }
    ExperimentSpec point = spec;
    point.config.batch_size = batch;
    point.rounds = spec.query_budget / batch;
    std::vector<QueryLedger> ledgers;
    for (int k = 0; k < spec.repeats; ++k) {
      ActiveRun run = active_once(point, point.config, repeat_seed(spec, k));
      if (run.ledger.error) throw OracleError(*run.ledger.error);
      ledgers.push_back(std::move(run.ledger));
    }
    curves.push_back(json{{"batch", batch}, {"rounds", point.rounds},
                          {"curve", round_curve(ledgers)}});
  }
  return json{{"spec", spec_to_json(spec)}, {"result", {{"curves", curves}}}};
}

json cmd_simulate(const ExperimentSpec& spec) {
  if (spec.annotations) throw ConfigError("simulate does not take recorded data");
  if (!spec.out) throw ConfigError("simulate needs --out <directory>");
  const std::uint64_t seed = repeat_seed(spec, 0);
  const Problem problem = load_problem(spec, seed);
  const SimulatedCrowd& crowd = *problem.crowd;
  std::filesystem::create_directories(*spec.out);
  save_annotations(*spec.out / "annotations.csv", crowd.tensor, problem.ids);
  save_truth(*spec.out / "truth.csv", *crowd.dataset.true_labels(), problem.ids);
  if (crowd.dataset.has_features()) {
    save_features(*spec.out / "features.csv", *crowd.dataset.features(), problem.ids.samples);
  }
  json workers = json::array();
  for (std::size_t w = 0; w < crowd.archetypes.size(); ++w) {
    const WorkerArchetype& a = crowd.archetypes[w];
    workers.push_back(json{{"id", problem.ids.workers[w]},
                           {"kind", std::string(to_string(a.kind))},
                           {"diagonal", a.confusion.diagonal().minCoeff()},
                           {"annotation_rate", a.annotation_rate},
                           {"annotations", crowd.tensor.nnz(static_cast<int>(w))}});
  }
  return json{{"spec", spec_to_json(spec)},
              {"result",
               {{"workers", workers},
                {"samples", crowd.tensor.num_samples()},
                {"labels", crowd.tensor.num_labels()},
                {"records", crowd.tensor.total_nnz()},
                {"files", {"annotations.csv", "truth.csv", "features.csv"}}}}};
}

int run(const ExperimentSpec& spec) {
  json doc;
  if (spec.command == "consensus") {
    doc = cmd_consensus(spec);
  } else if (spec.command == "active") {
    doc = cmd_active(spec);
  } else if (spec.command == "simulate") {
    doc = cmd_simulate(spec);
    write_text_file(*spec.out / "crowd.json", doc.dump(2) + "\n");
    return 0;
  } else if (spec.command == "sparsity-sweep") {
    doc = cmd_sparsity_sweep(spec);
  } else if (spec.command == "batch-sweep") {
    doc = cmd_batch_sweep(spec);
  } else {
    throw ConfigError("unknown command '" + spec.command + "'");
  }

  if (!spec.out) {
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  if (format_for(*spec.out) == ReportFormat::kCsv) {
    write_text_file(*spec.out, to_table(doc));
    std::filesystem::path sidecar = *spec.out;
    sidecar += ".spec.json";
    write_text_file(sidecar, spec_to_json(spec).dump(2) + "\n");
  } else {
    write_text_file(*spec.out, doc.dump(2) + "\n");
  }
  return 0;
}

}  // namespace amcc::cli
