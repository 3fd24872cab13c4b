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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "amcc/error.hpp"
#include "cli.hpp"

namespace {

using amcc::cli::ExperimentSpec;

void add_common(CLI::App* cmd, ExperimentSpec& spec, std::string& config_path,
                std::string& out) {
  cmd->add_option("--config", config_path, "JSON file overriding model parameters")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", spec.seed, "Root seed");
  cmd->add_option("--out", out, "Output path (.json or .csv); stdout when omitted");
}

void add_data(CLI::App* cmd, ExperimentSpec& spec, std::string& annotations, std::string& truth,
              std::string& features) {
  cmd->add_option("--annotations", annotations, "Annotation CSV (worker_id,sample_id,label_id,value)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--truth", truth, "Truth CSV (sample_id,label_id)")->check(CLI::ExistingFile);
  cmd->add_option("--features", features, "Feature CSV (sample_id,f0,f1,...)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--min-annotations", spec.min_annotations,
                  "Drop workers with fewer annotation records");
}

void add_simulation(CLI::App* cmd, ExperimentSpec& spec, std::string& crowd) {
  cmd->add_option("--crowd", crowd, "Simulated crowd: graded-spammers, archetypes, noiseless");
  cmd->add_option("--samples", spec.simulation.num_samples, "Simulated samples");
  cmd->add_option("--labels", spec.simulation.num_labels, "Simulated labels");
  cmd->add_option("--cardinality", spec.simulation.cardinality, "Mean labels per sample");
  cmd->add_option("--correlation", spec.simulation.correlation_strength,
                  "Label co-occurrence strength in [0, 1]");
  cmd->add_option("--workers", spec.noiseless_workers, "Workers of the noiseless crowd");
}

void add_repeats(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--repeats", spec.repeats, "Independent repetitions")
      ->check(CLI::PositiveNumber);
}

void add_active(CLI::App* cmd, ExperimentSpec& spec, std::string& strategy) {
  cmd->add_option("--strategy", strategy,
                  "amcc, random-worker, random-pair, no-label-corr, mv-random, greedy-reliable");
  cmd->add_option("--holdout", spec.holdout,
                  "Recorded data: share of annotations hidden behind the replay oracle");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowdsourced multi-label consensus and active querying"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string config_path, out, annotations, truth, features, crowd, strategy;
  int batch = 0;

  CLI::App* consensus = app.add_subcommand("consensus", "Fit and report consensus labels");
  CLI::App* active = app.add_subcommand("active", "Run the active query loop");
  CLI::App* simulate = app.add_subcommand("simulate", "Write a simulated crowd to a directory");
  CLI::App* sparsity =
      app.add_subcommand("sparsity-sweep", "Consensus accuracy as annotations are removed");
  CLI::App* batches =
      app.add_subcommand("batch-sweep", "Active learning curves for several batch sizes");

  for (CLI::App* cmd : {consensus, active, simulate, sparsity, batches}) {
    add_common(cmd, spec, config_path, out);
    add_simulation(cmd, spec, crowd);
  }
  for (CLI::App* cmd : {consensus, active, sparsity, batches}) {
    add_data(cmd, spec, annotations, truth, features);
    add_repeats(cmd, spec);
  }
  for (CLI::App* cmd : {active, batches}) add_active(cmd, spec, strategy);

  active->add_option("--rounds", spec.rounds, "Query rounds");
  active->add_option("--batch", batch, "Triplets per round");
  sparsity->add_option("--ratios", spec.removal_ratios, "Fractions of annotations removed")
      ->delimiter(',');
  batches->add_option("--batches", spec.batch_sizes, "Batch sizes")->delimiter(',');
  batches->add_option("--budget", spec.query_budget, "Total queries per curve");

  CLI11_PARSE(app, argc, argv);

  try {
    spec.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) amcc::cli::apply_config_file(config_path, spec.config);
    if (batch > 0) spec.config.batch_size = batch;
    if (!annotations.empty()) spec.annotations = annotations;
    if (!truth.empty()) spec.truth = truth;
    if (!features.empty()) spec.features = features;
    if (!crowd.empty()) spec.crowd = amcc::cli::parse_crowd(crowd);
    if (!strategy.empty()) spec.strategy = amcc::parse_strategy(strategy);
    if (!out.empty()) spec.out = out;
    if ((spec.truth || spec.features) && !spec.annotations) {
      throw amcc::ConfigError("--truth and --features need --annotations");
    }
    return amcc::cli::run(spec);
  } catch (const amcc::Error& e) {
    std::cerr << "amcc: " << e.what() << "\n";
    return 2;
  }
}
