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

// Experiment commands behind the `amcc` executable.

#ifndef AMCC_TOOLS_CLI_HPP_
#define AMCC_TOOLS_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amcc/active.hpp"
#include "amcc/sim.hpp"
#include "amcc/types.hpp"

namespace amcc::cli {

enum class CrowdPreset { kGradedSpammers, kArchetypes, kNoiseless };

std::string_view to_string(CrowdPreset preset);
CrowdPreset parse_crowd(std::string_view name);

struct ExperimentSpec {
  std::string command;
  AmccConfig config;

  // Recorded data; simulation is used when `annotations` is unset.
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> truth;
  std::optional<std::filesystem::path> features;
  int min_annotations = 1;
  double holdout = 0.5;  // active on recorded data: share hidden behind the replay oracle

  CrowdPreset crowd = CrowdPreset::kGradedSpammers;
  CrowdOptions simulation;
  int noiseless_workers = 5;

  std::uint64_t seed = 0;
  int repeats = 1;
  int rounds = 20;
  Strategy strategy = Strategy::kAmcc;
  bool majority_vote = true;
  std::vector<double> removal_ratios = {0.0, 0.1, 0.2, 0.3, 0.5};
  std::vector<int> batch_sizes = {2, 5, 10, 25};
  int query_budget = 100;

  std::optional<std::filesystem::path> out;
};

// Overlays a JSON config file whose keys name AmccConfig fields.
void apply_config_file(const std::filesystem::path& path, AmccConfig& config);

nlohmann::json config_to_json(const AmccConfig& config);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

// Each command returns its output document; `run` writes it.
nlohmann::json cmd_consensus(const ExperimentSpec& spec);
nlohmann::json cmd_active(const ExperimentSpec& spec);
nlohmann::json cmd_simulate(const ExperimentSpec& spec);
nlohmann::json cmd_sparsity_sweep(const ExperimentSpec& spec);
nlohmann::json cmd_batch_sweep(const ExperimentSpec& spec);

// Dispatches on spec.command and writes the document to spec.out (stdout
// when unset). A ".csv" output gets the command's table with the resolved
// spec in a sibling "<out>.spec.json". Returns the process exit code.
int run(const ExperimentSpec& spec);

}  // namespace amcc::cli

#endif  // AMCC_TOOLS_CLI_HPP_
