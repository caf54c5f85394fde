// Copyright 2026 The SKIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run configuration and subcommands.

#ifndef SKIM_CLI_H_
#define SKIM_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skim/io.h"
#include "skim/network.h"
#include "skim/patterns.h"
#include "skim/training.h"

namespace skim {

enum class TaskType { kEmbedded, kDataset };

struct TaskConfig {
  TaskType type = TaskType::kEmbedded;
  // Training stream. Target geometry comes from TrainingConfig.
  EmbeddedTaskParams embedded;
  // Held-out stream with the same pattern.
  int test_embeddings = 60;
  int test_stream_len = 26000;
  // Raster-set files for TaskType::kDataset.
  std::string train_path;
  std::string test_path;
};

struct TrainingConfig {
  SolverKind solver = SolverKind::kBatch;
  double ridge = kDefaultRidge;
  std::optional<double> tolerance;
  double target_amplitude = 2.0;
  int target_width = 10;
  int target_delay = 20;
  // Dataset tasks: replicate each training raster over a warp range.
  bool augment = false;
  double warp_min = kDefaultWarpMin;
  double warp_max = kDefaultWarpMax;
  int warp_steps = kDefaultWarpSteps;
};

struct PruneConfig {
  std::string strategy = "two_pass";  // or "iterative"
  int keep = 40;
  double discard_fraction = 0.5;
  int rounds = 1;
};

struct OutputConfig {
  std::string dir = "skim_out";
  bool traces = true;
  // Leading dendrites included in activations.csv; all when unset.
  std::optional<int> trace_dendrites = 8;
  // Network read by test/prune; defaults to <dir>/network.json.
  std::string network_in;
};

struct RunConfig {
  uint64_t seed = 1;
  NetworkConfig network;
  TaskConfig task;
  TrainingConfig training;
  PruneConfig prune;
  OutputConfig output;

  EmbeddedTaskParams TrainTaskParams() const;
  EmbeddedTaskParams TestTaskParams() const;
  TrainOptions train_options() const;
  std::filesystem::path NetworkInPath() const;
};

// The configuration the defaults describe, with derived fields filled in.
RunConfig DefaultRunConfig();

// Overlays `doc` on the defaults. Unknown keys and type mismatches are
// collected; throws ValidationError listing every problem.
RunConfig RunConfigFromJson(const Json& doc);
Json RunConfigToJson(const RunConfig& config);

// Copies seed/amplitude into the network section and checks every section
// against module preconditions. Throws ValidationError listing all
// violations.
// `command` selects which inputs must exist ("demo", "train", "test",
// "prune").
void FinalizeRunConfig(RunConfig& config, std::string_view command);

// Subcommands. Each validates fully before writing anything and returns the
// process exit status; messages go to `out` / `err`.
int CmdDemo(const RunConfig& config, std::ostream& out);
int CmdTrain(const RunConfig& config, std::ostream& out);
int CmdTest(const RunConfig& config, std::ostream& out);
int CmdPrune(const RunConfig& config, std::ostream& out);
int CmdKernels(std::ostream& out);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point: parses arguments, dispatches, maps errors to exit codes.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace skim

#endif  // SKIM_CLI_H_
