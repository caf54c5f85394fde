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

// Scoring of network outputs and trace export.

#ifndef SKIM_EVAL_H_
#define SKIM_EVAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "skim/network.h"
#include "skim/patterns.h"

namespace skim {

struct ConfusionCounts {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
  long true_negatives = 0;

  long positives() const { return true_positives + false_negatives; }
  long negatives() const { return false_positives + true_negatives; }

  ConfusionCounts& operator+=(const ConfusionCounts& other);
  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

struct WillsResult {
  double value = 0.0;
  // Set when TP (resp. TN) is zero and FN (resp. FP) is not; value is +inf.
  bool tp_degenerate = false;
  bool tn_degenerate = false;

  bool degenerate() const { return tp_degenerate || tn_degenerate; }
};

// FN/TP + FP/TN. A zero denominator contributes 0 when its numerator is
// also zero and +inf (flagged) otherwise.
WillsResult WillsError(const ConfusionCounts& counts);

// FN/positives + FP/negatives, with empty classes contributing 0. Not the
// competition metric; provided for comparison.
double RateError(const ConfusionCounts& counts);

// TP / positives. Throws DegenerateError when there are no positives.
double DetectionRate(const ConfusionCounts& counts);

// Scores one output neuron over a set of presentations. `outputs[r]` is the
// N x K_r spike matrix for set.rasters[r]; row `target_class` is read (row 0
// for single-output matrices). A target raster is a TP when it spikes in
// [ref, ref + window_width); any spike in a non-target raster is an FP.
ConfusionCounts MatchPresentations(std::span<const SpikeMatrix> outputs,
                                   const LabeledRasterSet& set,
                                   int target_class, int window_width);

struct ClassScores {
  std::vector<ConfusionCounts> counts;  // one per class
  std::vector<WillsResult> errors;
  // Mean of the per-class errors (+inf if any is degenerate).
  double mean_error = 0.0;
};

// Per-output scoring for a multi-class network with one output per class.
ClassScores ScoreClasses(std::span<const SpikeMatrix> outputs,
                         const LabeledRasterSet& set, int window_width);

// Runs the trained network over every raster (state reset between rasters).
std::vector<SpikeMatrix> RunPresentations(const SkimNetwork& net,
                                          std::span<const SpikeRaster> inputs);

// Scores a continuous stream against its embedded-pattern task. Each
// embedding slot [start, start + slot_len()) is one target presentation: TP
// when output row 0 spikes inside the target window. The stretches between slots
// are cut into whole chunks of slot_len() steps (a shorter remainder is
// dropped); a chunk holding any spike is an FP, otherwise a TN. Spikes in a
// slot but outside its target window are not scored.
ConfusionCounts MatchStream(const SpikeMatrix& output,
                            const EmbeddedPatternTask& task);

// Plot-ready CSVs written into `dir` (created if needed):
//   input_events.csv   channel,time
//   activations.csv    time,a<j>...   (all dendrites, or `dendrites`)
//   soma.csv           time,y<n>...
//   output_spikes.csv  output,time
//   target.csv         time,y<n>...
// Soma/spike files are header-only when the trace has no soma output.
// Throws DimensionError on inconsistent shapes and IoError on write failure.
void ExportTraces(const ForwardTrace& trace, const SpikeRaster& input,
                  const SomaMatrix& target, const std::filesystem::path& dir,
                  std::optional<std::vector<int>> dendrites = std::nullopt);

}  // namespace skim

#endif  // SKIM_EVAL_H_
