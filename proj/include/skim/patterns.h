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

// Synthetic tasks, target shaping, time-warp augmentation and spike-file
// ingestion.

#ifndef SKIM_PATTERNS_H_
#define SKIM_PATTERNS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "skim/network.h"

namespace skim {

// ---------------------------------------------------------------------------
// Embedded pattern in Poisson noise

struct PatternSpike {
  int channel = 0;
  int offset = 0;

  friend bool operator==(const PatternSpike&, const PatternSpike&) = default;
};

struct EmbeddedTaskParams {
  int num_channels = 4;
  int pattern_len = 200;
  int pattern_spike_count = 4;
  int stream_len = 43000;
  int num_embeddings = 100;
  // Expected noise spikes per pattern spike.
  double noise_ratio = 1.0;
  int target_delay = 20;
  int target_width = 10;
  double target_amplitude = 1.0;

  friend bool operator==(const EmbeddedTaskParams&,
                         const EmbeddedTaskParams&) = default;
};

// Throws ValidationError listing every violated field (including geometry
// that cannot fit num_embeddings into stream_len).
void ValidateTaskParams(const EmbeddedTaskParams& params);

struct EmbeddedPatternTask {
  EmbeddedTaskParams params;
  std::vector<PatternSpike> pattern;
  std::vector<int> pattern_times;      // embedding start times
  std::vector<int> target_times;       // start of each target window
  std::vector<SpikeEvent> noise_events;

  // Timesteps one embedding plus its target window may occupy; successive
  // embeddings start at least this far apart.
  int slot_len() const {
    return params.pattern_len + params.target_delay + params.target_width;
  }
  double expected_noise_count() const {
    return params.noise_ratio * params.pattern_spike_count *
           params.num_embeddings;
  }
};

struct GeneratedTask {
  SpikeRaster input;
  SomaMatrix target;  // 1 x stream_len
  EmbeddedPatternTask task;
};

// A random pattern: pattern_spike_count distinct channels, one spike each at
// an offset in [0, pattern_len).
std::vector<PatternSpike> MakePattern(const EmbeddedTaskParams& params,
                                      uint64_t seed);

// Draws the pattern from `seed` and embeds it.
GeneratedTask GenerateEmbeddedTask(const EmbeddedTaskParams& params,
                                   uint64_t seed);
// Embeds a given pattern; used for held-out streams of the same pattern.
GeneratedTask GenerateEmbeddedTask(const EmbeddedTaskParams& params,
                                   std::span<const PatternSpike> pattern,
                                   uint64_t seed);

// ---------------------------------------------------------------------------
// Targets and warping

// N x num_steps signal, `amplitude` over [ref, ref + width) on row
// rows[i] for each reference_times[i]; overlapping windows merge.
SomaMatrix MakeTargetSignal(std::span<const int> reference_times, int width,
                            double amplitude, int num_steps, int num_outputs,
                            std::span<const int> rows);

// Maps each event time t to round(t * factor) (half away from zero) in a
// raster of ceil(K * factor) steps; events landing on the same
// (channel, time) merge.
SpikeRaster TimeWarp(const SpikeRaster& raster, double factor);
int WarpTime(int t, double factor);

struct LabeledRasterSet {
  std::vector<SpikeRaster> rasters;
  std::vector<int> labels;
  // Timestep each raster's target spike is anchored to.
  std::vector<int> reference_times;

  size_t size() const { return rasters.size(); }
  bool empty() const { return rasters.empty(); }
  int num_channels() const {
    return rasters.empty() ? 0 : rasters.front().num_channels();
  }
};

// Throws ValidationError if channel counts differ, labels are negative or a
// reference time lies outside its raster.
void ValidateSet(const LabeledRasterSet& set);

// `steps` evenly spaced warp factors over [warp_min, warp_max]; a single step
// uses the midpoint.
std::vector<double> WarpFactors(double warp_min, double warp_max, int steps);

inline constexpr double kDefaultWarpMin = 0.76;
inline constexpr double kDefaultWarpMax = 1.24;
inline constexpr int kDefaultWarpSteps = 7;

// Every exemplar replicated at each warp factor (exemplar-major order).
LabeledRasterSet AugmentTrainingSet(const LabeledRasterSet& exemplars,
                                    double warp_min = kDefaultWarpMin,
                                    double warp_max = kDefaultWarpMax,
                                    int steps = kDefaultWarpSteps);

// ---------------------------------------------------------------------------
// Training data

// Presentations plus the soma values they should produce.
struct TrainingSet {
  std::vector<SpikeRaster> inputs;
  std::vector<SomaMatrix> targets;  // one N x K_r block per input
  // Carry dendritic state across presentations.
  bool streaming = false;
};

TrainingSet SingleStream(const GeneratedTask& task);

// Pads every raster with silence so [ref, ref + width) fits inside it.
LabeledRasterSet PadToWindows(LabeledRasterSet set, int width);

// Targets `amplitude` over [ref, ref + width) on the row of each raster's
// label. Rasters too short for their window are padded with silence.
TrainingSet TrainingSetFromLabeled(const LabeledRasterSet& set,
                                   int num_outputs, int width,
                                   double amplitude);

// ---------------------------------------------------------------------------
// Synthetic multi-class corpus shaped like sparse spoken-digit encodings:
// each class has a template with at most one spike per channel, and every
// utterance jitters, drops and time-warps that template.

struct DigitCorpusParams {
  int num_classes = 10;
  int num_channels = 40;
  int num_steps = 1000;
  double channel_presence = 0.8;
  int earliest_event = 100;
  int latest_event = 700;
  double jitter_sd = 10.0;
  double drop_prob = 0.1;
  double onset_shift = 30.0;
  // Per-utterance cadence range.
  double speaker_warp_min = kDefaultWarpMin;
  double speaker_warp_max = kDefaultWarpMax;
  int utterances_per_class = 50;
};

struct DigitCorpus {
  // One unwarped utterance per class.
  LabeledRasterSet exemplars;
  // utterances_per_class per class, class-major.
  LabeledRasterSet test;
};

DigitCorpus GenerateDigitCorpus(const DigitCorpusParams& params,
                                uint64_t seed);

// ---------------------------------------------------------------------------
// Text formats
//
// Raster file:      "L K" header, then one "channel time" line per event.
// Raster-set file:  "L K count" header; per raster a line
//                   "raster <idx> label <c> ref <t> events <n>" (optionally
//                   followed by "steps <k>" when its span differs from K),
//                   then n "channel time" lines.

SpikeRaster ReadRaster(std::istream& in);
void WriteRaster(const SpikeRaster& raster, std::ostream& out);
SpikeRaster LoadRaster(const std::filesystem::path& path);
void SaveRaster(const SpikeRaster& raster, const std::filesystem::path& path);

LabeledRasterSet ReadRasterSet(std::istream& in);
void WriteRasterSet(const LabeledRasterSet& set, std::ostream& out);
LabeledRasterSet LoadRasterSet(const std::filesystem::path& path);
void SaveRasterSet(const LabeledRasterSet& set,
                   const std::filesystem::path& path);

}  // namespace skim

#endif  // SKIM_PATTERNS_H_
