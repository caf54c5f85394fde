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

#include "skim/patterns.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "skim/errors.h"
#include "skim/random.h"

namespace skim {

namespace {

void ThrowIfAny(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string message;
  for (const std::string& p : problems) {
    if (!message.empty()) message += "; ";
    message += p;
  }
  throw ValidationError(message);
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

void ValidateTaskParams(const EmbeddedTaskParams& p) {
  std::vector<std::string> problems;
  if (p.num_channels < 1) problems.push_back("num_channels must be >= 1");
  if (p.pattern_len < 1) problems.push_back("pattern_len must be >= 1");
  if (p.pattern_spike_count < 1 || p.pattern_spike_count > p.num_channels) {
    problems.push_back("pattern_spike_count must be in [1, num_channels]");
  }
  if (p.stream_len < 1) problems.push_back("stream_len must be >= 1");
  if (p.num_embeddings < 0) problems.push_back("num_embeddings must be >= 0");
  if (!(p.noise_ratio >= 0) || !std::isfinite(p.noise_ratio)) {
    problems.push_back("noise_ratio must be >= 0");
  }
  if (p.target_delay < 0) problems.push_back("target_delay must be >= 0");
  if (p.target_width < 1) problems.push_back("target_width must be >= 1");
  if (!(p.target_amplitude > 0) || !std::isfinite(p.target_amplitude)) {
    problems.push_back("target_amplitude must be > 0");
  }
  const long slot = static_cast<long>(p.pattern_len) + p.target_delay +
                    p.target_width;
  if (problems.empty() &&
      slot * static_cast<long>(p.num_embeddings) > p.stream_len) {
    problems.push_back("stream_len " + std::to_string(p.stream_len) +
                       " cannot hold " + std::to_string(p.num_embeddings) +
                       " embeddings of " + std::to_string(slot) + " steps");
  }
  ThrowIfAny(problems);
}

std::vector<PatternSpike> MakePattern(const EmbeddedTaskParams& params,
                                      uint64_t seed) {
  ValidateTaskParams(params);
  Rng rng = MakeStream(seed, "pattern");
  std::vector<int> channels(static_cast<size_t>(params.num_channels));
  std::iota(channels.begin(), channels.end(), 0);
  std::shuffle(channels.begin(), channels.end(), rng);
  channels.resize(static_cast<size_t>(params.pattern_spike_count));
  std::sort(channels.begin(), channels.end());
  std::vector<PatternSpike> pattern;
  for (int c : channels) {
    pattern.push_back({c, UniformInt(rng, 0, params.pattern_len - 1)});
  }
  return pattern;
}

GeneratedTask GenerateEmbeddedTask(const EmbeddedTaskParams& params,
                                   uint64_t seed) {
  const std::vector<PatternSpike> pattern = MakePattern(params, seed);
  return GenerateEmbeddedTask(params, pattern, seed);
}

GeneratedTask GenerateEmbeddedTask(const EmbeddedTaskParams& params,
                                   std::span<const PatternSpike> pattern,
                                   uint64_t seed) {
  ValidateTaskParams(params);
  if (pattern.empty()) throw ValidationError("pattern has no spikes");
  int last_offset = 0;
  for (const PatternSpike& s : pattern) {
    if (s.channel < 0 || s.channel >= params.num_channels || s.offset < 0 ||
        s.offset >= params.pattern_len) {
      throw ValidationError("pattern spike outside channel/length bounds");
    }
    last_offset = std::max(last_offset, s.offset);
  }

  GeneratedTask out;
  EmbeddedPatternTask& task = out.task;
  task.params = params;
  task.pattern.assign(pattern.begin(), pattern.end());
  out.input = SpikeRaster(params.num_channels, params.stream_len);

  // Embedding starts: a Poisson process conditioned on num_embeddings events
  // in the time left over after reserving one slot per embedding.
  const int slot = task.slot_len();
  const int free_time = params.stream_len - slot * params.num_embeddings;
  Rng embed_rng = MakeStream(seed, "embeddings");
  std::vector<int> starts;
  for (int k = 0; k < params.num_embeddings; ++k) {
    starts.push_back(UniformInt(embed_rng, 0, free_time));
  }
  std::sort(starts.begin(), starts.end());
  for (int k = 0; k < params.num_embeddings; ++k) {
    const int start = starts[k] + k * slot;
    task.pattern_times.push_back(start);
    task.target_times.push_back(start + last_offset + params.target_delay);
    for (const PatternSpike& s : pattern) {
      out.input.Add(s.channel, start + s.offset);
    }
  }

  Rng noise_rng = MakeStream(seed, "noise");
  const double mean = task.expected_noise_count();
  const int count =
      mean > 0 ? std::poisson_distribution<int>(mean)(noise_rng) : 0;
  for (int n = 0; n < count; ++n) {
    const int channel = UniformInt(noise_rng, 0, params.num_channels - 1);
    const int time = UniformInt(noise_rng, 0, params.stream_len - 1);
    if (out.input.Add(channel, time)) {
      task.noise_events.push_back({channel, time});
    }
  }

  const std::vector<int> rows(task.target_times.size(), 0);
  out.target =
      MakeTargetSignal(task.target_times, params.target_width,
                       params.target_amplitude, params.stream_len, 1, rows);
  return out;
}

SomaMatrix MakeTargetSignal(std::span<const int> reference_times, int width,
                            double amplitude, int num_steps, int num_outputs,
                            std::span<const int> rows) {
  if (reference_times.size() != rows.size()) {
    throw DimensionError("need one output row per reference time");
  }
  if (width < 1) throw ValidationError("target width must be >= 1");
  if (num_steps < 0 || num_outputs < 1) {
    throw ValidationError("target signal dimensions must be positive");
  }
  if (!(amplitude > 0) || !std::isfinite(amplitude)) {
    throw ValidationError("target amplitude must be > 0");
  }
  SomaMatrix y = SomaMatrix::Zero(num_outputs, num_steps);
  for (size_t i = 0; i < reference_times.size(); ++i) {
    const int ref = reference_times[i];
    if (ref < 0 || ref + width > num_steps) {
      throw ValidationError("target window [" + std::to_string(ref) + ", " +
                            std::to_string(ref + width) +
                            ") does not fit in " + std::to_string(num_steps) +
                            " steps");
    }
    if (rows[i] < 0 || rows[i] >= num_outputs) {
      throw ValidationError("target row " + std::to_string(rows[i]) +
                            " out of range");
    }
    y.row(rows[i]).segment(ref, width).setConstant(amplitude);
  }
  return y;
}

int WarpTime(int t, double factor) {
  return static_cast<int>(std::round(static_cast<double>(t) * factor));
}

SpikeRaster TimeWarp(const SpikeRaster& raster, double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) {
    throw DomainError("warp factor must be > 0");
  }
  const int steps = static_cast<int>(
      std::ceil(static_cast<double>(raster.num_steps()) * factor));
  SpikeRaster out(raster.num_channels(), steps);
  for (const SpikeEvent& e : raster.events()) {
    out.Add(e.channel, std::min(WarpTime(e.time, factor), steps - 1));
  }
  return out;
}

void ValidateSet(const LabeledRasterSet& set) {
  if (set.labels.size() != set.rasters.size() ||
      set.reference_times.size() != set.rasters.size()) {
    throw DimensionError("labels/reference_times must match raster count");
  }
  for (size_t r = 0; r < set.size(); ++r) {
    const std::string where = "raster " + std::to_string(r) + ": ";
    if (set.rasters[r].num_channels() != set.num_channels()) {
      throw ValidationError(where + "channel count differs from the set");
    }
    if (set.labels[r] < 0) throw ValidationError(where + "negative label");
    if (set.reference_times[r] < 0 ||
        set.reference_times[r] >= std::max(1, set.rasters[r].num_steps())) {
      throw ValidationError(where + "reference time outside raster span");
    }
  }
}

std::vector<double> WarpFactors(double warp_min, double warp_max, int steps) {
  if (!(warp_min > 0) || !(warp_min <= warp_max) || !std::isfinite(warp_max)) {
    throw ValidationError("warp range must satisfy 0 < min <= max");
  }
  if (steps < 1) throw ValidationError("warp steps must be >= 1");
  if (steps == 1) return {(warp_min + warp_max) / 2.0};
  std::vector<double> factors;
  for (int s = 0; s < steps; ++s) {
    factors.push_back(warp_min + (warp_max - warp_min) * s / (steps - 1));
  }
  return factors;
}

LabeledRasterSet AugmentTrainingSet(const LabeledRasterSet& exemplars,
                                    double warp_min, double warp_max,
                                    int steps) {
  ValidateSet(exemplars);
  const std::vector<double> factors = WarpFactors(warp_min, warp_max, steps);
  LabeledRasterSet out;
  for (size_t r = 0; r < exemplars.size(); ++r) {
    for (double f : factors) {
      SpikeRaster warped = TimeWarp(exemplars.rasters[r], f);
      const int ref = std::min(WarpTime(exemplars.reference_times[r], f),
                               std::max(0, warped.num_steps() - 1));
      out.rasters.push_back(std::move(warped));
      out.labels.push_back(exemplars.labels[r]);
      out.reference_times.push_back(ref);
    }
  }
  return out;
}

TrainingSet SingleStream(const GeneratedTask& task) {
  TrainingSet set;
  set.inputs.push_back(task.input);
  set.targets.push_back(task.target);
  return set;
}

LabeledRasterSet PadToWindows(LabeledRasterSet set, int width) {
  if (width < 1) throw ValidationError("window width must be >= 1");
  for (size_t r = 0; r < set.rasters.size() && r < set.reference_times.size();
       ++r) {
    const int end = set.reference_times[r] + width;
    if (end > set.rasters[r].num_steps()) set.rasters[r].SetNumSteps(end);
  }
  return set;
}

TrainingSet TrainingSetFromLabeled(const LabeledRasterSet& set,
                                   int num_outputs, int width,
                                   double amplitude) {
  ValidateSet(set);
  const LabeledRasterSet padded = PadToWindows(set, width);
  TrainingSet out;
  for (size_t r = 0; r < padded.size(); ++r) {
    if (padded.labels[r] >= num_outputs) {
      throw ValidationError("label " + std::to_string(padded.labels[r]) +
                            " has no output neuron");
    }
    SpikeRaster raster = padded.rasters[r];
    const int ref = padded.reference_times[r];
    const int refs[] = {ref};
    const int rows[] = {set.labels[r]};
    out.targets.push_back(MakeTargetSignal(refs, width, amplitude,
                                           raster.num_steps(), num_outputs,
                                           rows));
    out.inputs.push_back(std::move(raster));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic digit corpus

namespace {

struct DigitTemplate {
  std::vector<bool> present;
  std::vector<double> mean_time;
};

SpikeRaster Utter(const DigitTemplate& tmpl, const DigitCorpusParams& p,
                  double warp, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, p.jitter_sd);
  while (true) {
    SpikeRaster r(p.num_channels, p.num_steps);
    const double shift = UniformOpen(rng, -p.onset_shift, p.onset_shift);
    for (int c = 0; c < p.num_channels; ++c) {
      if (!tmpl.present[c]) continue;
      const bool dropped = unit(rng) < p.drop_prob;
      const double t = tmpl.mean_time[c] * warp + shift + jitter(rng);
      if (dropped) continue;
      const long step = std::lround(t);
      if (step >= 0 && step < p.num_steps) r.Add(c, static_cast<int>(step));
    }
    if (!r.empty()) return r;
  }
}

void AppendUtterance(LabeledRasterSet& set, SpikeRaster raster, int label) {
  set.reference_times.push_back(raster.LastSpikeTime());
  set.rasters.push_back(std::move(raster));
  set.labels.push_back(label);
}

}  // namespace

DigitCorpus GenerateDigitCorpus(const DigitCorpusParams& p, uint64_t seed) {
  std::vector<std::string> problems;
  if (p.num_classes < 1) problems.push_back("num_classes must be >= 1");
  if (p.num_channels < 1) problems.push_back("num_channels must be >= 1");
  if (p.num_steps < 1) problems.push_back("num_steps must be >= 1");
  if (!(p.channel_presence > 0 && p.channel_presence <= 1)) {
    problems.push_back("channel_presence must be in (0, 1]");
  }
  if (p.earliest_event < 0 || p.latest_event < p.earliest_event ||
      p.latest_event >= p.num_steps) {
    problems.push_back("event window must lie inside [0, num_steps)");
  }
  if (!(p.jitter_sd >= 0) || !(p.onset_shift >= 0)) {
    problems.push_back("jitter_sd and onset_shift must be >= 0");
  }
  if (!(p.drop_prob >= 0 && p.drop_prob < 1)) {
    problems.push_back("drop_prob must be in [0, 1)");
  }
  if (!(p.speaker_warp_min > 0 && p.speaker_warp_min <= p.speaker_warp_max)) {
    problems.push_back("speaker warp range must satisfy 0 < min <= max");
  }
  if (p.utterances_per_class < 0) {
    problems.push_back("utterances_per_class must be >= 0");
  }
  ThrowIfAny(problems);

  Rng template_rng = MakeStream(seed, "digit_templates");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<DigitTemplate> templates;
  for (int k = 0; k < p.num_classes; ++k) {
    DigitTemplate t;
    for (int c = 0; c < p.num_channels; ++c) {
      t.present.push_back(unit(template_rng) < p.channel_presence);
      t.mean_time.push_back(
          UniformOpen(template_rng, p.earliest_event, p.latest_event));
    }
    // Every class needs at least one channel that can fire.
    if (std::none_of(t.present.begin(), t.present.end(),
                     [](bool b) { return b; })) {
      t.present[UniformInt(template_rng, 0, p.num_channels - 1)] = true;
    }
    templates.push_back(std::move(t));
  }

  DigitCorpus corpus;
  Rng exemplar_rng = MakeStream(seed, "digit_exemplars");
  for (int k = 0; k < p.num_classes; ++k) {
    AppendUtterance(corpus.exemplars, Utter(templates[k], p, 1.0, exemplar_rng),
                    k);
  }
  Rng test_rng = MakeStream(seed, "digit_test");
  for (int k = 0; k < p.num_classes; ++k) {
    for (int u = 0; u < p.utterances_per_class; ++u) {
      const double warp =
          UniformOpen(test_rng, p.speaker_warp_min, p.speaker_warp_max);
      AppendUtterance(corpus.test, Utter(templates[k], p, warp, test_rng), k);
    }
  }
  return corpus;
}

}  // namespace skim
