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

#include "skim/eval.h"

#include <algorithm>
#include <limits>
#include <string>

#include "skim/errors.h"
#include "skim/file_util.h"

namespace skim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool AnySpike(const SpikeMatrix& spikes, Eigen::Index row, long begin,
              long end) {
  begin = std::max<long>(begin, 0);
  end = std::min<long>(end, spikes.cols());
  for (long t = begin; t < end; ++t) {
    if (spikes(row, t)) return true;
  }
  return false;
}

void AppendRow(std::string& out, long time, const Eigen::MatrixXd& m,
               Eigen::Index col, std::span<const int> rows) {
  out += std::to_string(time);
  for (int r : rows) {
    out += ',';
    out += FormatFloat(m(r, col));
  }
  out += '\n';
}

std::vector<int> AllRows(Eigen::Index n) {
  std::vector<int> rows(static_cast<size_t>(n));
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return rows;
}

std::string MatrixCsv(const Eigen::MatrixXd* m, const char* prefix,
                      std::span<const int> rows) {
  std::string out = "time";
  for (int r : rows) out += "," + std::string(prefix) + std::to_string(r);
  out += '\n';
  if (m == nullptr) return out;
  for (Eigen::Index t = 0; t < m->cols(); ++t) AppendRow(out, t, *m, t, rows);
  return out;
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  true_negatives += other.true_negatives;
  return *this;
}

WillsResult WillsError(const ConfusionCounts& c) {
  if (c.true_positives < 0 || c.false_positives < 0 ||
      c.false_negatives < 0 || c.true_negatives < 0) {
    throw ValidationError("confusion counts must be nonnegative");
  }
  WillsResult result;
  double miss = 0.0;
  if (c.true_positives > 0) {
    miss = static_cast<double>(c.false_negatives) /
           static_cast<double>(c.true_positives);
  } else if (c.false_negatives > 0) {
    miss = kInf;
    result.tp_degenerate = true;
  }
  double false_alarm = 0.0;
  if (c.true_negatives > 0) {
    false_alarm = static_cast<double>(c.false_positives) /
                  static_cast<double>(c.true_negatives);
  } else if (c.false_positives > 0) {
    false_alarm = kInf;
    result.tn_degenerate = true;
  }
  result.value = miss + false_alarm;
  return result;
}

double RateError(const ConfusionCounts& c) {
  double error = 0.0;
  if (c.positives() > 0) {
    error += static_cast<double>(c.false_negatives) /
             static_cast<double>(c.positives());
  }
  if (c.negatives() > 0) {
    error += static_cast<double>(c.false_positives) /
             static_cast<double>(c.negatives());
  }
  return error;
}

double DetectionRate(const ConfusionCounts& c) {
  if (c.positives() <= 0) throw DegenerateError("no target presentations");
  return static_cast<double>(c.true_positives) /
         static_cast<double>(c.positives());
}

ConfusionCounts MatchPresentations(std::span<const SpikeMatrix> outputs,
                                   const LabeledRasterSet& set,
                                   int target_class, int window_width) {
  if (outputs.size() != set.size() || set.labels.size() != set.size() ||
      set.reference_times.size() != set.size()) {
    throw DimensionError("outputs must align one-to-one with the raster set");
  }
  if (window_width < 1) throw ValidationError("window width must be >= 1");
  if (target_class < 0) throw ValidationError("target class must be >= 0");
  ConfusionCounts counts;
  for (size_t r = 0; r < outputs.size(); ++r) {
    const SpikeMatrix& out = outputs[r];
    const Eigen::Index row = out.rows() == 1 ? 0 : target_class;
    if (row >= out.rows()) {
      throw DimensionError("output matrix has no row for class " +
                           std::to_string(target_class));
    }
    if (set.labels[r] == target_class) {
      const long ref = set.reference_times[r];
      if (AnySpike(out, row, ref, ref + window_width)) {
        ++counts.true_positives;
      } else {
        ++counts.false_negatives;
      }
    } else if (AnySpike(out, row, 0, out.cols())) {
      ++counts.false_positives;
    } else {
      ++counts.true_negatives;
    }
  }
  return counts;
}

ClassScores ScoreClasses(std::span<const SpikeMatrix> outputs,
                         const LabeledRasterSet& set, int window_width) {
  if (outputs.empty()) throw ValidationError("nothing to score");
  const int classes = static_cast<int>(outputs.front().rows());
  ClassScores scores;
  double total = 0.0;
  for (int c = 0; c < classes; ++c) {
    scores.counts.push_back(
        MatchPresentations(outputs, set, c, window_width));
    scores.errors.push_back(WillsError(scores.counts.back()));
    total += scores.errors.back().value;
  }
  scores.mean_error = total / classes;
  return scores;
}

std::vector<SpikeMatrix> RunPresentations(
    const SkimNetwork& net, std::span<const SpikeRaster> inputs) {
  ForwardOptions options;
  options.require_output = true;
  std::vector<SpikeMatrix> outputs;
  outputs.reserve(inputs.size());
  for (const SpikeRaster& raster : inputs) {
    outputs.push_back(*Forward(net, raster, options).output_spikes);
  }
  return outputs;
}

ConfusionCounts MatchStream(const SpikeMatrix& output,
                            const EmbeddedPatternTask& task) {
  if (output.rows() < 1) throw DimensionError("stream output has no rows");
  if (output.cols() != task.params.stream_len) {
    throw DimensionError("stream output length differs from the task");
  }
  const int width = task.params.target_width;
  const long slot = task.slot_len();
  ConfusionCounts counts;
  long gap_start = 0;
  auto score_gap = [&](long begin, long end) {
    for (long t = begin; t + slot <= end; t += slot) {
      if (AnySpike(output, 0, t, t + slot)) {
        ++counts.false_positives;
      } else {
        ++counts.true_negatives;
      }
    }
  };
  for (size_t k = 0; k < task.pattern_times.size(); ++k) {
    const long start = task.pattern_times[k];
    const long ref = task.target_times[k];
    score_gap(gap_start, start);
    if (AnySpike(output, 0, ref, ref + width)) {
      ++counts.true_positives;
    } else {
      ++counts.false_negatives;
    }
    gap_start = start + slot;
  }
  score_gap(gap_start, output.cols());
  return counts;
}

void ExportTraces(const ForwardTrace& trace, const SpikeRaster& input,
                  const SomaMatrix& target, const std::filesystem::path& dir,
                  std::optional<std::vector<int>> dendrites) {
  const Eigen::Index steps = trace.activations.cols();
  if (input.num_steps() != steps) {
    throw DimensionError("input raster and trace lengths differ");
  }
  if (target.size() > 0 && target.cols() != steps) {
    throw DimensionError("target and trace lengths differ");
  }
  if (trace.soma && trace.soma->cols() != steps) {
    throw DimensionError("soma and trace lengths differ");
  }
  std::vector<int> rows =
      dendrites ? *dendrites : AllRows(trace.activations.rows());
  for (int j : rows) {
    if (j < 0 || j >= trace.activations.rows()) {
      throw DimensionError("dendrite index " + std::to_string(j) +
                           " out of range");
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }

  std::string events = "channel,time\n";
  std::vector<SpikeEvent> sorted = input.events();
  std::sort(sorted.begin(), sorted.end(),
            [](const SpikeEvent& a, const SpikeEvent& b) {
              return a.channel != b.channel ? a.channel < b.channel
                                            : a.time < b.time;
            });
  for (const SpikeEvent& e : sorted) {
    events += std::to_string(e.channel) + "," + std::to_string(e.time) + "\n";
  }

  const Eigen::Index outputs = trace.soma ? trace.soma->rows() : 0;
  std::string spikes = "output,time\n";
  if (trace.output_spikes) {
    for (Eigen::Index n = 0; n < trace.output_spikes->rows(); ++n) {
      for (Eigen::Index t = 0; t < trace.output_spikes->cols(); ++t) {
        if ((*trace.output_spikes)(n, t)) {
          spikes += std::to_string(n) + "," + std::to_string(t) + "\n";
        }
      }
    }
  }

  WriteFileAtomic(dir / "input_events.csv", events);
  WriteFileAtomic(dir / "activations.csv",
                  MatrixCsv(&trace.activations, "a", rows));
  WriteFileAtomic(dir / "soma.csv",
                  MatrixCsv(trace.soma ? &*trace.soma : nullptr, "y",
                            AllRows(outputs)));
  WriteFileAtomic(dir / "output_spikes.csv", spikes);
  WriteFileAtomic(dir / "target.csv",
                  MatrixCsv(target.size() > 0 ? &target : nullptr, "y",
                            AllRows(target.rows())));
}

}  // namespace skim
