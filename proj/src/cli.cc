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

#include "skim/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "skim/errors.h"
#include "skim/eval.h"
#include "skim/file_util.h"
#include "skim/pruning.h"
#include "skim/random.h"

namespace skim {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config reading with problem collection

class FieldReader {
 public:
  FieldReader(const Json* doc, std::string prefix,
              std::vector<std::string>* problems)
      : doc_(doc), prefix_(std::move(prefix)), problems_(problems) {
    if (doc_ != nullptr && !doc_->is_object()) {
      problems_->push_back(prefix_ + ": must be an object");
      doc_ = nullptr;
    }
  }

  void Read(const char* key, int& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_number_integer() ||
        v->get<long long>() < std::numeric_limits<int>::min() ||
        v->get<long long>() > std::numeric_limits<int>::max()) {
      Problem(key, "must be an integer");
      return;
    }
    out = v->get<int>();
  }

  void Read(const char* key, uint64_t& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_number_unsigned()) {
      Problem(key, "must be a nonnegative integer");
      return;
    }
    out = v->get<uint64_t>();
  }

  void Read(const char* key, double& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_number()) {
      Problem(key, "must be a number");
      return;
    }
    out = v->get<double>();
  }

  void Read(const char* key, bool& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_boolean()) {
      Problem(key, "must be true or false");
      return;
    }
    out = v->get<bool>();
  }

  void Read(const char* key, std::string& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_string()) {
      Problem(key, "must be a string");
      return;
    }
    out = v->get<std::string>();
  }

  void Read(const char* key, ParamRange& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() ||
        !(*v)[1].is_number()) {
      Problem(key, "must be [lo, hi]");
      return;
    }
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void Read(const char* key, std::optional<double>& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
    } else if (v->is_number()) {
      out = v->get<double>();
    } else {
      Problem(key, "must be a number or null");
    }
  }

  void Read(const char* key, std::optional<int>& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
    } else if (v->is_number_integer()) {
      out = v->get<int>();
    } else {
      Problem(key, "must be an integer or null");
    }
  }

  void Read(const char* key, std::optional<std::vector<double>>& out) {
    const Json* v = Get(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    if (!v->is_array()) {
      Problem(key, "must be an array of numbers");
      return;
    }
    std::vector<double> values;
    for (const Json& x : *v) {
      if (!x.is_number()) {
        Problem(key, "must be an array of numbers");
        return;
      }
      values.push_back(x.get<double>());
    }
    out = std::move(values);
  }

  void ReadKind(const char* key, KernelKind& out) {
    std::string name;
    const size_t before = problems_->size();
    Read(key, name);
    if (problems_->size() != before || name.empty()) return;
    try {
      out = ParseKernelKind(name);
    } catch (const ParseError& e) {
      Problem(key, e.what());
    }
  }

  // Object-valued child; nullptr when absent.
  const Json* Child(const char* key) { return Get(key); }

  std::string Prefix(const char* key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  // Reports keys that no Read() consumed.
  void Finish() {
    if (doc_ == nullptr) return;
    for (auto it = doc_->begin(); it != doc_->end(); ++it) {
      if (!known_.contains(it.key())) Problem(it.key().c_str(), "unknown key");
    }
  }

 private:
  const Json* Get(const char* key) {
    known_.insert(key);
    if (doc_ == nullptr || !doc_->contains(key)) return nullptr;
    return &doc_->at(key);
  }

  void Problem(const char* key, const std::string& message) {
    problems_->push_back(Prefix(key) + ": " + message);
  }

  const Json* doc_;
  std::string prefix_;
  std::vector<std::string>* problems_;
  std::set<std::string> known_;
};

std::string JoinProblems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const std::string& p : problems) out += "\n  " + p;
  return out;
}

void ThrowIfAny(const std::vector<std::string>& problems) {
  if (!problems.empty()) throw ValidationError(JoinProblems(problems));
}

// Runs a validator and records its message instead of throwing.
template <typename F>
void Collect(std::vector<std::string>& problems, const std::string& section,
             F&& check) {
  try {
    check();
  } catch (const Error& e) {
    problems.push_back(section + ": " + e.what());
  }
}

void ReadFamily(FieldReader& parent, const char* key, KernelFamily& family,
                std::vector<std::string>& problems) {
  const Json* doc = parent.Child(key);
  if (doc == nullptr) return;
  FieldReader r(doc, parent.Prefix(key), &problems);
  r.ReadKind("kind", family.kind);
  r.Read("tau", family.tau);
  r.Read("delta_t", family.delta_t);
  r.Read("omega", family.omega);
  r.Read("sigma", family.sigma);
  r.Read("logistic_gain", family.logistic_gain);
  r.Read("custom_table", family.custom_table);
  r.Finish();
}

std::string TaskTypeName(TaskType type) {
  return type == TaskType::kEmbedded ? "embedded" : "dataset";
}

// ---------------------------------------------------------------------------
// Artifacts

// Files are staged in memory and written only once every step succeeded.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void Add(const std::string& name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }

  void Commit() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    }
    for (const auto& [name, contents] : files_) {
      WriteFileAtomic(dir_ / name, contents);
    }
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string RasterText(const SpikeRaster& raster) {
  std::ostringstream out;
  WriteRaster(raster, out);
  return out.str();
}

Json CountsToJson(const ConfusionCounts& c) {
  Json doc;
  doc["true_positives"] = c.true_positives;
  doc["false_positives"] = c.false_positives;
  doc["false_negatives"] = c.false_negatives;
  doc["true_negatives"] = c.true_negatives;
  return doc;
}

Json ScoreToJson(const ConfusionCounts& c) {
  Json doc = CountsToJson(c);
  const WillsResult wills = WillsError(c);
  doc["detection_rate"] =
      c.positives() > 0 ? NumberOrNull(DetectionRate(c)) : Json(nullptr);
  doc["wills_error"] = NumberOrNull(wills.value);
  doc["wills_tp_degenerate"] = wills.tp_degenerate;
  doc["wills_tn_degenerate"] = wills.tn_degenerate;
  doc["rate_error"] = RateError(c);
  return doc;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

struct PreparedData {
  TrainingSet train;
  // Embedded tasks.
  std::optional<GeneratedTask> train_task;
  std::optional<GeneratedTask> test_task;
  // Dataset tasks.
  std::optional<LabeledRasterSet> test_set;
};

GeneratedTask TrainStream(const RunConfig& config) {
  return GenerateEmbeddedTask(config.TrainTaskParams(),
                              DeriveSeed(config.seed, "task"));
}

GeneratedTask TestStream(const RunConfig& config,
                         const std::vector<PatternSpike>& pattern) {
  return GenerateEmbeddedTask(config.TestTaskParams(), pattern,
                              DeriveSeed(config.seed, "test_stream"));
}

void RequireChannels(int expected, int actual, const std::string& what) {
  if (expected != actual) {
    throw DimensionError(what + " has " + std::to_string(actual) +
                         " channels but the network expects " +
                         std::to_string(expected));
  }
}

PreparedData PrepareData(const RunConfig& config, bool need_train,
                         bool need_test) {
  PreparedData data;
  if (config.task.type == TaskType::kEmbedded) {
    GeneratedTask train = TrainStream(config);
    if (need_test) data.test_task = TestStream(config, train.task.pattern);
    if (need_train) data.train = SingleStream(train);
    data.train_task = std::move(train);
    return data;
  }
  if (need_train) {
    LabeledRasterSet set = LoadRasterSet(config.task.train_path);
    if (set.empty()) throw ValidationError("training set is empty");
    if (config.training.augment) {
      set = AugmentTrainingSet(set, config.training.warp_min,
                               config.training.warp_max,
                               config.training.warp_steps);
    }
    data.train = TrainingSetFromLabeled(set, config.network.num_outputs,
                                        config.training.target_width,
                                        config.training.target_amplitude);
  }
  if (need_test) {
    data.test_set = PadToWindows(LoadRasterSet(config.task.test_path),
                                 config.training.target_width);
    if (data.test_set->empty()) throw ValidationError("test set is empty");
  }
  return data;
}

void CheckDataAgainst(const SkimNetwork& net, const PreparedData& data) {
  if (!data.train.inputs.empty()) {
    RequireChannels(net.num_inputs(), data.train.inputs.front().num_channels(),
                    "training data");
    for (const SomaMatrix& y : data.train.targets) {
      if (y.rows() != net.num_outputs()) {
        throw DimensionError("training targets need " +
                             std::to_string(net.num_outputs()) + " rows");
      }
    }
  }
  if (data.test_task) {
    RequireChannels(net.num_inputs(), data.test_task->input.num_channels(),
                    "test stream");
    if (net.num_outputs() != 1) {
      throw DimensionError("stream tasks need a single-output network");
    }
  }
  if (data.test_set) {
    RequireChannels(net.num_inputs(), data.test_set->num_channels(),
                    "test set");
    for (int label : data.test_set->labels) {
      if (net.num_outputs() > 1 && label >= net.num_outputs()) {
        throw DimensionError("test label " + std::to_string(label) +
                             " has no output neuron");
      }
    }
  }
}

struct Evaluation {
  Json metrics;
  double error = 0.0;
  std::optional<ForwardTrace> trace;
};

Evaluation Evaluate(const SkimNetwork& net, const RunConfig& config,
                    const PreparedData& data) {
  Evaluation eval;
  if (data.test_task) {
    ForwardOptions options;
    options.require_output = true;
    ForwardTrace trace = Forward(net, data.test_task->input, options);
    const ConfusionCounts counts =
        MatchStream(*trace.output_spikes, data.test_task->task);
    eval.metrics = ScoreToJson(counts);
    eval.error = WillsError(counts).value;
    eval.trace = std::move(trace);
    return eval;
  }
  const std::vector<SpikeMatrix> outputs =
      RunPresentations(net, data.test_set->rasters);
  const ClassScores scores =
      ScoreClasses(outputs, *data.test_set, config.training.target_width);
  Json classes = Json::array();
  for (size_t c = 0; c < scores.counts.size(); ++c) {
    Json entry;
    entry["class"] = c;
    for (auto& [k, v] : ScoreToJson(scores.counts[c]).items()) entry[k] = v;
    classes.push_back(std::move(entry));
  }
  eval.metrics["presentations"] = data.test_set->size();
  eval.metrics["mean_wills_error"] = NumberOrNull(scores.mean_error);
  eval.metrics["classes"] = std::move(classes);
  eval.error = scores.mean_error;
  return eval;
}

Json BaseMetrics(const RunConfig& config, const char* command) {
  Json doc;
  doc["command"] = command;
  doc["seed"] = config.seed;
  doc["task"] = TaskTypeName(config.task.type);
  doc["solver"] = std::string(SolverKindName(config.training.solver));
  return doc;
}

void Merge(Json& into, const Json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = *it;
}

void StageNetwork(Artifacts& artifacts, const SkimNetwork& net,
                  const std::string& stem) {
  artifacts.Add(stem + ".json", DumpJson(NetworkToJson(net)));
  artifacts.Add(stem + "_weights.csv", WeightsCsv(net.output_weights()));
}

void ExportIfRequested(const RunConfig& config, const Evaluation& eval,
                       const PreparedData& data, const fs::path& dir) {
  if (!config.output.traces || !eval.trace || !data.test_task) return;
  std::optional<std::vector<int>> subset;
  if (config.output.trace_dendrites) {
    const int count = std::min<int>(
        *config.output.trace_dendrites,
        static_cast<int>(eval.trace->activations.rows()));
    subset.emplace(static_cast<size_t>(count));
    std::iota(subset->begin(), subset->end(), 0);
  }
  ExportTraces(*eval.trace, data.test_task->input, data.test_task->target,
               dir / "traces", subset);
}

void PrintScore(std::ostream& out, const Json& metrics) {
  if (metrics.contains("wills_error")) {
    out << "detection_rate " << metrics["detection_rate"].dump()
        << "  wills_error " << metrics["wills_error"].dump() << '\n';
  } else if (metrics.contains("mean_wills_error")) {
    out << "mean_wills_error " << metrics["mean_wills_error"].dump() << '\n';
  }
}

SkimNetwork LoadInputNetwork(const RunConfig& config) {
  return LoadNetwork(config.NetworkInPath());
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

EmbeddedTaskParams RunConfig::TrainTaskParams() const {
  EmbeddedTaskParams p = task.embedded;
  p.target_amplitude = training.target_amplitude;
  p.target_width = training.target_width;
  p.target_delay = training.target_delay;
  return p;
}

EmbeddedTaskParams RunConfig::TestTaskParams() const {
  EmbeddedTaskParams p = TrainTaskParams();
  p.num_embeddings = task.test_embeddings;
  p.stream_len = task.test_stream_len;
  return p;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions options;
  options.solver = training.solver;
  options.tolerance = training.tolerance;
  options.ridge = training.ridge;
  return options;
}

fs::path RunConfig::NetworkInPath() const {
  if (!output.network_in.empty()) return output.network_in;
  return fs::path(output.dir) / "network.json";
}

RunConfig DefaultRunConfig() {
  RunConfig config;
  config.network.seed = config.seed;
  config.network.target_amplitude = config.training.target_amplitude;
  return config;
}

RunConfig RunConfigFromJson(const Json& doc) {
  RunConfig c = DefaultRunConfig();
  std::vector<std::string> problems;
  FieldReader top(&doc, "", &problems);
  top.Read("seed", c.seed);

  {
    FieldReader r(top.Child("network"), "network", &problems);
    NetworkConfig& n = c.network;
    r.Read("num_inputs", n.num_inputs);
    r.Read("num_dendrites", n.num_dendrites);
    r.Read("num_outputs", n.num_outputs);
    ReadFamily(r, "kernel_family", n.kernel_family, problems);
    r.Read("weight_range", n.weight_range);
    r.Read("threshold", n.threshold);
    r.Read("soma_reset", n.soma_reset);
    r.Read("swapped_order", n.swapped_order);
    r.Read("support_epsilon", n.support_epsilon);
    r.Finish();
  }
  {
    FieldReader r(top.Child("task"), "task", &problems);
    std::string type = TaskTypeName(c.task.type);
    r.Read("type", type);
    if (type == "embedded") {
      c.task.type = TaskType::kEmbedded;
    } else if (type == "dataset") {
      c.task.type = TaskType::kDataset;
    } else {
      problems.push_back("task.type: expected embedded or dataset, got '" +
                         type + "'");
    }
    EmbeddedTaskParams& e = c.task.embedded;
    r.Read("num_channels", e.num_channels);
    r.Read("pattern_len", e.pattern_len);
    r.Read("pattern_spike_count", e.pattern_spike_count);
    r.Read("stream_len", e.stream_len);
    r.Read("num_embeddings", e.num_embeddings);
    r.Read("noise_ratio", e.noise_ratio);
    r.Read("test_embeddings", c.task.test_embeddings);
    r.Read("test_stream_len", c.task.test_stream_len);
    r.Read("train_path", c.task.train_path);
    r.Read("test_path", c.task.test_path);
    r.Finish();
  }
  {
    FieldReader r(top.Child("training"), "training", &problems);
    TrainingConfig& t = c.training;
    std::string solver(SolverKindName(t.solver));
    r.Read("solver", solver);
    try {
      t.solver = ParseSolverKind(solver);
    } catch (const ParseError& e) {
      problems.push_back(std::string("training.solver: ") + e.what());
    }
    r.Read("ridge", t.ridge);
    r.Read("tolerance", t.tolerance);
    r.Read("target_amplitude", t.target_amplitude);
    r.Read("target_width", t.target_width);
    r.Read("target_delay", t.target_delay);
    r.Read("augment", t.augment);
    r.Read("warp_min", t.warp_min);
    r.Read("warp_max", t.warp_max);
    r.Read("warp_steps", t.warp_steps);
    r.Finish();
  }
  {
    FieldReader r(top.Child("prune"), "prune", &problems);
    r.Read("strategy", c.prune.strategy);
    r.Read("keep", c.prune.keep);
    r.Read("discard_fraction", c.prune.discard_fraction);
    r.Read("rounds", c.prune.rounds);
    r.Finish();
  }
  {
    FieldReader r(top.Child("output"), "output", &problems);
    r.Read("dir", c.output.dir);
    r.Read("traces", c.output.traces);
    r.Read("trace_dendrites", c.output.trace_dendrites);
    r.Read("network_in", c.output.network_in);
    r.Finish();
  }
  top.Finish();
  ThrowIfAny(problems);
  return c;
}

Json RunConfigToJson(const RunConfig& c) {
  Json doc;
  doc["seed"] = c.seed;
  Json network;
  network["num_inputs"] = c.network.num_inputs;
  network["num_dendrites"] = c.network.num_dendrites;
  network["num_outputs"] = c.network.num_outputs;
  network["kernel_family"] = FamilyToJson(c.network.kernel_family);
  network["weight_range"] = {c.network.weight_range.lo,
                             c.network.weight_range.hi};
  network["threshold"] = c.network.threshold;
  network["soma_reset"] = c.network.soma_reset;
  network["swapped_order"] = c.network.swapped_order;
  network["support_epsilon"] = c.network.support_epsilon;
  doc["network"] = std::move(network);

  Json task;
  const EmbeddedTaskParams& e = c.task.embedded;
  task["type"] = TaskTypeName(c.task.type);
  task["num_channels"] = e.num_channels;
  task["pattern_len"] = e.pattern_len;
  task["pattern_spike_count"] = e.pattern_spike_count;
  task["stream_len"] = e.stream_len;
  task["num_embeddings"] = e.num_embeddings;
  task["noise_ratio"] = e.noise_ratio;
  task["test_embeddings"] = c.task.test_embeddings;
  task["test_stream_len"] = c.task.test_stream_len;
  task["train_path"] = c.task.train_path;
  task["test_path"] = c.task.test_path;
  doc["task"] = std::move(task);

  Json training;
  const TrainingConfig& t = c.training;
  training["solver"] = std::string(SolverKindName(t.solver));
  training["ridge"] = t.ridge;
  training["tolerance"] = t.tolerance ? Json(*t.tolerance) : Json(nullptr);
  training["target_amplitude"] = t.target_amplitude;
  training["target_width"] = t.target_width;
  training["target_delay"] = t.target_delay;
  training["augment"] = t.augment;
  training["warp_min"] = t.warp_min;
  training["warp_max"] = t.warp_max;
  training["warp_steps"] = t.warp_steps;
  doc["training"] = std::move(training);

  Json prune;
  prune["strategy"] = c.prune.strategy;
  prune["keep"] = c.prune.keep;
  prune["discard_fraction"] = c.prune.discard_fraction;
  prune["rounds"] = c.prune.rounds;
  doc["prune"] = std::move(prune);

  Json output;
  output["dir"] = c.output.dir;
  output["traces"] = c.output.traces;
  output["trace_dendrites"] = c.output.trace_dendrites
                                  ? Json(*c.output.trace_dendrites)
                                  : Json(nullptr);
  output["network_in"] = c.output.network_in;
  doc["output"] = std::move(output);
  return doc;
}

void FinalizeRunConfig(RunConfig& c, std::string_view command) {
  c.network.seed = c.seed;
  c.network.target_amplitude = c.training.target_amplitude;
  std::vector<std::string> problems;
  const bool embedded = c.task.type == TaskType::kEmbedded;
  const bool uses_network_file = command == "test" || command == "prune";

  if (!uses_network_file) {
    Collect(problems, "network", [&] { ValidateConfig(c.network); });
  }
  if (embedded) {
    Collect(problems, "task (training stream)",
            [&] { ValidateTaskParams(c.TrainTaskParams()); });
    Collect(problems, "task (test stream)",
            [&] { ValidateTaskParams(c.TestTaskParams()); });
    if (!uses_network_file) {
      if (c.network.num_inputs != c.task.embedded.num_channels) {
        problems.push_back(
            "network.num_inputs: must equal task.num_channels for stream "
            "tasks");
      }
      if (c.network.num_outputs != 1) {
        problems.push_back("network.num_outputs: stream tasks need 1 output");
      }
    }
  } else {
    if (command == "demo") {
      problems.push_back("task.type: demo needs an embedded task");
    }
    const bool need_train = command == "train" || command == "prune";
    const bool need_test = command == "test" || command == "prune";
    if (need_train && !fs::is_regular_file(c.task.train_path)) {
      problems.push_back("task.train_path: no such file '" +
                         c.task.train_path + "'");
    }
    if (need_test && !fs::is_regular_file(c.task.test_path)) {
      problems.push_back("task.test_path: no such file '" +
                         c.task.test_path + "'");
    }
  }

  const TrainingConfig& t = c.training;
  if (!(t.ridge > 0) || !std::isfinite(t.ridge)) {
    problems.push_back("training.ridge: must be > 0");
  }
  if (t.tolerance && !(*t.tolerance >= 0)) {
    problems.push_back("training.tolerance: must be >= 0");
  }
  if (!(t.target_amplitude > 0) || !std::isfinite(t.target_amplitude)) {
    problems.push_back("training.target_amplitude: must be > 0");
  }
  if (t.target_width < 1) problems.push_back("training.target_width: >= 1");
  if (t.target_delay < 0) problems.push_back("training.target_delay: >= 0");
  if (!(t.warp_min > 0) || !(t.warp_min <= t.warp_max)) {
    problems.push_back("training.warp_min/warp_max: need 0 < min <= max");
  }
  if (t.warp_steps < 1) problems.push_back("training.warp_steps: >= 1");

  if (command == "prune") {
    if (c.prune.strategy == "two_pass") {
      if (c.prune.keep < 1) problems.push_back("prune.keep: must be >= 1");
    } else if (c.prune.strategy == "iterative") {
      IterativePruneOptions options;
      options.discard_fraction = c.prune.discard_fraction;
      options.rounds = c.prune.rounds;
      Collect(problems, "prune", [&] { ValidatePruneOptions(options); });
    } else {
      problems.push_back("prune.strategy: expected two_pass or iterative");
    }
  }
  if (c.output.dir.empty()) problems.push_back("output.dir: must be set");
  if (c.output.trace_dendrites && *c.output.trace_dendrites < 1) {
    problems.push_back("output.trace_dendrites: must be >= 1 or null");
  }
  if (uses_network_file && !fs::is_regular_file(c.NetworkInPath())) {
    problems.push_back("network file '" + c.NetworkInPath().string() +
                       "' does not exist (set output.network_in or run "
                       "train first)");
  }
  ThrowIfAny(problems);
}

// ---------------------------------------------------------------------------
// Commands

int CmdDemo(const RunConfig& config, std::ostream& out) {
  const PreparedData data = PrepareData(config, true, true);
  SkimNetwork net = SkimNetwork::Create(config.network);
  const double residual = Train(net, data.train, config.train_options());
  const Evaluation eval = Evaluate(net, config, data);

  Json metrics = BaseMetrics(config, "demo");
  metrics["training_residual"] = residual;
  metrics["test_embeddings"] = config.task.test_embeddings;
  Merge(metrics, eval.metrics);

  Artifacts artifacts(config.output.dir);
  artifacts.Add("config.json", DumpJson(RunConfigToJson(config)));
  StageNetwork(artifacts, net, "network");
  artifacts.Add("train_stream.txt", RasterText(data.train_task->input));
  artifacts.Add("test_stream.txt", RasterText(data.test_task->input));
  artifacts.Add("metrics.json", DumpJson(metrics));
  artifacts.Commit();
  ExportIfRequested(config, eval, data, artifacts.dir());
  PrintScore(out, metrics);
  return kExitOk;
}

int CmdTrain(const RunConfig& config, std::ostream& out) {
  const PreparedData data = PrepareData(config, true, false);
  SkimNetwork net = SkimNetwork::Create(config.network);
  CheckDataAgainst(net, data);
  const double residual = Train(net, data.train, config.train_options());

  Json metrics = BaseMetrics(config, "train");
  metrics["training_residual"] = residual;
  metrics["presentations"] = data.train.inputs.size();

  Artifacts artifacts(config.output.dir);
  artifacts.Add("config.json", DumpJson(RunConfigToJson(config)));
  StageNetwork(artifacts, net, "network");
  artifacts.Add("train_metrics.json", DumpJson(metrics));
  artifacts.Commit();
  out << "training_residual " << FormatFloat(residual) << '\n';
  return kExitOk;
}

int CmdTest(const RunConfig& config, std::ostream& out) {
  const SkimNetwork net = LoadInputNetwork(config);
  if (!net.trained()) throw StateError("network file has no output weights");
  const PreparedData data = PrepareData(config, false, true);
  CheckDataAgainst(net, data);
  const Evaluation eval = Evaluate(net, config, data);

  Json metrics = BaseMetrics(config, "test");
  Merge(metrics, eval.metrics);
  Artifacts artifacts(config.output.dir);
  artifacts.Add("metrics.json", DumpJson(metrics));
  artifacts.Commit();
  ExportIfRequested(config, eval, data, artifacts.dir());
  PrintScore(out, metrics);
  return kExitOk;
}

int CmdPrune(const RunConfig& config, std::ostream& out) {
  const SkimNetwork net = LoadInputNetwork(config);
  if (!net.trained()) throw StateError("network file has no output weights");
  const PreparedData data = PrepareData(config, true, true);
  CheckDataAgainst(net, data);
  if (config.prune.strategy == "two_pass" &&
      config.prune.keep >= net.num_dendrites()) {
    throw ValidationError("prune.keep must be below the network's " +
                          std::to_string(net.num_dendrites()) + " dendrites");
  }

  const Evaluation before = Evaluate(net, config, data);
  PruneResult result = [&] {
    if (config.prune.strategy == "two_pass") {
      return PruneTwoPass(net, data.train, config.prune.keep,
                          config.train_options());
    }
    IterativePruneOptions options;
    options.discard_fraction = config.prune.discard_fraction;
    options.rounds = config.prune.rounds;
    options.seed = DeriveSeed(config.seed, "prune");
    options.train = config.train_options();
    return PruneIterative(net, data.train, options);
  }();
  const Evaluation after = Evaluate(result.network, config, data);
  result.report.error_before = before.error;
  result.report.error_after = after.error;

  Artifacts artifacts(config.output.dir);
  StageNetwork(artifacts, result.network, "pruned_network");
  artifacts.Add("prune_report.json",
                DumpJson(PruneReportToJson(result.report)));
  artifacts.Commit();
  out << "dendrites " << result.report.dendrites_before << " -> "
      << result.report.dendrites_after << "  error "
      << FormatFloat(before.error) << " -> " << FormatFloat(after.error)
      << '\n';
  return kExitOk;
}

int CmdKernels(std::ostream& out) {
  out << "kind              parameters                response to a unit "
         "launch at dt >= 0\n"
      << "alpha             tau > 0                   (dt/tau) exp(-dt/tau)\n"
      << "damped_resonance  tau > 0, omega > 0        exp(-dt/tau) "
         "sin(omega dt)\n"
      << "delayed_alpha     tau > 0, delta_t >= 0     alpha shifted by "
         "delta_t, 0 before\n"
      << "delayed_gaussian  sigma > 0, delta_t >= 0   exp(-(dt-delta_t)^2 / "
         "(2 sigma^2)) / (sigma sqrt(2 pi))\n"
      << "leaky_nl          tau > 0                   a <- lambda a / (1 + "
         "a^2) + v, lambda = exp(-1/tau)\n"
      << "custom            custom_table (finite)     table[dt], 0 past the "
         "end\n"
      << "\nAll kinds: logistic_gain > 0 (default "
      << FormatFloat(kDefaultLogisticGain)
      << "). Family ranges are [lo, hi]; parameters are drawn uniformly.\n"
      << "Default family: alpha, tau ~ U(0, 100); input weights ~ U(-0.5, "
         "0.5).\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const MisuseError*>(&e)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

struct CliFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string solver;
  std::string out_dir;
};

void AddFlags(CLI::App* sub, CliFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON run configuration");
  sub->add_option("--seed", flags.seed, "Master seed (overrides config)");
  sub->add_option("--solver", flags.solver, "batch or online")
      ->check(CLI::IsMember({"batch", "online"}));
  sub->add_option("--out", flags.out_dir, "Output directory");
}

RunConfig ResolveConfig(const CliFlags& flags, std::string_view command) {
  RunConfig config = DefaultRunConfig();
  if (!flags.config_path.empty()) {
    if (!fs::is_regular_file(flags.config_path)) {
      throw ValidationError("config file '" + flags.config_path +
                            "' does not exist");
    }
    config = RunConfigFromJson(ParseJson(ReadFile(flags.config_path)));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.solver.empty()) {
    config.training.solver = ParseSolverKind(flags.solver);
  }
  if (!flags.out_dir.empty()) config.output.dir = flags.out_dir;
  FinalizeRunConfig(config, command);
  return config;
}

}  // namespace

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking pattern recognizers from random synaptic kernels and "
               "least-squares output weights."};
  app.name("skim");
  app.require_subcommand(1);
  CliFlags flags;
  CLI::App* demo =
      app.add_subcommand("demo", "Embedded-pattern task end to end");
  CLI::App* train = app.add_subcommand("train", "Train and save a network");
  CLI::App* test =
      app.add_subcommand("test", "Evaluate a saved network on test data");
  CLI::App* prune =
      app.add_subcommand("prune", "Prune a saved network and re-solve");
  app.add_subcommand("kernels", "List the synaptic kernel catalog");
  for (CLI::App* sub : {demo, train, test, prune}) AddFlags(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "kernels") return CmdKernels(out);
    const RunConfig config = ResolveConfig(flags, command);
    if (command == "demo") return CmdDemo(config, out);
    if (command == "train") return CmdTrain(config, out);
    if (command == "test") return CmdTest(config, out);
    return CmdPrune(config, out);
  } catch (const std::exception& e) {
    err << "skim " << command << ": " << e.what() << '\n';
    return ExitCodeFor(e);
  }
}

}  // namespace skim
