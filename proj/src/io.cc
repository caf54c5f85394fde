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

#include "skim/io.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "skim/errors.h"
#include "skim/file_util.h"

namespace skim {

namespace {

int LineOf(std::string_view text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

const Json& Require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

double Number(const Json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number()) {
    throw ValidationError(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

template <typename T>
T Integer(const Json& doc, const char* key) {
  const Json& v = Require(doc, key);
  if (!v.is_number_integer()) {
    throw ValidationError(std::string("field '") + key +
                          "' must be an integer");
  }
  return v.get<T>();
}

bool Boolean(const Json& doc, const char* key, bool fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_boolean()) {
    throw ValidationError(std::string("field '") + key + "' must be boolean");
  }
  return v.get<bool>();
}

Json RangeToJson(const ParamRange& r) { return Json::array({r.lo, r.hi}); }

ParamRange RangeFromJson(const Json& doc, const char* key,
                         ParamRange fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ValidationError(std::string("field '") + key +
                          "' must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Json MatrixToJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& doc, const char* key,
                               Eigen::Index rows, Eigen::Index cols) {
  const Json& v = Require(doc, key);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
    throw DimensionError(std::string("'") + key + "' must have " +
                         std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = v[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError(std::string("'") + key + "' row " +
                           std::to_string(r) + " must have " +
                           std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& x = row[static_cast<size_t>(c)];
      if (!x.is_number()) {
        throw ValidationError(std::string("'") + key +
                              "' entries must be numbers");
      }
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

std::optional<std::vector<double>> TableFromJson(const Json& doc) {
  if (!doc.contains("custom_table") || doc.at("custom_table").is_null()) {
    return std::nullopt;
  }
  const Json& v = doc.at("custom_table");
  if (!v.is_array()) throw ValidationError("'custom_table' must be an array");
  std::vector<double> table;
  for (const Json& x : v) {
    if (!x.is_number()) {
      throw ValidationError("'custom_table' entries must be numbers");
    }
    table.push_back(x.get<double>());
  }
  return table;
}

KernelKind KindFromJson(const Json& doc) {
  const Json& v = Require(doc, "kind");
  if (!v.is_string()) throw ValidationError("'kind' must be a string");
  try {
    return ParseKernelKind(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace

std::string DumpJson(const Json& doc) { return doc.dump(2) + "\n"; }

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), LineOf(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

Json KernelToJson(const KernelSpec& spec) {
  Json doc;
  doc["kind"] = std::string(KernelKindName(spec.kind));
  doc["tau"] = spec.tau;
  doc["delta_t"] = spec.delta_t;
  doc["omega"] = spec.omega;
  doc["sigma"] = spec.sigma;
  doc["logistic_gain"] = spec.logistic_gain;
  if (spec.custom_table) doc["custom_table"] = *spec.custom_table;
  return doc;
}

KernelSpec KernelFromJson(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("kernel must be an object");
  KernelSpec spec;
  spec.kind = KindFromJson(doc);
  spec.tau = Number(doc, "tau", 0.0);
  spec.delta_t = Number(doc, "delta_t", 0.0);
  spec.omega = Number(doc, "omega", 0.0);
  spec.sigma = Number(doc, "sigma", 0.0);
  spec.logistic_gain = Number(doc, "logistic_gain", kDefaultLogisticGain);
  spec.custom_table = TableFromJson(doc);
  ValidateKernel(spec);
  return spec;
}

Json FamilyToJson(const KernelFamily& family) {
  Json doc;
  doc["kind"] = std::string(KernelKindName(family.kind));
  doc["tau"] = RangeToJson(family.tau);
  doc["delta_t"] = RangeToJson(family.delta_t);
  doc["omega"] = RangeToJson(family.omega);
  doc["sigma"] = RangeToJson(family.sigma);
  doc["logistic_gain"] = family.logistic_gain;
  if (family.custom_table) doc["custom_table"] = *family.custom_table;
  return doc;
}

KernelFamily FamilyFromJson(const Json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("kernel family must be an object");
  }
  KernelFamily family;
  family.kind = KindFromJson(doc);
  family.tau = RangeFromJson(doc, "tau", {0.0, 0.0});
  family.delta_t = RangeFromJson(doc, "delta_t", {0.0, 0.0});
  family.omega = RangeFromJson(doc, "omega", {0.0, 0.0});
  family.sigma = RangeFromJson(doc, "sigma", {0.0, 0.0});
  family.logistic_gain = Number(doc, "logistic_gain", kDefaultLogisticGain);
  family.custom_table = TableFromJson(doc);
  ValidateFamily(family);
  return family;
}

Json NetworkToJson(const SkimNetwork& net) {
  const NetworkConfig& c = net.config();
  Json doc;
  doc["num_inputs"] = c.num_inputs;
  doc["num_dendrites"] = c.num_dendrites;
  doc["num_outputs"] = c.num_outputs;
  doc["seed"] = c.seed;
  doc["threshold"] = c.threshold;
  doc["target_amplitude"] = c.target_amplitude;
  doc["soma_reset"] = c.soma_reset;
  doc["swapped_order"] = c.swapped_order;
  doc["support_epsilon"] = c.support_epsilon;
  doc["weight_range"] = RangeToJson(c.weight_range);
  doc["kernel_family"] = FamilyToJson(c.kernel_family);
  doc["input_weights"] = MatrixToJson(net.input_weights());
  doc["output_weights"] =
      net.trained() ? MatrixToJson(net.output_weights()) : Json(nullptr);
  Json kernels = Json::array();
  for (const KernelSpec& k : net.kernels()) kernels.push_back(KernelToJson(k));
  doc["kernels"] = std::move(kernels);
  return doc;
}

SkimNetwork NetworkFromJson(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("network must be an object");
  NetworkConfig c;
  c.num_inputs = Integer<int>(doc, "num_inputs");
  c.num_dendrites = Integer<int>(doc, "num_dendrites");
  c.num_outputs = Integer<int>(doc, "num_outputs");
  c.seed = Integer<uint64_t>(doc, "seed");
  Require(doc, "threshold");
  c.threshold = Number(doc, "threshold", 0.0);
  c.target_amplitude = Number(doc, "target_amplitude", c.target_amplitude);
  c.soma_reset = Boolean(doc, "soma_reset", false);
  c.swapped_order = Boolean(doc, "swapped_order", false);
  c.support_epsilon = Number(doc, "support_epsilon", kDefaultSupportEpsilon);
  c.weight_range = RangeFromJson(doc, "weight_range", c.weight_range);
  c.kernel_family = FamilyFromJson(Require(doc, "kernel_family"));
  if (c.num_inputs < 1 || c.num_dendrites < 1 || c.num_outputs < 1) {
    throw ValidationError("network dimensions must be >= 1");
  }
  Eigen::MatrixXd w1 =
      MatrixFromJson(doc, "input_weights", c.num_dendrites, c.num_inputs);
  std::optional<Eigen::MatrixXd> w2;
  if (doc.contains("output_weights") && !doc.at("output_weights").is_null()) {
    w2 = MatrixFromJson(doc, "output_weights", c.num_outputs, c.num_dendrites);
  }
  const Json& kernel_list = Require(doc, "kernels");
  if (!kernel_list.is_array()) throw ValidationError("'kernels' must be a list");
  std::vector<KernelSpec> kernels;
  for (const Json& k : kernel_list) kernels.push_back(KernelFromJson(k));
  return SkimNetwork::FromParts(std::move(c), std::move(w1),
                                std::move(kernels), std::move(w2));
}

void SaveNetwork(const SkimNetwork& net, const std::filesystem::path& path) {
  WriteFileAtomic(path, DumpJson(NetworkToJson(net)));
}

SkimNetwork LoadNetwork(const std::filesystem::path& path) {
  return NetworkFromJson(ParseJson(ReadFile(path)));
}

std::string WeightsCsv(const Eigen::MatrixXd& weights) {
  std::string out;
  for (Eigen::Index j = 0; j < weights.cols(); ++j) {
    if (j > 0) out += ',';
    out += "d" + std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index n = 0; n < weights.rows(); ++n) {
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      if (j > 0) out += ',';
      out += FormatFloat(weights(n, j));
    }
    out += '\n';
  }
  return out;
}

Json NumberOrNull(double value) {
  return std::isfinite(value) ? Json(value) : Json(nullptr);
}

Json PruneReportToJson(const PruneReport& r) {
  Json doc;
  doc["strategy"] = r.strategy;
  doc["dendrites_before"] = r.dendrites_before;
  doc["dendrites_after"] = r.dendrites_after;
  doc["kept_indices"] = r.kept_indices;
  doc["discarded_indices"] = r.discarded_indices;
  doc["cumulative_fraction"] = r.cumulative_fraction;
  doc["residual_before"] = NumberOrNull(r.residual_before);
  doc["residual_after"] = NumberOrNull(r.residual_after);
  if (!r.round_residuals.empty()) {
    Json rounds = Json::array();
    for (double x : r.round_residuals) rounds.push_back(NumberOrNull(x));
    doc["round_residuals"] = std::move(rounds);
  }
  doc["error_before"] =
      r.error_before ? NumberOrNull(*r.error_before) : Json(nullptr);
  doc["error_after"] =
      r.error_after ? NumberOrNull(*r.error_after) : Json(nullptr);
  return doc;
}

}  // namespace skim
