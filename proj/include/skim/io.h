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

// JSON and CSV (de)serialization of networks, kernels and reports.

#ifndef SKIM_IO_H_
#define SKIM_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "skim/kernel.h"
#include "skim/network.h"
#include "skim/pruning.h"

namespace skim {

using Json = nlohmann::ordered_json;

// Two-space indented with a trailing newline.
std::string DumpJson(const Json& doc);
// Throws ParseError (with line number) on malformed text.
Json ParseJson(std::string_view text);

Json KernelToJson(const KernelSpec& spec);
// Missing numeric fields default to 0 (logistic_gain to 5); the result is
// validated.
KernelSpec KernelFromJson(const Json& doc);

Json FamilyToJson(const KernelFamily& family);
KernelFamily FamilyFromJson(const Json& doc);

// Full network: dimensions, configuration, W1 and W2 as row-major nested
// arrays (W2 null when untrained), and the kernel list. Doubles round-trip
// bit-exactly.
Json NetworkToJson(const SkimNetwork& net);
SkimNetwork NetworkFromJson(const Json& doc);

void SaveNetwork(const SkimNetwork& net, const std::filesystem::path& path);
SkimNetwork LoadNetwork(const std::filesystem::path& path);

// N rows, one column per dendrite, header "d0,d1,...".
std::string WeightsCsv(const Eigen::MatrixXd& weights);

Json PruneReportToJson(const PruneReport& report);

// JSON number, or null for non-finite values.
Json NumberOrNull(double value);

}  // namespace skim

#endif  // SKIM_IO_H_
