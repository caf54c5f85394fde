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

#ifndef SKIM_RANDOM_H_
#define SKIM_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace skim {

using Rng = std::mt19937_64;

// Independent generator for the sub-stream `name` of `seed`. Streams with
// different names are decorrelated, so e.g. the noise stream of a task can be
// changed without disturbing the weight stream of a network.
Rng MakeStream(uint64_t seed, std::string_view name);

// A seed for a derived component, e.g. a held-out stream of a task.
uint64_t DeriveSeed(uint64_t seed, std::string_view name);

// Draw from the open interval (lo, hi). Returns lo when lo == hi.
double UniformOpen(Rng& rng, double lo, double hi);

}  // namespace skim

#endif  // SKIM_RANDOM_H_
