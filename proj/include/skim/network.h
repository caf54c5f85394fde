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

// Two-layer spiking network: L input channels project through fixed random
// synapses onto M dendrites, each owning one synaptic kernel; N somas sum the
// dendritic potentials with trained linear weights and threshold the result.

#ifndef SKIM_NETWORK_H_
#define SKIM_NETWORK_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "skim/kernel.h"
#include "skim/random.h"

namespace skim {

// M x K: column t holds the dendritic potentials at timestep t.
using ActivationMatrix = Eigen::MatrixXd;
// N x K soma values (or training targets).
using SomaMatrix = Eigen::MatrixXd;
using SpikeMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SpikeEvent {
  int channel = 0;
  int time = 0;

  // Events order by time first so rasters iterate chronologically.
  friend auto operator<=>(const SpikeEvent& a, const SpikeEvent& b) {
    if (auto c = a.time <=> b.time; c != 0) return c;
    return a.channel <=> b.channel;
  }
  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

// Binary spike events on `num_channels` channels over `num_steps` timesteps.
// At most one event per (channel, time); events are kept sorted.
class SpikeRaster {
 public:
  SpikeRaster() = default;
  SpikeRaster(int num_channels, int num_steps);
  // Throws ValidationError on out-of-range or duplicate events.
  SpikeRaster(int num_channels, int num_steps, std::vector<SpikeEvent> events);

  int num_channels() const { return num_channels_; }
  int num_steps() const { return num_steps_; }
  const std::vector<SpikeEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }

  // Inserts an event; returns false (and changes nothing) if it already
  // exists. Throws ValidationError when out of range.
  bool Add(int channel, int time);
  bool Contains(int channel, int time) const;
  // Time of the latest event, or -1 for an empty raster.
  int LastSpikeTime() const;
  // Grows or shrinks the time span; every event must stay in range.
  void SetNumSteps(int num_steps);

  friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;

 private:
  int num_channels_ = 0;
  int num_steps_ = 0;
  std::vector<SpikeEvent> events_;
};

// Rasters placed back to back in time.
SpikeRaster Concatenate(std::span<const SpikeRaster> rasters);

// Closed interval [lo, hi] when lo == hi, open (lo, hi) otherwise.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

// Distribution each dendrite's kernel parameters are drawn from.
struct KernelFamily {
  KernelKind kind = KernelKind::kAlpha;
  ParamRange tau{0.0, 100.0};
  ParamRange delta_t{0.0, 0.0};
  ParamRange omega{0.0, 0.0};
  ParamRange sigma{0.0, 0.0};
  double logistic_gain = kDefaultLogisticGain;
  std::optional<std::vector<double>> custom_table;

  // Alpha kernels with tau ~ U(0, t_max / 2), where t_max is the longest
  // interval the dendrites must remember.
  static KernelFamily AlphaForMemory(double t_max);

  friend bool operator==(const KernelFamily&, const KernelFamily&) = default;
};

void ValidateFamily(const KernelFamily& family);
KernelSpec DrawKernel(const KernelFamily& family, Rng& rng);

struct NetworkConfig {
  int num_inputs = 4;
  int num_dendrites = 80;
  int num_outputs = 1;
  KernelFamily kernel_family;
  ParamRange weight_range{-0.5, 0.5};
  double threshold = 0.5;
  // Soma value the training targets use for "spike"; threshold must lie
  // strictly between 0 and this.
  double target_amplitude = 1.0;
  uint64_t seed = 0;
  bool soma_reset = false;
  // Apply the logistic after kernel integration instead of before.
  bool swapped_order = false;
  double support_epsilon = kDefaultSupportEpsilon;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Throws ValidationError listing every violated field.
void ValidateConfig(const NetworkConfig& config);

class SkimNetwork {
 public:
  // Draws W1 and the kernels from the "weights" and "kernels" sub-streams of
  // config.seed. Deterministic in config.
  static SkimNetwork Create(const NetworkConfig& config);

  // Assembles a network from explicit parts (deserialization, pruning).
  // config.num_dendrites is taken from input_weights.rows().
  static SkimNetwork FromParts(NetworkConfig config,
                               Eigen::MatrixXd input_weights,
                               std::vector<KernelSpec> kernels,
                               std::optional<Eigen::MatrixXd> output_weights);

  const NetworkConfig& config() const { return config_; }
  int num_inputs() const { return config_.num_inputs; }
  int num_dendrites() const { return config_.num_dendrites; }
  int num_outputs() const { return config_.num_outputs; }
  double threshold() const { return config_.threshold; }

  const Eigen::MatrixXd& input_weights() const { return input_weights_; }
  const std::vector<KernelSpec>& kernels() const { return kernels_; }
  bool trained() const { return output_weights_.has_value(); }
  // Throws StateError when untrained.
  const Eigen::MatrixXd& output_weights() const;
  void SetOutputWeights(Eigen::MatrixXd weights);
  void ClearOutputWeights() { output_weights_.reset(); }

  // Exact comparison of every field, including weight bits.
  friend bool operator==(const SkimNetwork& a, const SkimNetwork& b);

 private:
  SkimNetwork() = default;

  NetworkConfig config_;
  Eigen::MatrixXd input_weights_;  // M x L
  std::vector<KernelSpec> kernels_;
  std::optional<Eigen::MatrixXd> output_weights_;  // N x M
};

struct ForwardOptions {
  // Multiplies every kernel's truncation horizon.
  double horizon_scale = 1.0;
  // Throw StateError instead of omitting soma output for an untrained net.
  bool require_output = false;
};

struct ForwardTrace {
  ActivationMatrix activations;
  std::optional<SomaMatrix> soma;
  std::optional<SpikeMatrix> output_spikes;
};

// Simulates one presentation from rest. Soma and spikes are filled when the
// network is trained.
ForwardTrace Forward(const SkimNetwork& net, const SpikeRaster& input,
                     const ForwardOptions& options = {});

// Dendritic potentials only (open loop: no soma reset).
ActivationMatrix ComputeActivations(const SkimNetwork& net,
                                    const SpikeRaster& input,
                                    const ForwardOptions& options = {});

// Activations for several presentations, concatenated column-wise. With
// `streaming` the dendrites carry state across presentation boundaries;
// otherwise each presentation starts from rest.
ActivationMatrix CollectActivations(const SkimNetwork& net,
                                    std::span<const SpikeRaster> inputs,
                                    bool streaming = false);

}  // namespace skim

#endif  // SKIM_NETWORK_H_
