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

#include "skim/network.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "skim/errors.h"

namespace skim {

// ---------------------------------------------------------------------------
// SpikeRaster

SpikeRaster::SpikeRaster(int num_channels, int num_steps)
    : num_channels_(num_channels), num_steps_(num_steps) {
  if (num_channels < 1) throw ValidationError("raster needs >= 1 channel");
  if (num_steps < 0) throw ValidationError("raster num_steps must be >= 0");
}

SpikeRaster::SpikeRaster(int num_channels, int num_steps,
                         std::vector<SpikeEvent> events)
    : SpikeRaster(num_channels, num_steps) {
  for (const SpikeEvent& e : events) {
    if (e.channel < 0 || e.channel >= num_channels || e.time < 0 ||
        e.time >= num_steps) {
      throw ValidationError("spike event (" + std::to_string(e.channel) +
                            ", " + std::to_string(e.time) +
                            ") outside raster bounds");
    }
  }
  std::sort(events.begin(), events.end());
  if (std::adjacent_find(events.begin(), events.end()) != events.end()) {
    throw ValidationError("duplicate spike event in raster");
  }
  events_ = std::move(events);
}

bool SpikeRaster::Add(int channel, int time) {
  if (channel < 0 || channel >= num_channels_ || time < 0 ||
      time >= num_steps_) {
    throw ValidationError("spike event (" + std::to_string(channel) + ", " +
                          std::to_string(time) + ") outside raster bounds");
  }
  const SpikeEvent event{channel, time};
  auto it = std::lower_bound(events_.begin(), events_.end(), event);
  if (it != events_.end() && *it == event) return false;
  events_.insert(it, event);
  return true;
}

bool SpikeRaster::Contains(int channel, int time) const {
  return std::binary_search(events_.begin(), events_.end(),
                            SpikeEvent{channel, time});
}

int SpikeRaster::LastSpikeTime() const {
  return events_.empty() ? -1 : events_.back().time;
}

void SpikeRaster::SetNumSteps(int num_steps) {
  if (num_steps < 0 || LastSpikeTime() >= num_steps) {
    throw ValidationError("raster span would cut off spike events");
  }
  num_steps_ = num_steps;
}

SpikeRaster Concatenate(std::span<const SpikeRaster> rasters) {
  if (rasters.empty()) throw ValidationError("nothing to concatenate");
  const int channels = rasters.front().num_channels();
  std::vector<SpikeEvent> events;
  int offset = 0;
  for (const SpikeRaster& r : rasters) {
    if (r.num_channels() != channels) {
      throw DimensionError("rasters differ in channel count");
    }
    for (const SpikeEvent& e : r.events()) {
      events.push_back({e.channel, e.time + offset});
    }
    offset += r.num_steps();
  }
  return SpikeRaster(channels, offset, std::move(events));
}

// ---------------------------------------------------------------------------
// Construction

KernelFamily KernelFamily::AlphaForMemory(double t_max) {
  if (!(t_max > 0)) throw ValidationError("t_max must be > 0");
  KernelFamily family;
  family.kind = KernelKind::kAlpha;
  family.tau = {0.0, t_max / 2.0};
  return family;
}

namespace {

void CheckRange(const ParamRange& r, const char* name,
                std::vector<std::string>& problems) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    problems.push_back(std::string(name) + " range must be finite, lo <= hi");
  }
}

void ThrowIfAny(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string message;
  for (const std::string& p : problems) {
    if (!message.empty()) message += "; ";
    message += p;
  }
  throw ValidationError(message);
}

}  // namespace

void ValidateFamily(const KernelFamily& family) {
  std::vector<std::string> problems;
  CheckRange(family.tau, "tau", problems);
  CheckRange(family.delta_t, "delta_t", problems);
  CheckRange(family.omega, "omega", problems);
  CheckRange(family.sigma, "sigma", problems);
  ThrowIfAny(problems);
  // Every kernel the family can draw has to be valid; checking the upper
  // corner plus the lower bounds catches every range that cannot.
  KernelSpec upper{family.kind,        family.tau.hi,   family.delta_t.hi,
                   family.omega.hi,    family.sigma.hi, family.logistic_gain,
                   family.custom_table};
  ValidateKernel(upper);
  if (family.delta_t.lo < 0) throw ValidationError("delta_t must be >= 0");
  const bool needs_tau = family.kind != KernelKind::kDelayedGaussian &&
                         family.kind != KernelKind::kCustom;
  if (needs_tau && family.tau.lo < 0) {
    throw ValidationError("tau range must be positive");
  }
  if (family.kind == KernelKind::kDampedResonance && family.omega.lo < 0) {
    throw ValidationError("omega range must be positive");
  }
  if (family.kind == KernelKind::kDelayedGaussian && family.sigma.lo < 0) {
    throw ValidationError("sigma range must be positive");
  }
}

KernelSpec DrawKernel(const KernelFamily& family, Rng& rng) {
  KernelSpec spec;
  spec.kind = family.kind;
  spec.tau = UniformOpen(rng, family.tau.lo, family.tau.hi);
  spec.delta_t = UniformOpen(rng, family.delta_t.lo, family.delta_t.hi);
  spec.omega = UniformOpen(rng, family.omega.lo, family.omega.hi);
  spec.sigma = UniformOpen(rng, family.sigma.lo, family.sigma.hi);
  spec.logistic_gain = family.logistic_gain;
  spec.custom_table = family.custom_table;
  return spec;
}

void ValidateConfig(const NetworkConfig& config) {
  std::vector<std::string> problems;
  if (config.num_inputs < 1) problems.push_back("num_inputs must be >= 1");
  if (config.num_dendrites < 1) {
    problems.push_back("num_dendrites must be >= 1");
  }
  if (config.num_outputs < 1) problems.push_back("num_outputs must be >= 1");
  if (!(config.weight_range.lo < config.weight_range.hi) ||
      !std::isfinite(config.weight_range.lo) ||
      !std::isfinite(config.weight_range.hi)) {
    problems.push_back("weight_range needs finite lo < hi");
  }
  if (!(config.target_amplitude > 0) ||
      !std::isfinite(config.target_amplitude)) {
    problems.push_back("target_amplitude must be > 0");
  }
  if (!(config.threshold > 0 && config.threshold < config.target_amplitude)) {
    problems.push_back("threshold must lie in (0, target_amplitude)");
  }
  if (!(config.support_epsilon > 0)) {
    problems.push_back("support_epsilon must be > 0");
  }
  try {
    ValidateFamily(config.kernel_family);
  } catch (const ValidationError& e) {
    problems.push_back(std::string("kernel_family: ") + e.what());
  }
  ThrowIfAny(problems);
}

SkimNetwork SkimNetwork::Create(const NetworkConfig& config) {
  ValidateConfig(config);
  SkimNetwork net;
  net.config_ = config;
  const int m = config.num_dendrites;
  const int l = config.num_inputs;
  net.input_weights_.resize(m, l);
  Rng weight_rng = MakeStream(config.seed, "weights");
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < l; ++i) {
      net.input_weights_(j, i) = UniformOpen(weight_rng, config.weight_range.lo,
                                             config.weight_range.hi);
    }
  }
  Rng kernel_rng = MakeStream(config.seed, "kernels");
  net.kernels_.reserve(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    net.kernels_.push_back(DrawKernel(config.kernel_family, kernel_rng));
  }
  return net;
}

SkimNetwork SkimNetwork::FromParts(
    NetworkConfig config, Eigen::MatrixXd input_weights,
    std::vector<KernelSpec> kernels,
    std::optional<Eigen::MatrixXd> output_weights) {
  config.num_dendrites = static_cast<int>(input_weights.rows());
  ValidateConfig(config);
  if (input_weights.cols() != config.num_inputs) {
    throw DimensionError("input weight columns must equal num_inputs");
  }
  if (kernels.size() != static_cast<size_t>(config.num_dendrites)) {
    throw DimensionError("need exactly one kernel per dendrite");
  }
  if (!input_weights.allFinite()) {
    throw DomainError("input weights must be finite");
  }
  for (const KernelSpec& k : kernels) ValidateKernel(k);
  SkimNetwork net;
  net.config_ = std::move(config);
  net.input_weights_ = std::move(input_weights);
  net.kernels_ = std::move(kernels);
  if (output_weights) net.SetOutputWeights(std::move(*output_weights));
  return net;
}

const Eigen::MatrixXd& SkimNetwork::output_weights() const {
  if (!output_weights_) throw StateError("network has no output weights");
  return *output_weights_;
}

void SkimNetwork::SetOutputWeights(Eigen::MatrixXd weights) {
  if (weights.rows() != config_.num_outputs ||
      weights.cols() != config_.num_dendrites) {
    throw DimensionError("output weights must be num_outputs x num_dendrites");
  }
  if (!weights.allFinite()) throw DomainError("output weights must be finite");
  output_weights_ = std::move(weights);
}

namespace {

bool SameMatrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

bool operator==(const SkimNetwork& a, const SkimNetwork& b) {
  if (!(a.config_ == b.config_) || !(a.kernels_ == b.kernels_) ||
      !SameMatrix(a.input_weights_, b.input_weights_) ||
      a.output_weights_.has_value() != b.output_weights_.has_value()) {
    return false;
  }
  return !a.output_weights_ ||
         SameMatrix(*a.output_weights_, *b.output_weights_);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Launch amplitudes at or below this are treated as no launch.
constexpr double kLaunchFloor = 1e-15;

struct Dendrite {
  bool leaky = false;
  double leak = 0.0;
  double gain = kDefaultLogisticGain;
  std::vector<double> response;  // truncated impulse response
};

struct SpikeGroup {
  int time = 0;
  std::vector<int> channels;
};

std::vector<SpikeGroup> GroupByTime(const SpikeRaster& input) {
  std::vector<SpikeGroup> groups;
  for (const SpikeEvent& e : input.events()) {
    if (groups.empty() || groups.back().time != e.time) {
      groups.push_back({e.time, {}});
    }
    groups.back().channels.push_back(e.channel);
  }
  return groups;
}

std::vector<Dendrite> PrepareDendrites(const SkimNetwork& net, int num_steps,
                                       double horizon_scale) {
  if (!(horizon_scale > 0)) throw ValidationError("horizon_scale must be > 0");
  std::vector<Dendrite> dendrites;
  dendrites.reserve(net.kernels().size());
  for (const KernelSpec& spec : net.kernels()) {
    Dendrite d;
    d.gain = spec.logistic_gain;
    if (spec.kind == KernelKind::kLeakyIntegratorNL) {
      d.leaky = true;
      d.leak = LeakFactor(spec);
    } else {
      const double support =
          std::ceil(horizon_scale *
                    ResponseSupport(spec, net.config().support_epsilon));
      const int horizon =
          static_cast<int>(std::min<double>(support, num_steps));
      d.response = SampleResponse(spec, horizon);
    }
    dendrites.push_back(std::move(d));
  }
  return dendrites;
}

// Value a spike group hands to dendrite j: the logistic of the summed
// synaptic input normally, the raw sum when the order is swapped.
double LaunchValue(const SkimNetwork& net, const Dendrite& d, int j,
                   const SpikeGroup& group) {
  double u = 0.0;
  for (int c : group.channels) u += net.input_weights()(j, c);
  if (net.config().swapped_order) return u;
  const double v = Logistic(u, d.gain);
  return std::abs(v) < kLaunchFloor ? 0.0 : v;
}

void AddResponse(const Dendrite& d, double scale, int start,
                 std::span<double> row) {
  const int n = std::min<int>(static_cast<int>(d.response.size()),
                              static_cast<int>(row.size()) - start);
  for (int k = 0; k < n; ++k) row[start + k] += scale * d.response[k];
}

class Simulator {
 public:
  Simulator(const SkimNetwork& net, const SpikeRaster& input,
            const ForwardOptions& options)
      : net_(net),
        steps_(input.num_steps()),
        groups_(GroupByTime(input)),
        dendrites_(PrepareDendrites(net, steps_, options.horizon_scale)),
        drive_(static_cast<size_t>(net.num_dendrites()) * steps_, 0.0) {
    if (input.num_channels() != net.num_inputs()) {
      throw DimensionError("raster has " +
                           std::to_string(input.num_channels()) +
                           " channels, network expects " +
                           std::to_string(net.num_inputs()));
    }
  }

  // Open-loop dendritic potentials.
  ActivationMatrix Activations() {
    for (const SpikeGroup& g : groups_) Launch(g);
    ActivationMatrix a(net_.num_dendrites(), steps_);
    for (int j = 0; j < net_.num_dendrites(); ++j) {
      const Dendrite& d = dendrites_[j];
      std::span<double> row = Row(j);
      double state = 0.0;
      for (int t = 0; t < steps_; ++t) {
        if (d.leaky) {
          state = StepLeaky(state, row[t], d.leak);
          a(j, t) = Readout(d, state);
        } else {
          a(j, t) = Readout(d, row[t]);
        }
      }
    }
    return a;
  }

  // Closed loop with dendritic reset after each output spike.
  ForwardTrace WithReset() {
    const int m = net_.num_dendrites();
    const Eigen::MatrixXd& w2 = net_.output_weights();
    ForwardTrace trace;
    trace.activations.resize(m, steps_);
    SomaMatrix soma(net_.num_outputs(), steps_);
    SpikeMatrix spikes(net_.num_outputs(), steps_);
    std::vector<double> state(static_cast<size_t>(m), 0.0);
    size_t next_group = 0;
    for (int t = 0; t < steps_; ++t) {
      if (next_group < groups_.size() && groups_[next_group].time == t) {
        Launch(groups_[next_group++]);
      }
      for (int j = 0; j < m; ++j) {
        const Dendrite& d = dendrites_[j];
        const double drive = Row(j)[t];
        if (d.leaky) {
          state[j] = StepLeaky(state[j], drive, d.leak);
          trace.activations(j, t) = Readout(d, state[j]);
        } else {
          trace.activations(j, t) = Readout(d, drive);
        }
      }
      soma.col(t) = w2 * trace.activations.col(t);
      spikes.col(t) = soma.col(t).array() > net_.threshold();
      if (spikes.col(t).any()) {
        for (int j = 0; j < m; ++j) {
          std::span<double> row = Row(j);
          const int end = std::min<int>(
              steps_, t + 1 + static_cast<int>(dendrites_[j].response.size()));
          std::fill(row.begin() + t + 1, row.begin() + end, 0.0);
          state[j] = 0.0;
        }
      }
    }
    trace.soma = std::move(soma);
    trace.output_spikes = std::move(spikes);
    return trace;
  }

 private:
  std::span<double> Row(int j) {
    return std::span<double>(drive_).subspan(static_cast<size_t>(j) * steps_,
                                             steps_);
  }

  double Readout(const Dendrite& d, double value) const {
    return net_.config().swapped_order ? Logistic(value, d.gain) : value;
  }

  void Launch(const SpikeGroup& g) {
    for (int j = 0; j < net_.num_dendrites(); ++j) {
      const Dendrite& d = dendrites_[j];
      const double v = LaunchValue(net_, d, j, g);
      if (v == 0.0) continue;
      if (d.leaky) {
        Row(j)[g.time] += v;
      } else {
        AddResponse(d, v, g.time, Row(j));
      }
    }
  }

  const SkimNetwork& net_;
  int steps_;
  std::vector<SpikeGroup> groups_;
  std::vector<Dendrite> dendrites_;
  // Row-major M x K: summed kernel responses for stateless dendrites, the
  // per-step input for leaky ones.
  std::vector<double> drive_;
};

}  // namespace

ActivationMatrix ComputeActivations(const SkimNetwork& net,
                                    const SpikeRaster& input,
                                    const ForwardOptions& options) {
  return Simulator(net, input, options).Activations();
}

ForwardTrace Forward(const SkimNetwork& net, const SpikeRaster& input,
                     const ForwardOptions& options) {
  if (!net.trained()) {
    if (options.require_output) {
      throw StateError("soma output requested from an untrained network");
    }
    return {ComputeActivations(net, input, options), std::nullopt,
            std::nullopt};
  }
  if (net.config().soma_reset) {
    return Simulator(net, input, options).WithReset();
  }
  ForwardTrace trace;
  trace.activations = ComputeActivations(net, input, options);
  SomaMatrix soma = net.output_weights() * trace.activations;
  trace.output_spikes = (soma.array() > net.threshold()).eval();
  trace.soma = std::move(soma);
  return trace;
}

ActivationMatrix CollectActivations(const SkimNetwork& net,
                                    std::span<const SpikeRaster> inputs,
                                    bool streaming) {
  if (inputs.empty()) throw ValidationError("no rasters to collect");
  if (streaming) return ComputeActivations(net, Concatenate(inputs));
  std::vector<ActivationMatrix> parts;
  Eigen::Index total = 0;
  for (const SpikeRaster& r : inputs) {
    parts.push_back(ComputeActivations(net, r));
    total += parts.back().cols();
  }
  ActivationMatrix out(net.num_dendrites(), total);
  Eigen::Index col = 0;
  for (const ActivationMatrix& p : parts) {
    out.middleCols(col, p.cols()) = p;
    col += p.cols();
  }
  return out;
}

}  // namespace skim
