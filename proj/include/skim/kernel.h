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

// Synaptic kernels: the temporal response a dendrite produces for one
// incoming (weighted, nonlinearly compressed) spike event.
//
// All times are in integer-spaced timesteps; tau, delta_t and sigma are
// expressed in timesteps and omega in radians per timestep.

#ifndef SKIM_KERNEL_H_
#define SKIM_KERNEL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skim {

enum class KernelKind {
  kAlpha,
  kDampedResonance,
  kDelayedAlpha,
  kDelayedGaussian,
  // Stateful recurrent integrator with a compressive leak; advanced with
  // StepLeaky() rather than evaluated as an impulse response.
  kLeakyIntegratorNL,
  // Arbitrary sampled response, one amplitude per timestep offset.
  kCustom,
};

std::string_view KernelKindName(KernelKind kind);
// Accepts the names produced by KernelKindName. Throws ParseError otherwise.
KernelKind ParseKernelKind(std::string_view name);

inline constexpr double kDefaultLogisticGain = 5.0;
inline constexpr double kDefaultSupportEpsilon = 1e-6;

struct KernelSpec {
  KernelKind kind = KernelKind::kAlpha;
  double tau = 1.0;
  double delta_t = 0.0;
  double omega = 0.0;
  double sigma = 0.0;
  double logistic_gain = kDefaultLogisticGain;
  std::optional<std::vector<double>> custom_table;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Throws ValidationError naming the first violated field.
void ValidateKernel(const KernelSpec& spec);

// Zero-centred logistic: 1 / (1 + exp(-gain * u)) - 0.5. Odd in u and
// bounded in (-0.5, 0.5). Throws DomainError for non-finite u and
// ValidationError for gain <= 0.
double Logistic(double u, double gain);

// Impulse response of a stateless kernel `dt` timesteps after a unit
// trigger. Throws MisuseError for kLeakyIntegratorNL.
double EvalResponse(const KernelSpec& spec, double dt);

// Smallest integer horizon H with |EvalResponse(spec, dt)| < epsilon for all
// dt >= H. DampedResonance uses its exp(-dt/tau) envelope, so its horizon is
// an upper bound rather than the tightest one.
int ResponseSupport(const KernelSpec& spec,
                    double epsilon = kDefaultSupportEpsilon);

// EvalResponse sampled at dt = 0 .. horizon-1.
std::vector<double> SampleResponse(const KernelSpec& spec, int horizon);

// One step of the nonlinear-leak integrator:
//   a_t = leak * a_{t-1} / (1 + a_{t-1}^2) + input.
// leak must lie strictly inside (0, 1).
double StepLeaky(double state, double input, double leak);

// Per-step leak factor used for kLeakyIntegratorNL dendrites: exp(-1/tau).
double LeakFactor(const KernelSpec& spec);

}  // namespace skim

#endif  // SKIM_KERNEL_H_
