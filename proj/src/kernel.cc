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

#include "skim/kernel.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "skim/errors.h"

namespace skim {

namespace {

struct KindName {
  KernelKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {KernelKind::kAlpha, "alpha"},
    {KernelKind::kDampedResonance, "damped_resonance"},
    {KernelKind::kDelayedAlpha, "delayed_alpha"},
    {KernelKind::kDelayedGaussian, "delayed_gaussian"},
    {KernelKind::kLeakyIntegratorNL, "leaky_nl"},
    {KernelKind::kCustom, "custom"},
};

void Require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

double AlphaShape(double dt, double tau) {
  const double x = dt / tau;
  return x * std::exp(-x);
}

// Horizon for a response that rises to a single peak at `peak` and decays
// monotonically afterwards.
int UnimodalSupport(const std::function<double(double)>& f, double peak,
                    double epsilon) {
  const double lo = std::max(0.0, std::floor(peak));
  const double hi = std::max(0.0, std::ceil(peak));
  if (std::abs(f(hi)) >= epsilon) {
    double t = hi;
    while (std::abs(f(t)) >= epsilon) t += 1.0;
    return static_cast<int>(t);
  }
  if (lo < hi && std::abs(f(lo)) >= epsilon) return static_cast<int>(hi);
  return 0;
}

}  // namespace

std::string_view KernelKindName(KernelKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

KernelKind ParseKernelKind(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  throw ParseError("unknown kernel kind '" + std::string(name) + "'", 0);
}

void ValidateKernel(const KernelSpec& spec) {
  Require(std::isfinite(spec.logistic_gain) && spec.logistic_gain > 0,
          "kernel logistic_gain must be > 0");
  Require(std::isfinite(spec.delta_t) && spec.delta_t >= 0,
          "kernel delta_t must be >= 0");
  Require(std::isfinite(spec.tau) && std::isfinite(spec.omega) &&
              std::isfinite(spec.sigma),
          "kernel parameters must be finite");
  switch (spec.kind) {
    case KernelKind::kAlpha:
    case KernelKind::kDelayedAlpha:
    case KernelKind::kLeakyIntegratorNL:
      Require(spec.tau > 0, "kernel tau must be > 0");
      break;
    case KernelKind::kDampedResonance:
      Require(spec.tau > 0, "kernel tau must be > 0");
      Require(spec.omega > 0, "damped_resonance omega must be > 0");
      break;
    case KernelKind::kDelayedGaussian:
      Require(spec.sigma > 0, "delayed_gaussian sigma must be > 0");
      break;
    case KernelKind::kCustom:
      Require(spec.custom_table.has_value(), "custom kernel needs a table");
      for (double v : *spec.custom_table) {
        Require(std::isfinite(v), "custom kernel table must be finite");
      }
      break;
  }
}

double Logistic(double u, double gain) {
  if (!std::isfinite(u)) throw DomainError("logistic input is not finite");
  if (!(gain > 0) || !std::isfinite(gain)) {
    throw ValidationError("logistic gain must be > 0");
  }
  // tanh form keeps exact odd symmetry: 1/(1+e^-x) - 1/2 = tanh(x/2) / 2.
  return 0.5 * std::tanh(0.5 * gain * u);
}

namespace {

// Assumes a validated spec and dt >= 0.
double ResponseUnchecked(const KernelSpec& spec, double dt) {
  switch (spec.kind) {
    case KernelKind::kAlpha:
      return AlphaShape(dt, spec.tau);
    case KernelKind::kDampedResonance:
      return std::exp(-dt / spec.tau) * std::sin(spec.omega * dt);
    case KernelKind::kDelayedAlpha:
      if (dt < spec.delta_t) return 0.0;
      return AlphaShape(dt - spec.delta_t, spec.tau);
    case KernelKind::kDelayedGaussian: {
      const double z = (dt - spec.delta_t) / spec.sigma;
      return std::exp(-0.5 * z * z) /
             (spec.sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    case KernelKind::kCustom: {
      const auto& table = *spec.custom_table;
      const double index = std::floor(dt);
      if (index >= static_cast<double>(table.size())) return 0.0;
      return table[static_cast<size_t>(index)];
    }
    case KernelKind::kLeakyIntegratorNL:
      break;
  }
  throw MisuseError(
      "leaky_nl kernels are stateful; advance them with StepLeaky");
}

}  // namespace

double EvalResponse(const KernelSpec& spec, double dt) {
  if (!(dt >= 0)) throw DomainError("response time offset must be >= 0");
  ValidateKernel(spec);
  return ResponseUnchecked(spec, dt);
}

int ResponseSupport(const KernelSpec& spec, double epsilon) {
  if (!(epsilon > 0)) throw DomainError("support epsilon must be > 0");
  ValidateKernel(spec);
  const auto response = [&spec](double dt) {
    return ResponseUnchecked(spec, dt);
  };
  switch (spec.kind) {
    case KernelKind::kAlpha:
      return UnimodalSupport(response, spec.tau, epsilon);
    case KernelKind::kDelayedAlpha:
      return UnimodalSupport(response, spec.delta_t + spec.tau, epsilon);
    case KernelKind::kDelayedGaussian:
      return UnimodalSupport(response, spec.delta_t, epsilon);
    case KernelKind::kDampedResonance: {
      double t = 0.0;
      while (std::exp(-t / spec.tau) >= epsilon) t += 1.0;
      return static_cast<int>(t);
    }
    case KernelKind::kCustom: {
      const auto& table = *spec.custom_table;
      for (size_t i = table.size(); i > 0; --i) {
        if (std::abs(table[i - 1]) >= epsilon) return static_cast<int>(i);
      }
      return 0;
    }
    case KernelKind::kLeakyIntegratorNL:
      break;
  }
  throw MisuseError("leaky_nl kernels have no finite impulse response");
}

std::vector<double> SampleResponse(const KernelSpec& spec, int horizon) {
  if (horizon < 0) throw ValidationError("horizon must be >= 0");
  ValidateKernel(spec);
  std::vector<double> samples(static_cast<size_t>(horizon));
  for (int dt = 0; dt < horizon; ++dt) {
    samples[static_cast<size_t>(dt)] = ResponseUnchecked(spec, dt);
  }
  return samples;
}

double StepLeaky(double state, double input, double leak) {
  if (!(leak > 0 && leak < 1)) {
    throw ValidationError("leak factor must lie in (0, 1)");
  }
  if (!std::isfinite(state) || !std::isfinite(input)) {
    throw DomainError("leaky integrator state and input must be finite");
  }
  return leak * state / (1.0 + state * state) + input;
}

double LeakFactor(const KernelSpec& spec) {
  if (spec.kind != KernelKind::kLeakyIntegratorNL) {
    throw MisuseError("leak factor only applies to leaky_nl kernels");
  }
  ValidateKernel(spec);
  return std::exp(-1.0 / spec.tau);
}

}  // namespace skim
