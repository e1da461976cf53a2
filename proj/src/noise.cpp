// Copyright 2026 The qbnsl Authors
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

#include "qbnsl/noise.hpp"

#include <cmath>

#include "qbnsl/error.hpp"

namespace qbnsl {

std::string channel_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kAmplitudeDamping: return "amplitude_damping";
    case ChannelKind::kPhaseDamping: return "phase_damping";
    case ChannelKind::kDepolarizing: return "depolarizing";
  }
  return "unknown";
}

ChannelKind parse_channel(const std::string& name) {
  if (name == "amplitude_damping" || name == "ad") return ChannelKind::kAmplitudeDamping;
  if (name == "phase_damping" || name == "pd") return ChannelKind::kPhaseDamping;
  if (name == "depolarizing" || name == "de") return ChannelKind::kDepolarizing;
  throw DomainError("unknown noise channel '" + name + "'");
}

NoiseChannel::NoiseChannel(ChannelKind kind, double omega) : kind_(kind), omega_(omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("noise strength must lie in [0, 1]");
  const Complex z(0.0, 0.0);
  const double keep = std::sqrt(1.0 - omega);
  const double jump = std::sqrt(omega);
  switch (kind) {
    case ChannelKind::kAmplitudeDamping:
      kraus_ = {Matrix2{1.0, z, z, keep}, Matrix2{z, jump, z, z}};
      break;
    case ChannelKind::kPhaseDamping:
      kraus_ = {Matrix2{1.0, z, z, keep}, Matrix2{z, z, z, jump}};
      break;
    case ChannelKind::kDepolarizing: {
      const double p = std::sqrt(omega / 3.0);
      const Complex i(0.0, 1.0);
      kraus_ = {Matrix2{keep, z, z, keep}, Matrix2{z, p, p, z}, Matrix2{z, -i * p, i * p, z},
                Matrix2{p, z, z, -p}};
      break;
    }
  }
}

namespace {

// P(qubit = 1), relative to the state's squared norm.
double excited_population(const StateVector& state, std::size_t qubit) {
  const auto amp = state.amplitudes();
  const std::size_t bit = std::size_t{1} << qubit;
  double p1 = 0.0, total = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double p = std::norm(amp[i]);
    total += p;
    if (i & bit) p1 += p;
  }
  return p1 / total;
}

}  // namespace

std::size_t apply_kraus_branch(StateVector& state, std::size_t qubit, const NoiseChannel& channel,
                               Rng& rng) {
  if (qubit >= state.num_qubits()) throw DomainError("noise target out of range");
  const double w = channel.omega();
  const double u = uniform01(rng);
  if (channel.kind() == ChannelKind::kDepolarizing) {
    // Pauli branches are unitary, so their weights do not depend on the state.
    if (u >= w) return 0;  // K0 is proportional to the identity
    const std::size_t branch = 1 + static_cast<std::size_t>(uniform_below(rng, 3));
    Matrix2 pauli = channel.kraus()[branch];
    for (auto& e : pauli) e /= std::sqrt(w / 3.0);
    apply_matrix(state, qubit, pauli);
    return branch;
  }
  if (w == 0.0) return 0;

  // Both damping channels: ||K1 psi||^2 = w * P(qubit = 1), and K0 only
  // rescales the |1> half, so both branches act on amplitude pairs directly.
  const double jump = w * excited_population(state, qubit);
  auto amp = state.amplitudes();
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = amp.size();
  if (u < jump) {
    const double scale = std::sqrt(w / jump);
    const bool relax = channel.kind() == ChannelKind::kAmplitudeDamping;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        if (relax) {
          amp[i] = amp[i + stride] * scale;
          amp[i + stride] = 0.0;
        } else {
          amp[i] = 0.0;
          amp[i + stride] *= scale;
        }
      }
    }
    return 1;
  }
  const double s0 = 1.0 / std::sqrt(1.0 - jump);
  const double s1 = std::sqrt(1.0 - w) * s0;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      amp[i] *= s0;
      amp[i + stride] *= s1;
    }
  }
  return 0;
}

void run_noisy_trajectory(StateVector& state, std::span<const GateOp> gates,
                          const NoiseModel& noise, Rng& rng) {
  for (const auto& g : gates) {
    apply_gate(state, g);
    for (const auto& ch : noise.channels) {
      if (g.arity() == 1 && ch.follows_single_qubit_gates()) {
        apply_kraus_branch(state, g.targets[0], ch, rng);
      } else if (g.arity() == 2 && !ch.follows_single_qubit_gates()) {
        apply_kraus_branch(state, g.targets[0], ch, rng);
        apply_kraus_branch(state, g.targets[1], ch, rng);
      }
    }
  }
}

StateVector run_noisy_trajectory(std::size_t num_qubits, std::span<const GateOp> gates,
                                 const NoiseModel& noise, std::uint64_t seed,
                                 bool allow_override) {
  StateVector state(num_qubits, allow_override);
  Rng rng(seed);
  run_noisy_trajectory(state, gates, noise, rng);
  return state;
}

}  // namespace qbnsl
