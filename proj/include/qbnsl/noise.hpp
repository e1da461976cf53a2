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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qbnsl/statevector.hpp"

namespace qbnsl {

enum class ChannelKind { kAmplitudeDamping, kPhaseDamping, kDepolarizing };

std::string channel_name(ChannelKind kind);
/// Accepts "amplitude_damping"/"ad", "phase_damping"/"pd", "depolarizing"/"de".
ChannelKind parse_channel(const std::string& name);

/// Single-qubit Kraus channel with strength omega in [0, 1].
///
///   amplitude damping: K0 = diag(1, sqrt(1-w)), K1 = sqrt(w) |0><1|
///   phase damping:     K0 = diag(1, sqrt(1-w)), K1 = sqrt(w) |1><1|
///   depolarizing:      sqrt(1-w) I, sqrt(w/3) {X, Y, Z}
class NoiseChannel {
 public:
  NoiseChannel(ChannelKind kind, double omega);

  ChannelKind kind() const noexcept { return kind_; }
  double omega() const noexcept { return omega_; }
  const std::vector<Matrix2>& kraus() const noexcept { return kraus_; }
  /// Amplitude/phase damping follow 1-qubit gates; depolarizing follows
  /// each 2-qubit gate on both of its targets.
  bool follows_single_qubit_gates() const noexcept { return kind_ != ChannelKind::kDepolarizing; }

 private:
  ChannelKind kind_;
  double omega_;
  std::vector<Matrix2> kraus_;
};

struct NoiseModel {
  std::vector<NoiseChannel> channels;

  bool empty() const noexcept { return channels.empty(); }
};

/// Picks Kraus branch k with probability ||K_k psi||^2, applies it and
/// renormalises. Returns the branch index.
std::size_t apply_kraus_branch(StateVector& state, std::size_t qubit, const NoiseChannel& channel,
                               Rng& rng);

/// Runs `gates` from |0...0> as one stochastic trajectory of the noise model.
StateVector run_noisy_trajectory(std::size_t num_qubits, std::span<const GateOp> gates,
                                 const NoiseModel& noise, std::uint64_t seed,
                                 bool allow_override = false);
/// Same, reusing `state` and an existing generator.
void run_noisy_trajectory(StateVector& state, std::span<const GateOp> gates,
                          const NoiseModel& noise, Rng& rng);

}  // namespace qbnsl
