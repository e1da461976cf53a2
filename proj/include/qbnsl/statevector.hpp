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

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qbnsl/rng.hpp"

namespace qbnsl {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultQubitCeiling = 24;
inline constexpr std::size_t kOverrideQubitCeiling = 30;

/// Dense 2^q amplitude register. Basis index bit k is qubit k.
class StateVector {
 public:
  /// |0...0>. ResourceError above the ceiling (24, or 30 with override).
  explicit StateVector(std::size_t num_qubits, bool allow_override = false);

  /// Hadamard wall applied to |0...0>: every amplitude 2^(-q/2).
  static StateVector uniform_superposition(std::size_t num_qubits, bool allow_override = false);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<Complex> amplitudes() noexcept { return amplitudes_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  Complex amplitude(std::uint64_t index) const { return amplitudes_.at(index); }
  double probability(std::uint64_t index) const { return std::norm(amplitudes_.at(index)); }

  double norm() const;
  void normalize();
  /// Resets to |0...0>.
  void reset();
  void set_basis_state(std::uint64_t index);

 private:
  std::size_t num_qubits_;
  std::vector<Complex> amplitudes_;
};

enum class GateKind { kH, kRx, kRz, kCnot, kZz };

/// One gate of the QAOA gate set. For CNOT targets[0] is the control.
struct GateOp {
  GateKind kind = GateKind::kH;
  std::array<std::size_t, 2> targets{0, 0};
  double theta = 0.0;

  static GateOp h(std::size_t q) { return {GateKind::kH, {q, q}, 0.0}; }
  static GateOp rx(double theta, std::size_t q) { return {GateKind::kRx, {q, q}, theta}; }
  static GateOp rz(double theta, std::size_t q) { return {GateKind::kRz, {q, q}, theta}; }
  static GateOp cnot(std::size_t control, std::size_t target) {
    return {GateKind::kCnot, {control, target}, 0.0};
  }
  static GateOp zz(double theta, std::size_t a, std::size_t b) { return {GateKind::kZz, {a, b}, theta}; }

  std::size_t arity() const noexcept { return (kind == GateKind::kCnot || kind == GateKind::kZz) ? 2 : 1; }
  friend bool operator==(const GateOp&, const GateOp&) = default;
};

// RZ(t) = diag(e^{-it/2}, e^{it/2}); RX(t) = exp(-i t X / 2);
// ZZ(t) = e^{-it/2} on equal target bits, e^{it/2} otherwise.
void apply_gate(StateVector& state, const GateOp& gate);
void apply_gates(StateVector& state, std::span<const GateOp> gates);

/// General single-qubit operator, row-major {m00, m01, m10, m11}. Not
/// required to be unitary.
using Matrix2 = std::array<Complex, 4>;
void apply_matrix(StateVector& state, std::size_t qubit, const Matrix2& m);

/// RX(theta) on every qubit.
void apply_rx_all(StateVector& state, double theta);
/// Multiplies amplitude z by exp(-i * gamma * energies[z]): the product of
/// all RZ/ZZ rotations of a diagonal cost layer in one pass.
void apply_diagonal_phase(StateVector& state, std::span<const double> energies, double gamma);

/// sum_z |amp_z|^2 cost(z).
double exact_diagonal_expectation(const StateVector& state,
                                  const std::function<double(std::uint64_t)>& cost);

/// Measured outcomes of t shots keyed by basis index.
class ShotHistogram {
 public:
  explicit ShotHistogram(std::size_t num_qubits = 0) : num_qubits_(num_qubits) {}

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t count(std::uint64_t index) const;
  void add(std::uint64_t index, std::uint64_t times = 1);
  void merge(const ShotHistogram& other);

  friend bool operator==(const ShotHistogram&, const ShotHistogram&) = default;

 private:
  std::size_t num_qubits_;
  std::uint64_t total_ = 0;
  std::map<std::uint64_t, std::uint64_t> counts_;
};

/// One draw from |amp|^2 (uses one uniform from rng).
std::uint64_t sample_once(const StateVector& state, Rng& rng);
/// t i.i.d. draws; deterministic for a given seed.
ShotHistogram sample(const StateVector& state, std::size_t shots, std::uint64_t seed);

/// Line-based gate program: `H q`, `RX theta q`, `RZ theta q`, `CNOT c t`,
/// `ZZ theta a b`. Angles are written in shortest round-trip form.
std::string write_gate_program(std::span<const GateOp> gates);
std::vector<GateOp> parse_gate_program(std::istream& in);

}  // namespace qbnsl
