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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbnsl/graph.hpp"
#include "qbnsl/scoring.hpp"

namespace qbnsl {

/// One byte per binary variable, each 0 or 1. Serialized with variable 0
/// leftmost; as a basis-state index, variable k is bit k.
using Bits = std::vector<std::uint8_t>;

std::string bits_to_string(std::span<const std::uint8_t> bits);
Bits bits_from_string(const std::string& text);
Bits bits_from_index(std::uint64_t index, std::size_t length);
std::uint64_t index_from_bits(std::span<const std::uint8_t> bits);

/// Qubit assignment for an n-node structure problem.
///
/// Adjacency qubits a_ij (i != j) come first in row-major order with the
/// diagonal skipped, then order qubits r_ij (i < j) row-major over the
/// strict upper triangle. Total 3n(n-1)/2.
class QubitLayout {
 public:
  explicit QubitLayout(std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_qubits() const noexcept { return n_ * (n_ - 1) + n_ * (n_ - 1) / 2; }
  std::size_t num_adjacency_qubits() const noexcept { return n_ * (n_ - 1); }
  std::size_t adjacency_qubit(std::size_t from, std::size_t to) const;
  std::size_t order_qubit(std::size_t i, std::size_t j) const;

  /// Layout whose qubit count equals `num_qubits`; DomainError if none does.
  static QubitLayout for_qubit_count(std::size_t num_qubits);

 private:
  std::size_t n_;
};

/// Multilinear polynomial of degree <= 2 over binary variables.
class PseudoBooleanPolynomial {
 public:
  using Monomial = std::vector<std::size_t>;  // sorted, distinct, size 0..2

  explicit PseudoBooleanPolynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  std::size_t num_vars() const noexcept { return num_vars_; }
  /// Adds coef * prod x_v. Repeated variables collapse (x*x = x); zero
  /// coefficients left after merging are dropped.
  void add_term(std::span<const std::size_t> vars, double coef);
  void add_term(std::initializer_list<std::size_t> vars, double coef) {
    add_term(std::span<const std::size_t>(vars.begin(), vars.size()), coef);
  }
  const std::map<Monomial, double>& terms() const noexcept { return terms_; }
  double constant() const;
  std::size_t degree() const;

  double evaluate(std::span<const std::uint8_t> bits) const;
  double evaluate_index(std::uint64_t index) const;

  PseudoBooleanPolynomial& operator+=(const PseudoBooleanPolynomial& other);

 private:
  std::size_t num_vars_;
  std::map<Monomial, double> terms_;
};

/// constant + sum h_k z_k + sum J_kl z_k z_l over spins z in {+1, -1}.
struct IsingCoefficients {
  std::size_t num_qubits = 0;
  double constant = 0.0;
  std::map<std::size_t, double> linear;
  std::map<std::pair<std::size_t, std::size_t>, double> quadratic;

  double evaluate_spins(std::span<const int> spins) const;
  /// Evaluates at z_k = 1 - 2 x_k.
  double evaluate_bits(std::span<const std::uint8_t> bits) const;
  /// Diagonal energy (without the constant) of basis state `index`.
  double energy_index(std::uint64_t index) const;
};

/// Exact substitution x_k = (1 - z_k) / 2. DomainError if degree > 2.
IsingCoefficients to_ising(const PseudoBooleanPolynomial& poly);

/// Inclusion-exclusion weight w_i(J) = sum_{K subset J} (-1)^{|J|-|K|} s_i(K).
double score_weight(const LocalScoreTable& table, std::size_t node, const ParentSet& parents);

struct PenaltyWeights {
  double trans = 0.0;
  double consist = 0.0;
};

/// 2 * (max s_i(K) - min s_i(K)) * n. Large enough that no state violating
/// the order constraints can undercut a feasible one.
double dominance_penalty(const LocalScoreTable& table);

/// -sum_i sum_J w_i(J) prod_{j in J} a_ji: equals -score on DAG encodings.
PseudoBooleanPolynomial build_score_hamiltonian(const LocalScoreTable& table);
/// Transitivity of R and consistency of A with R.
PseudoBooleanPolynomial build_penalty_hamiltonian(std::size_t num_nodes, PenaltyWeights weights);
/// Score part plus penalty part. DomainError for an incomplete table or a
/// non-positive weight.
PseudoBooleanPolynomial build_hamiltonian(const LocalScoreTable& table, PenaltyWeights weights);
PseudoBooleanPolynomial build_hamiltonian(const LocalScoreTable& table);

struct DecodedSolution {
  AdjacencyMatrix adjacency;
  /// order[i][j] for i < j; entries on and below the diagonal are zero.
  std::vector<std::vector<std::uint8_t>> order;
  std::vector<std::size_t> in_degrees;  // column sums of adjacency
};

DecodedSolution decode(std::span<const std::uint8_t> bits, const QubitLayout& layout);
/// Bits for graph g with r_ij = 1 iff i precedes j in `order` (a permutation).
Bits encode(const AdjacencyMatrix& g, std::span<const std::size_t> order, const QubitLayout& layout);

struct BinaryMinimum {
  Bits bits;
  double value = 0.0;
};

/// Global minimum by enumeration of all 2^v assignments (v <= 24, else
/// ResourceError). Among values within 1e-9 (relative) of the minimum the
/// lexicographically smallest bit string wins.
BinaryMinimum brute_force_minimum(const PseudoBooleanPolynomial& poly);

void write_polynomial(std::ostream& out, const PseudoBooleanPolynomial& poly);
PseudoBooleanPolynomial read_polynomial(std::istream& in);
void write_ising(std::ostream& out, const IsingCoefficients& ising);
IsingCoefficients read_ising(std::istream& in);

}  // namespace qbnsl
