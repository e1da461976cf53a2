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
#include <optional>
#include <vector>

#include "qbnsl/graph.hpp"
#include "qbnsl/hamiltonian.hpp"
#include "qbnsl/qaoa.hpp"
#include "qbnsl/scoring.hpp"

namespace qbnsl {

struct SearchMove {
  enum class Kind { kAdd, kRemove, kReverse };

  Kind kind = Kind::kAdd;
  std::size_t from = 0;
  std::size_t to = 0;

  /// The move that undoes this one.
  SearchMove inverse() const;
  friend bool operator==(const SearchMove&, const SearchMove&) = default;
};

/// Applies `move` to `g` in place; DomainError if the move does not apply
/// (arc missing or already present).
void apply_move(AdjacencyMatrix& g, const SearchMove& move);

/// Every move that keeps `g` acyclic with in-degrees at most `max_indegree`.
std::vector<SearchMove> legal_moves(const AdjacencyMatrix& g, std::size_t max_indegree);

/// Change in decomposable score caused by `move`; only the touched children
/// are rescored.
double move_delta(const LocalScoreTable& table, const AdjacencyMatrix& g, const SearchMove& move);

struct SearchResult {
  Dag dag;
  double score = 0.0;
  std::size_t moves = 0;
  std::vector<double> trace;  // score after each accepted move
};

/// Greedy ascent from the empty graph; stops when no move improves the score.
/// The seed only breaks exact ties between equally good moves.
SearchResult hill_climb(const LocalScoreTable& table, std::size_t max_indegree, std::uint64_t seed);

struct TabuConfig {
  std::size_t tenure = 10;
  std::size_t max_stall = 50;
};

/// Hill climbing that takes the best non-tabu move even when it worsens the
/// score. A move is tabu when it undoes one of the last `tenure` moves, unless
/// it would beat the best score seen. Returns the best graph seen.
SearchResult tabu_search(const LocalScoreTable& table, std::size_t max_indegree,
                         const TabuConfig& cfg, std::uint64_t seed);

struct AnnealSchedule {
  double t0 = 10.0;
  double tend = 1e-3;
  std::size_t steps = 100000;

  void validate() const;
  /// Geometric factor so that step steps-1 runs at tend.
  double decay() const;
  double temperature(std::size_t step) const;
};

struct AnnealResult {
  Bits bits;
  double cost = 0.0;
  std::vector<double> best_trace;  // best cost after each step
};

inline constexpr const char* kAnnealLabel = "SA (classical substitute)";

/// Metropolis single-bit-flip chain on penalized_cost with geometric cooling.
/// Starts from `start` when given, otherwise from a uniform random bitstring.
AnnealResult simulated_annealing_qubo(const PseudoBooleanPolynomial& poly,
                                      const AnnealSchedule& schedule, std::uint64_t seed,
                                      std::size_t max_indegree, double delta_max,
                                      const std::optional<Bits>& start = std::nullopt);

ResultRecord to_record(const SearchResult& result, const char* algorithm);
ResultRecord to_record(const AnnealResult& result, std::size_t num_qubits);

}  // namespace qbnsl
