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

#include "qbnsl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "qbnsl/error.hpp"
#include "qbnsl/rng.hpp"

namespace qbnsl {
namespace {

bool reachable(const AdjacencyMatrix& g, std::size_t from, std::size_t to) {
  const std::size_t n = g.size();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && g.arc(u, v)) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

bool same_value(double a, double b) {
  return std::abs(a - b) <= kScoreTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

// Index of a uniformly chosen best entry; ties within tolerance.
std::size_t pick_best(const std::vector<double>& deltas, Rng& rng) {
  const double best = *std::max_element(deltas.begin(), deltas.end());
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (same_value(deltas[k], best)) ties.push_back(k);
  }
  return ties[uniform_below(rng, ties.size())];
}

void check_table(const LocalScoreTable& table, std::size_t max_indegree) {
  if (!table.complete()) throw DomainError("score table is incomplete");
  if (max_indegree > table.max_indegree()) {
    throw DomainError("max in-degree exceeds the score table's bound");
  }
}

}  // namespace

SearchMove SearchMove::inverse() const {
  switch (kind) {
    case Kind::kAdd: return {Kind::kRemove, from, to};
    case Kind::kRemove: return {Kind::kAdd, from, to};
    case Kind::kReverse: return {Kind::kReverse, to, from};
  }
  return *this;
}

void apply_move(AdjacencyMatrix& g, const SearchMove& move) {
  const bool present = g.arc(move.from, move.to);
  switch (move.kind) {
    case SearchMove::Kind::kAdd:
      if (present) throw DomainError("arc already present");
      g.set_arc(move.from, move.to, true);
      break;
    case SearchMove::Kind::kRemove:
      if (!present) throw DomainError("arc not present");
      g.set_arc(move.from, move.to, false);
      break;
    case SearchMove::Kind::kReverse:
      if (!present) throw DomainError("arc not present");
      g.set_arc(move.from, move.to, false);
      g.set_arc(move.to, move.from, true);
      break;
  }
}

std::vector<SearchMove> legal_moves(const AdjacencyMatrix& g, std::size_t max_indegree) {
  const std::size_t n = g.size();
  std::vector<SearchMove> moves;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (g.arc(i, j)) {
        moves.push_back({SearchMove::Kind::kRemove, i, j});
        if (g.in_degree(i) < max_indegree) {
          AdjacencyMatrix h = g;
          h.set_arc(i, j, false);
          if (!reachable(h, i, j)) moves.push_back({SearchMove::Kind::kReverse, i, j});
        }
      } else if (!g.arc(j, i) && g.in_degree(j) < max_indegree && !reachable(g, j, i)) {
        moves.push_back({SearchMove::Kind::kAdd, i, j});
      }
    }
  }
  return moves;
}

double move_delta(const LocalScoreTable& table, const AdjacencyMatrix& g, const SearchMove& move) {
  AdjacencyMatrix h = g;
  apply_move(h, move);
  double delta = table.score(move.to, h.parents(move.to)) - table.score(move.to, g.parents(move.to));
  if (move.kind == SearchMove::Kind::kReverse) {
    delta += table.score(move.from, h.parents(move.from)) -
             table.score(move.from, g.parents(move.from));
  }
  return delta;
}

SearchResult hill_climb(const LocalScoreTable& table, std::size_t max_indegree, std::uint64_t seed) {
  check_table(table, max_indegree);
  Rng rng(seed);
  AdjacencyMatrix g(table.num_nodes());
  double score = table.structure_score(g);
  SearchResult out;
  while (true) {
    const auto moves = legal_moves(g, max_indegree);
    if (moves.empty()) break;
    std::vector<double> deltas;
    deltas.reserve(moves.size());
    for (const auto& m : moves) deltas.push_back(move_delta(table, g, m));
    const std::size_t k = pick_best(deltas, rng);
    if (!(deltas[k] > 0.0) || same_value(score + deltas[k], score)) break;
    apply_move(g, moves[k]);
    score = table.structure_score(g);
    ++out.moves;
    out.trace.push_back(score);
  }
  out.dag = Dag::from_adjacency(g);
  out.score = score;
  return out;
}

SearchResult tabu_search(const LocalScoreTable& table, std::size_t max_indegree,
                         const TabuConfig& cfg, std::uint64_t seed) {
  check_table(table, max_indegree);
  if (cfg.tenure < 1) throw DomainError("tabu tenure must be at least 1");
  Rng rng(seed);
  AdjacencyMatrix g(table.num_nodes());
  double score = table.structure_score(g);
  AdjacencyMatrix best = g;
  double best_score = score;
  std::deque<SearchMove> recent;
  std::size_t stall = 0;
  SearchResult out;
  while (stall < cfg.max_stall) {
    const auto all = legal_moves(g, max_indegree);
    std::vector<SearchMove> moves;
    std::vector<double> deltas;
    for (const auto& m : all) {
      const double d = move_delta(table, g, m);
      const bool tabu = std::find(recent.begin(), recent.end(), m.inverse()) != recent.end();
      const bool aspires = score + d > best_score && !same_value(score + d, best_score);
      if (tabu && !aspires) continue;
      moves.push_back(m);
      deltas.push_back(d);
    }
    if (moves.empty()) break;
    const std::size_t k = pick_best(deltas, rng);
    apply_move(g, moves[k]);
    score = table.structure_score(g);
    recent.push_back(moves[k]);
    if (recent.size() > cfg.tenure) recent.pop_front();
    ++out.moves;
    out.trace.push_back(score);
    if (score > best_score && !same_value(score, best_score)) {
      best = g;
      best_score = score;
      stall = 0;
    } else {
      ++stall;
    }
  }
  out.dag = Dag::from_adjacency(best);
  out.score = best_score;
  return out;
}

void AnnealSchedule::validate() const {
  if (!(t0 > tend && tend > 0.0)) throw DomainError("anneal schedule needs t0 > tend > 0");
  if (steps < 1) throw DomainError("anneal schedule needs at least one step");
}

double AnnealSchedule::decay() const {
  validate();
  if (steps == 1) return 1.0;
  return std::pow(tend / t0, 1.0 / static_cast<double>(steps - 1));
}

double AnnealSchedule::temperature(std::size_t step) const {
  return t0 * std::pow(decay(), static_cast<double>(step));
}

AnnealResult simulated_annealing_qubo(const PseudoBooleanPolynomial& poly,
                                      const AnnealSchedule& schedule, std::uint64_t seed,
                                      std::size_t max_indegree, double delta_max,
                                      const std::optional<Bits>& start) {
  schedule.validate();
  const std::size_t v = poly.num_vars();
  if (v == 0 || v > 63) throw DomainError("annealer supports 1 to 63 variables");
  const CostOracle cost(poly, max_indegree, delta_max);
  Rng rng(seed);
  std::uint64_t state = 0;
  if (start) {
    if (start->size() != v) throw DomainError("start bitstring length does not match polynomial");
    state = index_from_bits(*start);
  } else {
    for (std::size_t k = 0; k < v; ++k) state |= (rng() >> 63) << k;
  }
  double current = cost(state);
  std::uint64_t best_state = state;
  double best = current;
  const double decay = schedule.decay();
  double temperature = schedule.t0;
  AnnealResult out;
  out.best_trace.reserve(schedule.steps);
  for (std::size_t s = 0; s < schedule.steps; ++s) {
    const std::uint64_t flipped = state ^ (std::uint64_t{1} << uniform_below(rng, v));
    const double next = cost(flipped);
    const double delta = next - current;
    const double u = uniform01(rng);
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
      state = flipped;
      current = next;
      if (current < best) {
        best = current;
        best_state = state;
      }
    }
    out.best_trace.push_back(best);
    temperature *= decay;
  }
  out.bits = bits_from_index(best_state, v);
  out.cost = best;
  return out;
}

ResultRecord to_record(const SearchResult& result, const char* algorithm) {
  ResultRecord rec;
  rec.algorithm = algorithm;
  rec.cost = -result.score;
  rec.adjacency = result.dag.adjacency();
  rec.iterations = result.moves;
  rec.converged = true;
  for (double s : result.trace) rec.trace.push_back(-s);
  return rec;
}

ResultRecord to_record(const AnnealResult& result, std::size_t num_qubits) {
  ResultRecord rec;
  rec.algorithm = kAnnealLabel;
  rec.cost = result.cost;
  rec.bits = bits_to_string(result.bits);
  rec.adjacency = decode(result.bits, QubitLayout::for_qubit_count(num_qubits)).adjacency;
  rec.iterations = result.best_trace.size();
  rec.converged = true;
  return rec;
}

}  // namespace qbnsl
