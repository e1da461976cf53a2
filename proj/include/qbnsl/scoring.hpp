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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qbnsl/dataset.hpp"
#include "qbnsl/graph.hpp"

namespace qbnsl {

struct ScoreKind {
  enum class Type { kBic, kBdeu };

  Type type = Type::kBic;
  double ess = 1.0;  // BDeu equivalent sample size

  static ScoreKind bic() { return {Type::kBic, 1.0}; }
  static ScoreKind bdeu(double ess = 1.0) { return {Type::kBdeu, ess}; }
  std::string name() const { return type == Type::kBic ? "BIC" : "BDeu"; }
};

/// Sorted, duplicate-free list of parent node indices.
using ParentSet = std::vector<std::size_t>;

/// Local score of `node` given `parents`; higher is better.
///
/// BIC: maximum-likelihood log-likelihood (natural log, 0 log 0 := 0) minus
/// (ln N)/2 * (r_i - 1) * prod r_k.
/// BDeu: log Dirichlet-multinomial marginal likelihood with the equivalent
/// sample size spread uniformly over parent configurations and states.
double local_score(const DiscreteDataset& data, std::size_t node,
                   std::span<const std::size_t> parents, ScoreKind kind);

/// Sum of local scores of a graph's families.
double structure_score(const DiscreteDataset& data, const AdjacencyMatrix& g, ScoreKind kind);

/// s_i(K) for every node i and every parent set |K| <= max_indegree.
class LocalScoreTable {
 public:
  LocalScoreTable(std::size_t num_nodes, std::size_t max_indegree, ScoreKind kind);

  std::size_t num_nodes() const noexcept { return entries_.size(); }
  std::size_t max_indegree() const noexcept { return max_indegree_; }
  ScoreKind kind() const noexcept { return kind_; }

  /// Throws DomainError for a missing (node, parents) pair.
  double score(std::size_t node, const ParentSet& parents) const;
  void set(std::size_t node, ParentSet parents, double value);
  const std::map<ParentSet, double>& node_entries(std::size_t node) const {
    return entries_.at(node);
  }

  std::size_t size() const;
  /// True when every parent set allowed by max_indegree has an entry.
  bool complete() const;
  double max_score() const;
  double min_score() const;
  double range() const { return max_score() - min_score(); }

  /// Decomposable score of g; DomainError if some in-degree exceeds the bound.
  double structure_score(const AdjacencyMatrix& g) const;

  /// All parent sets of `node` with |K| <= max_indegree, in (size, lex) order.
  static std::vector<ParentSet> candidate_parent_sets(std::size_t num_nodes, std::size_t node,
                                                      std::size_t max_indegree);

 private:
  std::size_t max_indegree_;
  ScoreKind kind_;
  std::vector<std::map<ParentSet, double>> entries_;
};

LocalScoreTable build_score_table(const DiscreteDataset& data, ScoreKind kind,
                                  std::size_t max_indegree = 2);

struct ScoredDag {
  Dag dag;
  double score = 0.0;
};

// Two scores closer than this (relative) count as a tie during exhaustive
// searches; the winner is then decided by bit order.
inline constexpr double kScoreTieTolerance = 1e-9;

/// Maximum-score DAG with in-degree <= table.max_indegree(), by enumerating
/// every adjacency bit vector (qubit layout order). Ties go to the
/// lexicographically smallest vector. Refuses n > 5 with ResourceError.
ScoredDag exhaustive_best_dag(const LocalScoreTable& table);

}  // namespace qbnsl
