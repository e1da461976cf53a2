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

#include "qbnsl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "qbnsl/error.hpp"

namespace qbnsl {
namespace {

// Joint counts N_ijk laid out as [config * r_i + state].
std::vector<std::uint32_t> family_counts(const DiscreteDataset& data, std::size_t node,
                                         std::span<const std::size_t> parents,
                                         std::size_t& num_configs) {
  num_configs = 1;
  for (auto p : parents) {
    num_configs *= data.cardinality(p);
    if (num_configs > (1u << 24)) throw ResourceError("parent configuration space too large");
  }
  const std::size_t r = data.cardinality(node);
  std::vector<std::uint32_t> counts(num_configs * r, 0);
  const auto child = data.column(node);
  std::vector<std::span<const int>> cols;
  for (auto p : parents) cols.push_back(data.column(p));
  for (std::size_t row = 0; row < data.num_rows(); ++row) {
    std::size_t config = 0;
    for (std::size_t k = 0; k < parents.size(); ++k) {
      config = config * data.cardinality(parents[k]) + static_cast<std::size_t>(cols[k][row]);
    }
    ++counts[config * r + static_cast<std::size_t>(child[row])];
  }
  return counts;
}

}  // namespace

double local_score(const DiscreteDataset& data, std::size_t node,
                   std::span<const std::size_t> parents, ScoreKind kind) {
  if (node >= data.num_variables()) throw DomainError("local_score: node out of range");
  for (std::size_t k = 0; k < parents.size(); ++k) {
    if (parents[k] == node) throw DomainError("local_score: node is its own parent");
    if (parents[k] >= data.num_variables()) throw DomainError("local_score: parent out of range");
    for (std::size_t l = 0; l < k; ++l) {
      if (parents[l] == parents[k]) throw DomainError("local_score: repeated parent");
    }
  }

  std::size_t q = 0;
  const auto counts = family_counts(data, node, parents, q);
  const std::size_t r = data.cardinality(node);

  if (kind.type == ScoreKind::Type::kBic) {
    double ll = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      std::uint64_t nij = 0;
      for (std::size_t k = 0; k < r; ++k) nij += counts[j * r + k];
      if (nij == 0) continue;
      for (std::size_t k = 0; k < r; ++k) {
        const double nijk = counts[j * r + k];
        if (nijk > 0) ll += nijk * std::log(nijk / static_cast<double>(nij));
      }
    }
    const double n = static_cast<double>(data.num_rows());
    const double params = static_cast<double>(r - 1) * static_cast<double>(q);
    return ll - 0.5 * std::log(n) * params;
  }

  if (!(kind.ess > 0.0)) throw DomainError("BDeu equivalent sample size must be positive");
  const double a_j = kind.ess / static_cast<double>(q);
  const double a_jk = a_j / static_cast<double>(r);
  const double lg_aj = std::lgamma(a_j);
  const double lg_ajk = std::lgamma(a_jk);
  double score = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    std::uint64_t nij = 0;
    for (std::size_t k = 0; k < r; ++k) {
      const auto nijk = counts[j * r + k];
      nij += nijk;
      if (nijk) score += std::lgamma(a_jk + nijk) - lg_ajk;
    }
    if (nij) score += lg_aj - std::lgamma(a_j + static_cast<double>(nij));
  }
  return score;
}

double structure_score(const DiscreteDataset& data, const AdjacencyMatrix& g, ScoreKind kind) {
  if (g.size() != data.num_variables()) throw DomainError("graph and dataset sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) total += local_score(data, i, g.parents(i), kind);
  return total;
}

LocalScoreTable::LocalScoreTable(std::size_t num_nodes, std::size_t max_indegree, ScoreKind kind)
    : max_indegree_(max_indegree), kind_(kind), entries_(num_nodes) {
  if (num_nodes == 0) throw DomainError("score table needs at least one node");
}

double LocalScoreTable::score(std::size_t node, const ParentSet& parents) const {
  const auto& m = entries_.at(node);
  auto it = m.find(parents);
  if (it == m.end()) throw DomainError("score table has no entry for this parent set");
  return it->second;
}

void LocalScoreTable::set(std::size_t node, ParentSet parents, double value) {
  if (node >= entries_.size()) throw DomainError("score table: node out of range");
  std::sort(parents.begin(), parents.end());
  if (std::adjacent_find(parents.begin(), parents.end()) != parents.end() ||
      std::find(parents.begin(), parents.end(), node) != parents.end() ||
      (!parents.empty() && parents.back() >= entries_.size())) {
    throw DomainError("score table: invalid parent set");
  }
  if (parents.size() > max_indegree_) throw DomainError("score table: parent set too large");
  if (!std::isfinite(value)) throw DomainError("score table: non-finite score");
  entries_[node][std::move(parents)] = value;
}

std::size_t LocalScoreTable::size() const {
  std::size_t s = 0;
  for (const auto& m : entries_) s += m.size();
  return s;
}

bool LocalScoreTable::complete() const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (const auto& k : candidate_parent_sets(entries_.size(), i, max_indegree_)) {
      if (!entries_[i].count(k)) return false;
    }
  }
  return true;
}

double LocalScoreTable::max_score() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : entries_) {
    for (const auto& [k, v] : m) best = std::max(best, v);
  }
  return best;
}

double LocalScoreTable::min_score() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& m : entries_) {
    for (const auto& [k, v] : m) worst = std::min(worst, v);
  }
  return worst;
}

double LocalScoreTable::structure_score(const AdjacencyMatrix& g) const {
  if (g.size() != num_nodes()) throw DomainError("graph and score table sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto parents = g.parents(i);
    if (parents.size() > max_indegree_) {
      throw DomainError("in-degree of node " + std::to_string(i) + " exceeds the table bound");
    }
    total += score(i, parents);
  }
  return total;
}

std::vector<ParentSet> LocalScoreTable::candidate_parent_sets(std::size_t num_nodes,
                                                              std::size_t node,
                                                              std::size_t max_indegree) {
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < num_nodes; ++j) {
    if (j != node) others.push_back(j);
  }
  std::vector<ParentSet> out{{}};
  // Grow sets one element at a time, keeping (size, lex) order.
  std::vector<ParentSet> frontier{{}};
  for (std::size_t size = 1; size <= std::min(max_indegree, others.size()); ++size) {
    std::vector<ParentSet> next;
    for (const auto& base : frontier) {
      for (auto j : others) {
        if (!base.empty() && j <= base.back()) continue;
        auto grown = base;
        grown.push_back(j);
        next.push_back(std::move(grown));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

LocalScoreTable build_score_table(const DiscreteDataset& data, ScoreKind kind,
                                  std::size_t max_indegree) {
  const std::size_t n = data.num_variables();
  LocalScoreTable table(n, max_indegree, kind);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& k : LocalScoreTable::candidate_parent_sets(n, i, max_indegree)) {
      const double s = local_score(data, i, k, kind);
      table.set(i, std::move(k), s);
    }
  }
  return table;
}

ScoredDag exhaustive_best_dag(const LocalScoreTable& table) {
  const std::size_t n = table.num_nodes();
  if (n > 5) throw ResourceError("exhaustive DAG search is limited to n <= 5");
  if (n == 1) return {Dag(1), table.score(0, {})};

  const std::size_t bits = n * (n - 1);
  // bit position k (0 = most significant of the code) <-> arc (k / (n-1), ...)
  std::vector<Arc> arc_of(bits);
  for (std::size_t i = 0, k = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) arc_of[k++] = {i, j};
    }
  }

  struct Candidate {
    std::uint64_t code;
    double score;
  };
  std::vector<Candidate> feasible;
  const std::uint64_t total = std::uint64_t{1} << bits;
  std::vector<std::size_t> indeg(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::fill(indeg.begin(), indeg.end(), 0);
    bool ok = true;
    for (std::size_t k = 0; k < bits && ok; ++k) {
      if ((code >> (bits - 1 - k)) & 1) {
        if (++indeg[arc_of[k].second] > table.max_indegree()) ok = false;
      }
    }
    if (!ok) continue;
    AdjacencyMatrix g(n);
    for (std::size_t k = 0; k < bits; ++k) {
      if ((code >> (bits - 1 - k)) & 1) g.set_arc(arc_of[k].first, arc_of[k].second);
    }
    if (!g.is_acyclic()) continue;
    feasible.push_back({code, table.structure_score(g)});
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : feasible) best = std::max(best, c.score);
  const double tol = kScoreTieTolerance * std::max(1.0, std::abs(best));
  for (const auto& c : feasible) {
    if (c.score >= best - tol) {
      AdjacencyMatrix g(n);
      for (std::size_t k = 0; k < bits; ++k) {
        if ((c.code >> (bits - 1 - k)) & 1) g.set_arc(arc_of[k].first, arc_of[k].second);
      }
      return {Dag::from_adjacency(std::move(g)), c.score};
    }
  }
  throw DomainError("exhaustive_best_dag: no feasible graph");  // unreachable: empty graph
}

}  // namespace qbnsl
