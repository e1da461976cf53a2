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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qbnsl {

using Arc = std::pair<std::size_t, std::size_t>;

// Square 0/1 matrix over n nodes; entry (i, j) = 1 means an arc i -> j.
// The diagonal is always zero. Cycles are allowed here; see Dag.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool arc(std::size_t from, std::size_t to) const;
  void set_arc(std::size_t from, std::size_t to, bool present = true);

  std::size_t in_degree(std::size_t node) const;
  std::vector<std::size_t> parents(std::size_t node) const;
  std::size_t arc_count() const;
  std::vector<Arc> arcs() const;

  /// Kahn topological order; nullopt when the graph has a directed cycle.
  std::optional<std::vector<std::size_t>> topological_order() const;
  bool is_acyclic() const { return topological_order().has_value(); }

  /// Graph restricted to `nodes`, relabelled 0..k-1 in the given order.
  AdjacencyMatrix induced(std::span<const std::size_t> nodes) const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  void check(std::size_t node) const;

  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// An AdjacencyMatrix known to be acyclic.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::size_t n) : adjacency_(n) {}

  /// Throws DomainError if `adjacency` contains a directed cycle.
  static Dag from_adjacency(AdjacencyMatrix adjacency);
  static Dag from_arcs(std::size_t n, std::span<const Arc> arcs);

  const AdjacencyMatrix& adjacency() const noexcept { return adjacency_; }
  std::size_t size() const noexcept { return adjacency_.size(); }
  bool arc(std::size_t from, std::size_t to) const { return adjacency_.arc(from, to); }
  std::vector<std::size_t> parents(std::size_t node) const { return adjacency_.parents(node); }
  std::vector<Arc> arcs() const { return adjacency_.arcs(); }
  std::size_t arc_count() const { return adjacency_.arc_count(); }
  std::vector<std::size_t> topological_order() const { return *adjacency_.topological_order(); }
  Dag induced(std::span<const std::size_t> nodes) const;

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  AdjacencyMatrix adjacency_;
};

/// Structural Hamming distance. Each unordered node pair whose arc state
/// (none, i->j, j->i, both) differs between the graphs costs one edit, so a
/// reversed arc counts once. Throws DomainError on a size mismatch.
std::size_t shd(const AdjacencyMatrix& a, const AdjacencyMatrix& b);
inline std::size_t shd(const Dag& a, const Dag& b) { return shd(a.adjacency(), b.adjacency()); }

/// Number of labelled DAGs on n nodes (Robinson's recurrence), exact.
boost::multiprecision::cpp_int count_dags(int n);

std::string format_arcs(const AdjacencyMatrix& g, std::span<const std::string> names = {});

}  // namespace qbnsl
