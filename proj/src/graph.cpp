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

#include "qbnsl/graph.hpp"

#include <deque>
#include <sstream>

#include "qbnsl/error.hpp"

namespace qbnsl {

void AdjacencyMatrix::check(std::size_t node) const {
  if (node >= n_) {
    throw DomainError("node index " + std::to_string(node) + " out of range for " +
                      std::to_string(n_) + "-node graph");
  }
}

bool AdjacencyMatrix::arc(std::size_t from, std::size_t to) const {
  check(from);
  check(to);
  return bits_[from * n_ + to] != 0;
}

void AdjacencyMatrix::set_arc(std::size_t from, std::size_t to, bool present) {
  check(from);
  check(to);
  if (from == to) {
    if (present) throw DomainError("self-loop on node " + std::to_string(from));
    return;
  }
  bits_[from * n_ + to] = present ? 1 : 0;
}

std::size_t AdjacencyMatrix::in_degree(std::size_t node) const {
  check(node);
  std::size_t d = 0;
  for (std::size_t j = 0; j < n_; ++j) d += bits_[j * n_ + node];
  return d;
}

std::vector<std::size_t> AdjacencyMatrix::parents(std::size_t node) const {
  check(node);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if (bits_[j * n_ + node]) out.push_back(j);
  }
  return out;
}

std::size_t AdjacencyMatrix::arc_count() const {
  std::size_t c = 0;
  for (auto b : bits_) c += b;
  return c;
}

std::vector<Arc> AdjacencyMatrix::arcs() const {
  std::vector<Arc> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (bits_[i * n_ + j]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::optional<std::vector<std::size_t>> AdjacencyMatrix::topological_order() const {
  std::vector<std::size_t> indeg(n_);
  for (std::size_t i = 0; i < n_; ++i) indeg[i] = in_degree(i);
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n_; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n_);
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.pop_front();
    order.push_back(u);
    for (std::size_t v = 0; v < n_; ++v) {
      if (bits_[u * n_ + v] && --indeg[v] == 0) ready.push_back(v);
    }
  }
  if (order.size() != n_) return std::nullopt;
  return order;
}

AdjacencyMatrix AdjacencyMatrix::induced(std::span<const std::size_t> nodes) const {
  AdjacencyMatrix out(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      if (a != b && arc(nodes[a], nodes[b])) out.set_arc(a, b);
    }
  }
  return out;
}

Dag Dag::from_adjacency(AdjacencyMatrix adjacency) {
  if (!adjacency.is_acyclic()) throw DomainError("graph contains a directed cycle");
  Dag d;
  d.adjacency_ = std::move(adjacency);
  return d;
}

Dag Dag::from_arcs(std::size_t n, std::span<const Arc> arcs) {
  AdjacencyMatrix a(n);
  for (const auto& [from, to] : arcs) a.set_arc(from, to);
  return from_adjacency(std::move(a));
}

Dag Dag::induced(std::span<const std::size_t> nodes) const {
  return from_adjacency(adjacency_.induced(nodes));
}

std::size_t shd(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
  if (a.size() != b.size()) {
    throw DomainError("shd: graphs have " + std::to_string(a.size()) + " and " +
                      std::to_string(b.size()) + " nodes");
  }
  std::size_t edits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a.arc(i, j) != b.arc(i, j) || a.arc(j, i) != b.arc(j, i)) ++edits;
    }
  }
  return edits;
}

boost::multiprecision::cpp_int count_dags(int n) {
  using boost::multiprecision::cpp_int;
  if (n < 1) throw DomainError("count_dags requires n >= 1");
  std::vector<cpp_int> h(n + 1);
  h[0] = 1;  // makes the i = k term of the recurrence contribute C(k,k) 2^0 h(0)
  for (int k = 1; k <= n; ++k) {
    cpp_int total = 0;
    cpp_int binom = 1;
    for (int i = 1; i <= k; ++i) {
      binom = binom * (k - i + 1) / i;
      cpp_int term = binom * h[k - i];
      term <<= static_cast<unsigned>(i * (k - i));
      if (i % 2 == 1) {
        total += term;
      } else {
        total -= term;
      }
    }
    h[k] = total;
  }
  return h[n];
}

std::string format_arcs(const AdjacencyMatrix& g, std::span<const std::string> names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, j] : g.arcs()) {
    if (!first) os << ' ';
    first = false;
    if (names.size() == g.size()) {
      os << names[i] << "->" << names[j];
    } else {
      os << i << "->" << j;
    }
  }
  return os.str();
}

}  // namespace qbnsl
