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

// Slow, direct reference implementations used only by the tests. None of
// these call into the library code they check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qbnsl/dataset.hpp"
#include "qbnsl/graph.hpp"
#include "qbnsl/network.hpp"

namespace oracle {

// Row-major n*n 0/1 matrix, entry (i, j) = arc i -> j.
using Digraph = std::vector<std::uint8_t>;

inline bool is_acyclic(const Digraph& g, std::size_t n) {
  // 0 unvisited, 1 on stack, 2 done
  std::vector<int> color(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (color[s]) continue;
    stack.push_back({s, 0});
    color[s] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == n) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t w = next++;
      if (!g[v * n + w]) continue;
      if (color[w] == 1) return false;
      if (color[w] == 0) {
        color[w] = 1;
        stack.push_back({w, 0});
      }
    }
  }
  return true;
}

inline std::size_t in_degree(const Digraph& g, std::size_t n, std::size_t v) {
  std::size_t d = 0;
  for (std::size_t u = 0; u < n; ++u) d += g[u * n + v];
  return d;
}

// Every acyclic digraph on n nodes whose in-degrees are at most max_indegree.
inline std::vector<Digraph> all_dags(std::size_t n, std::size_t max_indegree = 64) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) slots.push_back({i, j});
  std::vector<Digraph> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    Digraph g(n * n, 0);
    for (std::size_t b = 0; b < slots.size(); ++b)
      if (mask >> b & 1) g[slots[b].first * n + slots[b].second] = 1;
    bool ok = is_acyclic(g, n);
    for (std::size_t v = 0; ok && v < n; ++v) ok = in_degree(g, n, v) <= max_indegree;
    if (ok) out.push_back(std::move(g));
  }
  return out;
}

inline qbnsl::AdjacencyMatrix to_adjacency(const Digraph& g, std::size_t n) {
  qbnsl::AdjacencyMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g[i * n + j]) a.set_arc(i, j);
  return a;
}

inline std::vector<std::size_t> parents_of(const Digraph& g, std::size_t n, std::size_t v) {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n; ++u)
    if (g[u * n + v]) out.push_back(u);
  return out;
}

// BIC by a single pass over rows keyed on (parent values) -> state counts.
inline double bic_by_rows(const qbnsl::DiscreteDataset& data, std::size_t node,
                          const std::vector<std::size_t>& parents) {
  std::map<std::vector<int>, std::map<int, double>> counts;
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    std::vector<int> key;
    for (auto p : parents) key.push_back(data.value(r, p));
    counts[key][data.value(r, node)] += 1.0;
  }
  double ll = 0.0;
  for (const auto& [key, states] : counts) {
    double total = 0.0;
    for (const auto& [s, c] : states) total += c;
    for (const auto& [s, c] : states) ll += c * std::log(c / total);
  }
  double q = 1.0;
  for (auto p : parents) q *= static_cast<double>(data.cardinality(p));
  const double r = static_cast<double>(data.cardinality(node));
  return ll - 0.5 * std::log(static_cast<double>(data.num_rows())) * (r - 1.0) * q;
}

// BDeu as a sequential Polya-urn predictive product over the rows.
inline double bdeu_by_urn(const qbnsl::DiscreteDataset& data, std::size_t node,
                          const std::vector<std::size_t>& parents, double ess) {
  double q = 1.0;
  for (auto p : parents) q *= static_cast<double>(data.cardinality(p));
  const double r = static_cast<double>(data.cardinality(node));
  std::map<std::vector<int>, std::map<int, double>> seen;
  std::map<std::vector<int>, double> seen_total;
  double log_p = 0.0;
  for (std::size_t row = 0; row < data.num_rows(); ++row) {
    std::vector<int> key;
    for (auto p : parents) key.push_back(data.value(row, p));
    const int s = data.value(row, node);
    log_p += std::log((seen[key][s] + ess / (q * r)) / (seen_total[key] + ess / q));
    seen[key][s] += 1.0;
    seen_total[key] += 1.0;
  }
  return log_p;
}

// Qubit indices written out from the layout definition.
inline std::size_t a_qubit(std::size_t n, std::size_t i, std::size_t j) {
  return i * (n - 1) + (j < i ? j : j - 1);
}
inline std::size_t r_qubit(std::size_t n, std::size_t i, std::size_t j) {
  std::size_t idx = n * (n - 1);
  for (std::size_t a = 0; a < i; ++a) idx += n - 1 - a;
  return idx + (j - i - 1);
}

struct PenaltyCount {
  std::size_t cyclic_triples = 0;
  std::size_t inconsistent_pairs = 0;
};

// Reads the order qubits as a tournament ("i before j") and counts 3-cycles
// and pairs whose arcs point against it.
inline PenaltyCount count_violations(const std::vector<std::uint8_t>& bits, std::size_t n) {
  auto before = [&](std::size_t i, std::size_t j) {
    return i < j ? bits[r_qubit(n, i, j)] == 1 : bits[r_qubit(n, j, i)] == 0;
  };
  PenaltyCount c;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const bool cycle1 = before(i, j) && before(j, k) && before(k, i);
        const bool cycle2 = before(j, i) && before(k, j) && before(i, k);
        if (cycle1 || cycle2) ++c.cyclic_triples;
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (bits[a_qubit(n, i, j)] && !before(i, j)) ++c.inconsistent_pairs;
      if (bits[a_qubit(n, j, i)] && !before(j, i)) ++c.inconsistent_pairs;
    }
  return c;
}

inline Digraph adjacency_block(const std::vector<std::uint8_t>& bits, std::size_t n) {
  Digraph g(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g[i * n + j] = bits[a_qubit(n, i, j)];
  return g;
}

// CVaR by expanding the histogram into individual shots and sorting.
template <class Cost>
double cvar_expanded(const std::map<std::uint64_t, std::uint64_t>& counts, Cost cost,
                     double alpha) {
  std::vector<double> shots;
  for (const auto& [z, c] : counts)
    for (std::uint64_t k = 0; k < c; ++k) shots.push_back(cost(z));
  std::sort(shots.begin(), shots.end());
  // ceil(alpha t) of the exact product; 0.3 * 10 must give 3, not 4
  std::size_t keep =
      static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(shots.size()) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, shots.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < keep; ++k) sum += shots[k];
  return sum / static_cast<double>(keep);
}

// Dense complex matrices over q qubits; basis index bit k is qubit k.
using C = std::complex<double>;

struct Matrix {
  std::size_t dim = 0;
  std::vector<C> v;
  explicit Matrix(std::size_t d = 0) : dim(d), v(d * d, C(0.0, 0.0)) {}
  C& operator()(std::size_t i, std::size_t j) { return v[i * dim + j]; }
  C operator()(std::size_t i, std::size_t j) const { return v[i * dim + j]; }
  static Matrix identity(std::size_t d) {
    Matrix m(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.dim);
  for (std::size_t i = 0; i < a.dim; ++i)
    for (std::size_t k = 0; k < a.dim; ++k) {
      if (a(i, k) == C(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < a.dim; ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix c(a.dim);
  for (std::size_t i = 0; i < a.v.size(); ++i) c.v[i] = a.v[i] + b.v[i];
  return c;
}

inline Matrix dagger(const Matrix& a) {
  Matrix c(a.dim);
  for (std::size_t i = 0; i < a.dim; ++i)
    for (std::size_t j = 0; j < a.dim; ++j) c(i, j) = std::conj(a(j, i));
  return c;
}

using Mat2 = std::array<C, 4>;  // row-major

// 2x2 operator on `qubit` of a q-qubit register.
inline Matrix embed(const Mat2& m, std::size_t qubit, std::size_t q) {
  const std::size_t d = std::size_t{1} << q;
  Matrix out(d);
  const std::size_t mask = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if ((i & ~mask) != (j & ~mask)) continue;
      out(i, j) = m[((i & mask) ? 2 : 0) + ((j & mask) ? 1 : 0)];
    }
  return out;
}

inline Mat2 hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {C(s), C(s), C(s), C(-s)};
}
inline Mat2 rx(double t) {
  return {C(std::cos(t / 2)), C(0, -std::sin(t / 2)), C(0, -std::sin(t / 2)), C(std::cos(t / 2))};
}
inline Mat2 rz(double t) { return {std::polar(1.0, -t / 2), C(0), C(0), std::polar(1.0, t / 2)}; }

inline Matrix cnot(std::size_t control, std::size_t target, std::size_t q) {
  const std::size_t d = std::size_t{1} << q;
  Matrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t j = (i >> control & 1) ? i ^ (std::size_t{1} << target) : i;
    out(j, i) = 1.0;
  }
  return out;
}

inline Matrix zz(double t, std::size_t a, std::size_t b, std::size_t q) {
  const std::size_t d = std::size_t{1} << q;
  Matrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const bool equal = ((i >> a) & 1) == ((i >> b) & 1);
    out(i, i) = std::polar(1.0, equal ? -t / 2 : t / 2);
  }
  return out;
}

inline Matrix conjugate(const Matrix& u, const Matrix& rho) { return u * rho * dagger(u); }

enum class Channel { kAmplitudeDamping, kPhaseDamping, kDepolarizing };

inline std::vector<Mat2> kraus_ops(Channel c, double w) {
  switch (c) {
    case Channel::kAmplitudeDamping:
      return {Mat2{C(1), C(0), C(0), C(std::sqrt(1 - w))}, Mat2{C(0), C(std::sqrt(w)), C(0), C(0)}};
    case Channel::kPhaseDamping:
      return {Mat2{C(1), C(0), C(0), C(std::sqrt(1 - w))}, Mat2{C(0), C(0), C(0), C(std::sqrt(w))}};
    case Channel::kDepolarizing: {
      const double a = std::sqrt(1 - w), b = std::sqrt(w / 3);
      return {Mat2{C(a), C(0), C(0), C(a)}, Mat2{C(0), C(b), C(b), C(0)},
              Mat2{C(0), C(0, -b), C(0, b), C(0)}, Mat2{C(b), C(0), C(0), C(-b)}};
    }
  }
  return {};
}

inline Matrix apply_channel(const Matrix& rho, Channel c, double w, std::size_t qubit,
                            std::size_t q) {
  Matrix out(rho.dim);
  for (const auto& k : kraus_ops(c, w)) out = out + conjugate(embed(k, qubit, q), rho);
  return out;
}

inline Matrix pure_density(const std::vector<C>& psi) {
  Matrix rho(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
  return rho;
}

inline std::vector<C> apply(const Matrix& m, const std::vector<C>& psi) {
  std::vector<C> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) out[i] += m(i, j) * psi[j];
  return out;
}

// Random network over n binary variables: arcs only from lower to higher
// index, in-degree at most 2, CPT entries uniform in [0.05, 0.95].
inline qbnsl::BayesianNetwork random_network(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<qbnsl::Variable> vars;
  for (std::size_t i = 0; i < n; ++i) vars.push_back({"X" + std::to_string(i), {"0", "1"}});
  std::vector<qbnsl::Arc> arcs;
  for (std::size_t j = 1; j < n; ++j) {
    std::size_t added = 0;
    for (std::size_t i = 0; i < j && added < 2; ++i)
      if (u(rng) < 0.6) {
        arcs.push_back({i, j});
        ++added;
      }
  }
  qbnsl::Dag dag = qbnsl::Dag::from_arcs(n, arcs);
  std::vector<qbnsl::BayesianNetwork::Table> cpts;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rows = std::size_t{1} << dag.parents(i).size();
    qbnsl::BayesianNetwork::Table t;
    for (std::size_t r = 0; r < rows; ++r) {
      const double p = 0.05 + 0.9 * u(rng);
      t.push_back({p, 1.0 - p});
    }
    cpts.push_back(std::move(t));
  }
  return qbnsl::BayesianNetwork(std::move(vars), std::move(dag), std::move(cpts));
}

}  // namespace oracle
