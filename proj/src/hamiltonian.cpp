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

#include "qbnsl/hamiltonian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "qbnsl/error.hpp"

namespace qbnsl {

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string s(bits.size(), '0');
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) s[k] = '1';
  }
  return s;
}

Bits bits_from_string(const std::string& text) {
  Bits out(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '1') {
      out[k] = 1;
    } else if (text[k] != '0') {
      throw DomainError("bit string contains '" + std::string(1, text[k]) + "'");
    }
  }
  return out;
}

Bits bits_from_index(std::uint64_t index, std::size_t length) {
  Bits out(length);
  for (std::size_t k = 0; k < length; ++k) out[k] = static_cast<std::uint8_t>((index >> k) & 1);
  return out;
}

std::uint64_t index_from_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64) throw DomainError("bit string longer than 64");
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) index |= std::uint64_t{1} << k;
  }
  return index;
}

// --- layout ---------------------------------------------------------------

QubitLayout::QubitLayout(std::size_t num_nodes) : n_(num_nodes) {
  if (num_nodes < 2) throw DomainError("qubit layout needs at least two nodes");
}

std::size_t QubitLayout::adjacency_qubit(std::size_t from, std::size_t to) const {
  if (from >= n_ || to >= n_ || from == to) throw DomainError("invalid adjacency index");
  return from * (n_ - 1) + (to < from ? to : to - 1);
}

std::size_t QubitLayout::order_qubit(std::size_t i, std::size_t j) const {
  if (i >= j || j >= n_) throw DomainError("order index requires i < j < n");
  const std::size_t row_start = i * (n_ - 1) - i * (i - 1) / 2;
  return n_ * (n_ - 1) + row_start + (j - i - 1);
}

QubitLayout QubitLayout::for_qubit_count(std::size_t num_qubits) {
  for (std::size_t n = 2; n <= 64; ++n) {
    const std::size_t v = 3 * n * (n - 1) / 2;
    if (v == num_qubits) return QubitLayout(n);
    if (v > num_qubits) break;
  }
  throw DomainError(std::to_string(num_qubits) + " qubits is not 3n(n-1)/2 for any n");
}

// --- polynomial -----------------------------------------------------------

void PseudoBooleanPolynomial::add_term(std::span<const std::size_t> vars, double coef) {
  if (!std::isfinite(coef)) throw DomainError("non-finite polynomial coefficient");
  Monomial m(vars.begin(), vars.end());
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  if (m.size() > 2) throw DomainError("polynomial terms are limited to degree 2");
  if (!m.empty() && m.back() >= num_vars_) throw DomainError("variable index out of range");
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.emplace(std::move(m), coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double PseudoBooleanPolynomial::constant() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0.0 : it->second;
}

std::size_t PseudoBooleanPolynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

double PseudoBooleanPolynomial::evaluate(std::span<const std::uint8_t> bits) const {
  if (bits.size() != num_vars_) {
    throw DomainError("evaluate: expected " + std::to_string(num_vars_) + " bits, got " +
                      std::to_string(bits.size()));
  }
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    bool on = true;
    for (auto v : m) on = on && bits[v];
    if (on) total += c;
  }
  return total;
}

double PseudoBooleanPolynomial::evaluate_index(std::uint64_t index) const {
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    bool on = true;
    for (auto v : m) on = on && ((index >> v) & 1);
    if (on) total += c;
  }
  return total;
}

PseudoBooleanPolynomial& PseudoBooleanPolynomial::operator+=(const PseudoBooleanPolynomial& other) {
  if (other.num_vars_ != num_vars_) throw DomainError("polynomial sizes differ");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

// --- Ising ----------------------------------------------------------------

double IsingCoefficients::evaluate_spins(std::span<const int> spins) const {
  if (spins.size() != num_qubits) throw DomainError("spin vector length mismatch");
  double total = constant;
  for (const auto& [k, h] : linear) total += h * spins[k];
  for (const auto& [kl, j] : quadratic) total += j * spins[kl.first] * spins[kl.second];
  return total;
}

double IsingCoefficients::evaluate_bits(std::span<const std::uint8_t> bits) const {
  if (bits.size() != num_qubits) throw DomainError("bit vector length mismatch");
  std::vector<int> spins(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) spins[k] = bits[k] ? -1 : 1;
  return evaluate_spins(spins);
}

double IsingCoefficients::energy_index(std::uint64_t index) const {
  double total = 0.0;
  for (const auto& [k, h] : linear) total += ((index >> k) & 1) ? -h : h;
  for (const auto& [kl, j] : quadratic) {
    const bool differ = (((index >> kl.first) ^ (index >> kl.second)) & 1) != 0;
    total += differ ? -j : j;
  }
  return total;
}

IsingCoefficients to_ising(const PseudoBooleanPolynomial& poly) {
  if (poly.degree() > 2) throw DomainError("to_ising supports degree <= 2 only");
  IsingCoefficients out;
  out.num_qubits = poly.num_vars();
  for (const auto& [m, c] : poly.terms()) {
    if (m.empty()) {
      out.constant += c;
    } else if (m.size() == 1) {
      // c (1 - z)/2
      out.constant += c / 2;
      out.linear[m[0]] -= c / 2;
    } else {
      // c (1 - z_k)(1 - z_l)/4
      out.constant += c / 4;
      out.linear[m[0]] -= c / 4;
      out.linear[m[1]] -= c / 4;
      out.quadratic[{m[0], m[1]}] += c / 4;
    }
  }
  std::erase_if(out.linear, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(out.quadratic, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

// --- Hamiltonian assembly -------------------------------------------------

double score_weight(const LocalScoreTable& table, std::size_t node, const ParentSet& parents) {
  if (parents.size() > table.max_indegree()) {
    throw DomainError("score_weight: parent set larger than the maximum in-degree");
  }
  const std::size_t size = parents.size();
  double w = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << size); ++mask) {
    ParentSet subset;
    for (std::size_t b = 0; b < size; ++b) {
      if (mask & (1u << b)) subset.push_back(parents[b]);
    }
    const bool odd_gap = ((size - subset.size()) % 2) == 1;
    const double s = table.score(node, subset);
    w += odd_gap ? -s : s;
  }
  return w;
}

double dominance_penalty(const LocalScoreTable& table) {
  const double range = table.range();
  const double n = static_cast<double>(table.num_nodes());
  // A constant table still needs strictly positive penalties.
  return range > 0.0 ? 2.0 * range * n : 1.0;
}

PseudoBooleanPolynomial build_score_hamiltonian(const LocalScoreTable& table) {
  if (!table.complete()) throw DomainError("score table is incomplete");
  const std::size_t n = table.num_nodes();
  const QubitLayout layout(n);
  PseudoBooleanPolynomial h(layout.num_qubits());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& parents : LocalScoreTable::candidate_parent_sets(n, i, table.max_indegree())) {
      std::vector<std::size_t> vars;
      for (auto j : parents) vars.push_back(layout.adjacency_qubit(j, i));
      h.add_term(vars, -score_weight(table, i, parents));
    }
  }
  return h;
}

PseudoBooleanPolynomial build_penalty_hamiltonian(std::size_t num_nodes, PenaltyWeights weights) {
  if (!(weights.trans > 0.0) || !(weights.consist > 0.0)) {
    throw DomainError("penalty weights must be positive");
  }
  const QubitLayout layout(num_nodes);
  const std::size_t n = num_nodes;
  PseudoBooleanPolynomial h(layout.num_qubits());
  const double dt = weights.trans;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto rij = layout.order_qubit(i, j);
        const auto rjk = layout.order_qubit(j, k);
        const auto rik = layout.order_qubit(i, k);
        h.add_term({rik}, dt);
        h.add_term({rij, rjk}, dt);
        h.add_term({rij, rik}, -dt);
        h.add_term({rjk, rik}, -dt);
      }
    }
  }
  const double dc = weights.consist;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rij = layout.order_qubit(i, j);
      const auto aij = layout.adjacency_qubit(i, j);
      const auto aji = layout.adjacency_qubit(j, i);
      h.add_term({aji, rij}, dc);
      h.add_term({aij}, dc);
      h.add_term({aij, rij}, -dc);
    }
  }
  return h;
}

PseudoBooleanPolynomial build_hamiltonian(const LocalScoreTable& table, PenaltyWeights weights) {
  auto h = build_score_hamiltonian(table);
  h += build_penalty_hamiltonian(table.num_nodes(), weights);
  return h;
}

PseudoBooleanPolynomial build_hamiltonian(const LocalScoreTable& table) {
  const double d = dominance_penalty(table);
  return build_hamiltonian(table, {d, d});
}

// --- decode / encode ------------------------------------------------------

DecodedSolution decode(std::span<const std::uint8_t> bits, const QubitLayout& layout) {
  if (bits.size() != layout.num_qubits()) {
    throw DomainError("decode: expected " + std::to_string(layout.num_qubits()) +
                      " bits, got " + std::to_string(bits.size()));
  }
  const std::size_t n = layout.num_nodes();
  DecodedSolution out;
  out.adjacency = AdjacencyMatrix(n);
  out.order.assign(n, std::vector<std::uint8_t>(n, 0));
  out.in_degrees.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && bits[layout.adjacency_qubit(i, j)]) {
        out.adjacency.set_arc(i, j);
        ++out.in_degrees[j];
      }
      if (i < j) out.order[i][j] = bits[layout.order_qubit(i, j)] ? 1 : 0;
    }
  }
  return out;
}

Bits encode(const AdjacencyMatrix& g, std::span<const std::size_t> order, const QubitLayout& layout) {
  const std::size_t n = layout.num_nodes();
  if (g.size() != n || order.size() != n) throw DomainError("encode: size mismatch");
  std::vector<std::size_t> position(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    if (order[p] >= n || position[order[p]] != n) throw DomainError("encode: order is not a permutation");
    position[order[p]] = p;
  }
  Bits bits(layout.num_qubits(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && g.arc(i, j)) bits[layout.adjacency_qubit(i, j)] = 1;
      if (i < j && position[i] < position[j]) bits[layout.order_qubit(i, j)] = 1;
    }
  }
  return bits;
}

// --- brute force ----------------------------------------------------------

BinaryMinimum brute_force_minimum(const PseudoBooleanPolynomial& poly) {
  const std::size_t v = poly.num_vars();
  if (v > 24) throw ResourceError("brute_force_minimum is limited to 24 variables");

  // Enumerate codes in increasing order with variable k stored at code bit
  // (v - 1 - k), so code order is lexicographic order of the bit strings.
  struct Flat {
    std::uint64_t mask;
    double coef;
  };
  double constant = 0.0;
  std::vector<Flat> flat;
  for (const auto& [m, c] : poly.terms()) {
    if (m.empty()) {
      constant += c;
      continue;
    }
    std::uint64_t mask = 0;
    for (auto var : m) mask |= std::uint64_t{1} << (v - 1 - var);
    flat.push_back({mask, c});
  }
  auto value_of = [&](std::uint64_t code) {
    double total = constant;
    for (const auto& t : flat) {
      if ((code & t.mask) == t.mask) total += t.coef;
    }
    return total;
  };

  const std::uint64_t total = std::uint64_t{1} << v;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < total; ++code) best = std::min(best, value_of(code));
  const double tol = kScoreTieTolerance * std::max(1.0, std::abs(best));
  for (std::uint64_t code = 0; code < total; ++code) {
    const double value = value_of(code);
    if (value <= best + tol) {
      Bits bits(v);
      for (std::size_t k = 0; k < v; ++k) bits[k] = static_cast<std::uint8_t>((code >> (v - 1 - k)) & 1);
      return {std::move(bits), value};
    }
  }
  return {Bits(v, 0), constant};  // v == 0
}

// --- text format ----------------------------------------------------------

namespace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double x = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw IoError("cannot parse number '" + token + "'");
  }
  return x;
}

std::size_t parse_index(const std::string& token) {
  std::size_t x = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw IoError("cannot parse index '" + token + "'");
  }
  return x;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

void write_polynomial(std::ostream& out, const PseudoBooleanPolynomial& poly) {
  out << "pbp " << poly.num_vars() << '\n';
  for (const auto& [m, c] : poly.terms()) {
    out << "term " << format_double(c);
    for (auto v : m) out << ' ' << v;
    out << '\n';
  }
}

PseudoBooleanPolynomial read_polynomial(std::istream& in) {
  std::string line;
  std::optional<PseudoBooleanPolynomial> poly;
  while (std::getline(in, line)) {
    const auto tok = tokens_of(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "pbp") {
      if (poly || tok.size() != 2) throw IoError("polynomial: malformed header");
      poly.emplace(parse_index(tok[1]));
    } else if (tok[0] == "term") {
      if (!poly || tok.size() < 2) throw IoError("polynomial: term before header");
      std::vector<std::size_t> vars;
      for (std::size_t k = 2; k < tok.size(); ++k) vars.push_back(parse_index(tok[k]));
      try {
        poly->add_term(vars, parse_double(tok[1]));
      } catch (const DomainError& e) {
        throw IoError(std::string("polynomial: ") + e.what());
      }
    } else {
      throw IoError("polynomial: unknown record '" + tok[0] + "'");
    }
  }
  if (!poly) throw IoError("polynomial: missing header");
  return *poly;
}

void write_ising(std::ostream& out, const IsingCoefficients& ising) {
  out << "ising " << ising.num_qubits << '\n';
  out << "constant " << format_double(ising.constant) << '\n';
  for (const auto& [k, h] : ising.linear) out << "h " << k << ' ' << format_double(h) << '\n';
  for (const auto& [kl, j] : ising.quadratic) {
    out << "J " << kl.first << ' ' << kl.second << ' ' << format_double(j) << '\n';
  }
}

IsingCoefficients read_ising(std::istream& in) {
  std::string line;
  IsingCoefficients out;
  bool header = false;
  while (std::getline(in, line)) {
    const auto tok = tokens_of(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "ising" && tok.size() == 2 && !header) {
      out.num_qubits = parse_index(tok[1]);
      header = true;
    } else if (!header) {
      throw IoError("ising: record before header");
    } else if (tok[0] == "constant" && tok.size() == 2) {
      out.constant = parse_double(tok[1]);
    } else if (tok[0] == "h" && tok.size() == 3) {
      const auto k = parse_index(tok[1]);
      if (k >= out.num_qubits) throw IoError("ising: qubit out of range");
      out.linear[k] = parse_double(tok[2]);
    } else if (tok[0] == "J" && tok.size() == 4) {
      auto k = parse_index(tok[1]);
      auto l = parse_index(tok[2]);
      if (k == l || k >= out.num_qubits || l >= out.num_qubits) throw IoError("ising: bad pair");
      if (k > l) std::swap(k, l);
      out.quadratic[{k, l}] = parse_double(tok[3]);
    } else {
      throw IoError("ising: malformed record '" + line + "'");
    }
  }
  if (!header) throw IoError("ising: missing header");
  return out;
}

}  // namespace qbnsl
