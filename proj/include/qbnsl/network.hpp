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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbnsl/dataset.hpp"
#include "qbnsl/graph.hpp"

namespace qbnsl {

/// Discrete Bayesian network: a DAG plus one conditional probability table
/// per node.
///
/// `cpt(i)` holds one row per joint parent configuration. Parents are taken in
/// ascending node order and the configuration index is mixed-radix with the
/// last parent varying fastest. Each row is a distribution over the node's
/// states and must sum to 1 within 1e-9.
class BayesianNetwork {
 public:
  using Table = std::vector<std::vector<double>>;

  BayesianNetwork(std::vector<Variable> variables, Dag dag, std::vector<Table> cpts);

  std::size_t size() const noexcept { return variables_.size(); }
  const Dag& dag() const noexcept { return dag_; }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Table& cpt(std::size_t node) const { return cpts_.at(node); }
  std::vector<std::string> names() const;
  std::size_t index_of(const std::string& name) const;

  /// Row of cpt(node) for the given full assignment (only parent entries read).
  std::size_t parent_configuration(std::size_t node, const std::vector<int>& assignment) const;

 private:
  std::vector<Variable> variables_;
  Dag dag_;
  std::vector<Table> cpts_;
};

/// Reads the JSON network format documented in docs/network-format.md.
/// Row probabilities are validated to sum to 1 within 1e-6 and then
/// renormalised exactly.
BayesianNetwork read_network_json(std::istream& in);
BayesianNetwork load_network(const std::filesystem::path& path);
void write_network_json(std::ostream& out, const BayesianNetwork& bn);

/// Probabilistic logic sampling: draws every row by visiting nodes in
/// topological order and sampling each from its CPT row given the parents
/// already drawn. Reproducible for a fixed seed.
DiscreteDataset forward_sample(const BayesianNetwork& bn, std::size_t rows, std::uint64_t seed);

}  // namespace qbnsl
