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

#include "qbnsl/network.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>

#include <json.hpp>

#include "qbnsl/error.hpp"
#include "qbnsl/rng.hpp"

namespace qbnsl {

using nlohmann::json;

BayesianNetwork::BayesianNetwork(std::vector<Variable> variables, Dag dag,
                                 std::vector<Table> cpts)
    : variables_(std::move(variables)), dag_(std::move(dag)), cpts_(std::move(cpts)) {
  const std::size_t n = variables_.size();
  if (n == 0) throw DomainError("network has no nodes");
  if (dag_.size() != n || cpts_.size() != n) {
    throw DomainError("network: node, graph and CPT counts disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t card = variables_[i].cardinality();
    if (card < 2) throw DomainError("network node '" + variables_[i].name + "' needs >= 2 states");
    std::size_t rows = 1;
    for (auto p : dag_.parents(i)) rows *= variables_[p].cardinality();
    if (cpts_[i].size() != rows) {
      throw DomainError("CPT of '" + variables_[i].name + "' has " +
                        std::to_string(cpts_[i].size()) + " rows, expected " +
                        std::to_string(rows));
    }
    for (const auto& row : cpts_[i]) {
      if (row.size() != card) {
        throw DomainError("CPT row of '" + variables_[i].name + "' has wrong width");
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw DomainError("CPT of '" + variables_[i].name + "' has an invalid probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError("CPT row of '" + variables_[i].name + "' does not sum to 1");
      }
    }
  }
}

std::vector<std::string> BayesianNetwork::names() const {
  std::vector<std::string> out;
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::size_t BayesianNetwork::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw DomainError("unknown network node '" + name + "'");
}

std::size_t BayesianNetwork::parent_configuration(std::size_t node,
                                                  const std::vector<int>& assignment) const {
  std::size_t config = 0;
  for (auto p : dag_.parents(node)) {
    config = config * variables_[p].cardinality() + static_cast<std::size_t>(assignment.at(p));
  }
  return config;
}

namespace {

std::size_t state_index(const Variable& v, const std::string& label) {
  for (std::size_t s = 0; s < v.states.size(); ++s) {
    if (v.states[s] == label) return s;
  }
  throw IoError("network: unknown state '" + label + "' of node '" + v.name + "'");
}

BayesianNetwork parse_network(const json& doc) {
  if (!doc.is_object()) throw IoError("network: top level must be an object");
  const auto& nodes = doc.at("nodes");
  std::vector<Variable> vars;
  std::map<std::string, std::size_t> index;
  for (const auto& node : nodes) {
    Variable v;
    v.name = node.at("name").get<std::string>();
    v.states = node.at("states").get<std::vector<std::string>>();
    if (index.count(v.name)) throw IoError("network: duplicate node '" + v.name + "'");
    index[v.name] = vars.size();
    vars.push_back(std::move(v));
  }
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw IoError("network: unknown node '" + name + "'");
    return it->second;
  };

  AdjacencyMatrix adj(vars.size());
  if (doc.contains("arcs")) {
    for (const auto& arc : doc.at("arcs")) {
      if (!arc.is_array() || arc.size() != 2) {
        throw IoError("network: each arc must be a [parent, child] pair");
      }
      adj.set_arc(lookup(arc[0].get<std::string>()), lookup(arc[1].get<std::string>()));
    }
  }
  Dag dag = Dag::from_adjacency(std::move(adj));

  std::vector<BayesianNetwork::Table> cpts(vars.size());
  const auto& cpt_doc = doc.at("cpts");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!cpt_doc.contains(vars[i].name)) {
      throw IoError("network: missing CPT for '" + vars[i].name + "'");
    }
    const auto parents = dag.parents(i);
    std::size_t rows = 1;
    for (auto p : parents) rows *= vars[p].cardinality();
    BayesianNetwork::Table table(rows);
    std::vector<bool> seen(rows, false);
    for (const auto& row : cpt_doc.at(vars[i].name)) {
      const auto labels = row.at("parents").get<std::vector<std::string>>();
      if (labels.size() != parents.size()) {
        throw IoError("network: CPT row of '" + vars[i].name + "' lists " +
                      std::to_string(labels.size()) + " parent states, expected " +
                      std::to_string(parents.size()));
      }
      std::size_t config = 0;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        config = config * vars[parents[k]].cardinality() + state_index(vars[parents[k]], labels[k]);
      }
      if (seen[config]) throw IoError("network: duplicate CPT row for '" + vars[i].name + "'");
      seen[config] = true;
      auto probs = row.at("probs").get<std::vector<double>>();
      if (probs.size() != vars[i].cardinality()) {
        throw IoError("network: CPT row of '" + vars[i].name + "' has wrong width");
      }
      double sum = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0)) throw IoError("network: negative probability in '" + vars[i].name + "'");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw IoError("network: CPT row of '" + vars[i].name + "' sums to " +
                      std::to_string(sum));
      }
      for (auto& p : probs) p /= sum;
      table[config] = std::move(probs);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!seen[r]) throw IoError("network: CPT of '" + vars[i].name + "' is incomplete");
    }
    cpts[i] = std::move(table);
  }
  return BayesianNetwork(std::move(vars), std::move(dag), std::move(cpts));
}

}  // namespace

BayesianNetwork read_network_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
    return parse_network(doc);
  } catch (const json::exception& e) {
    throw IoError(std::string("network: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("network: ") + e.what());
  }
}

BayesianNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network '" + path.string() + "'");
  return read_network_json(in);
}

void write_network_json(std::ostream& out, const BayesianNetwork& bn) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& v : bn.variables()) doc["nodes"].push_back({{"name", v.name}, {"states", v.states}});
  doc["arcs"] = json::array();
  for (const auto& [i, j] : bn.dag().arcs()) {
    doc["arcs"].push_back({bn.variables()[i].name, bn.variables()[j].name});
  }
  doc["cpts"] = json::object();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const auto parents = bn.dag().parents(i);
    json rows = json::array();
    for (std::size_t config = 0; config < bn.cpt(i).size(); ++config) {
      std::vector<std::string> labels(parents.size());
      std::size_t rest = config;
      for (std::size_t k = parents.size(); k-- > 0;) {
        const auto& pv = bn.variables()[parents[k]];
        labels[k] = pv.states[rest % pv.cardinality()];
        rest /= pv.cardinality();
      }
      rows.push_back({{"parents", labels}, {"probs", bn.cpt(i)[config]}});
    }
    doc["cpts"][bn.variables()[i].name] = rows;
  }
  out << std::setw(2) << doc << '\n';
}

DiscreteDataset forward_sample(const BayesianNetwork& bn, std::size_t rows, std::uint64_t seed) {
  if (rows == 0) throw DomainError("forward_sample requires at least one row");
  const std::size_t n = bn.size();
  const auto order = bn.dag().topological_order();
  std::vector<std::vector<std::size_t>> parents(n);
  for (std::size_t i = 0; i < n; ++i) parents[i] = bn.dag().parents(i);

  Rng rng(seed);
  std::vector<std::vector<int>> columns(n, std::vector<int>(rows));
  std::vector<int> assignment(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto node : order) {
      std::size_t config = 0;
      for (auto p : parents[node]) {
        config = config * bn.variables()[p].cardinality() + static_cast<std::size_t>(assignment[p]);
      }
      const auto& dist = bn.cpt(node)[config];
      const double u = uniform01(rng);
      double acc = 0.0;
      int state = static_cast<int>(dist.size()) - 1;
      for (std::size_t s = 0; s < dist.size(); ++s) {
        acc += dist[s];
        if (u < acc) {
          state = static_cast<int>(s);
          break;
        }
      }
      // Guard against round-off leaving u >= acc on a zero-probability tail.
      while (state > 0 && dist[state] == 0.0) --state;
      assignment[node] = state;
      columns[node][r] = state;
    }
  }
  return DiscreteDataset(bn.variables(), std::move(columns));
}

}  // namespace qbnsl
