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

#include "qbnsl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "qbnsl/error.hpp"

namespace qbnsl {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

DiscreteDataset::DiscreteDataset(std::vector<Variable> variables,
                                 std::vector<std::vector<int>> columns)
    : variables_(std::move(variables)), columns_(std::move(columns)) {
  if (variables_.empty()) throw DomainError("dataset has no variables");
  if (columns_.size() != variables_.size()) {
    throw DomainError("dataset has " + std::to_string(variables_.size()) + " variables but " +
                      std::to_string(columns_.size()) + " columns");
  }
  num_rows_ = columns_.front().size();
  if (num_rows_ == 0) throw DomainError("dataset has no rows");
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.cardinality() < 2) {
      throw DomainError("variable '" + v.name + "' has fewer than two states");
    }
    if (columns_[i].size() != num_rows_) {
      throw DomainError("column '" + v.name + "' has a different row count");
    }
    const int card = static_cast<int>(v.cardinality());
    for (int cell : columns_[i]) {
      if (cell < 0 || cell >= card) {
        throw DomainError("cell value " + std::to_string(cell) + " out of range for '" + v.name +
                          "'");
      }
    }
  }
}

std::vector<std::string> DiscreteDataset::names() const {
  std::vector<std::string> out;
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::size_t DiscreteDataset::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw DomainError("unknown variable '" + name + "'");
}

DiscreteDataset DiscreteDataset::select(std::span<const std::size_t> vars) const {
  std::vector<Variable> v;
  std::vector<std::vector<int>> c;
  for (auto i : vars) {
    v.push_back(variables_.at(i));
    c.push_back(columns_.at(i));
  }
  return DiscreteDataset(std::move(v), std::move(c));
}

DiscreteDataset read_dataset_csv(std::istream& in, std::span<const Variable> declared) {
  std::string line;
  do {
    if (!std::getline(in, line)) throw IoError("dataset: missing header row");
  } while (!line.empty() && line[0] == '#');
  const auto header = split_csv_line(line);
  const std::size_t n = header.size();

  std::vector<Variable> vars(n);
  std::vector<std::unordered_map<std::string, int>> lookup(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (header[i].empty()) throw IoError("dataset: empty variable name in header");
    vars[i].name = header[i];
    if (!declared.empty()) {
      auto it = std::find_if(declared.begin(), declared.end(),
                             [&](const Variable& d) { return d.name == header[i]; });
      if (it == declared.end()) throw IoError("dataset: undeclared variable '" + header[i] + "'");
      vars[i].states = it->states;
      for (std::size_t s = 0; s < it->states.size(); ++s) {
        lookup[i][it->states[s]] = static_cast<int>(s);
      }
    }
  }

  std::vector<std::vector<int>> columns(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != n) {
      throw IoError("dataset line " + std::to_string(line_no) + ": expected " +
                    std::to_string(n) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto it = lookup[i].find(cells[i]);
      if (it == lookup[i].end()) {
        if (!declared.empty()) {
          throw IoError("dataset line " + std::to_string(line_no) + ": unknown state '" +
                        cells[i] + "' for '" + vars[i].name + "'");
        }
        const int idx = static_cast<int>(vars[i].states.size());
        vars[i].states.push_back(cells[i]);
        it = lookup[i].emplace(cells[i], idx).first;
      }
      columns[i].push_back(it->second);
    }
  }
  try {
    return DiscreteDataset(std::move(vars), std::move(columns));
  } catch (const DomainError& e) {
    throw IoError(std::string("dataset: ") + e.what());
  }
}

DiscreteDataset load_dataset_csv(const std::filesystem::path& path,
                                 std::span<const Variable> declared) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return read_dataset_csv(in, declared);
}

void write_dataset_csv(std::ostream& out, const DiscreteDataset& data) {
  for (std::size_t i = 0; i < data.num_variables(); ++i) {
    out << (i ? "," : "") << data.variable(i).name;
  }
  out << '\n';
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < data.num_variables(); ++i) {
      out << (i ? "," : "") << data.variable(i).states[data.value(r, i)];
    }
    out << '\n';
  }
}

}  // namespace qbnsl
