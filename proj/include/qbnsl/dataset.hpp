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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qbnsl {

struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const noexcept { return states.size(); }
};

/// Column-oriented table of categorical observations.
///
/// Every cell is a state index in [0, cardinality) of its variable. The
/// constructor rejects empty tables, ragged columns, out-of-range cells and
/// variables with fewer than two states.
class DiscreteDataset {
 public:
  DiscreteDataset(std::vector<Variable> variables, std::vector<std::vector<int>> columns);

  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_rows() const noexcept { return num_rows_; }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  std::size_t cardinality(std::size_t i) const { return variables_.at(i).cardinality(); }
  std::span<const int> column(std::size_t i) const { return columns_.at(i); }
  int value(std::size_t row, std::size_t var) const { return columns_.at(var).at(row); }
  std::vector<std::string> names() const;
  std::size_t index_of(const std::string& name) const;

  /// Copy restricted to the given columns, in the given order.
  DiscreteDataset select(std::span<const std::size_t> vars) const;

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> columns_;
  std::size_t num_rows_ = 0;
};

/// Parses comma-separated text: a header of variable names, then one row of
/// state labels per observation. Labels map to indices in first-appearance
/// order unless `declared` lists the variables' states up front (in which
/// case unknown labels are an error and unobserved states are kept).
/// Lines starting with '#' before the header are skipped.
DiscreteDataset read_dataset_csv(std::istream& in, std::span<const Variable> declared = {});
DiscreteDataset load_dataset_csv(const std::filesystem::path& path,
                                 std::span<const Variable> declared = {});
void write_dataset_csv(std::ostream& out, const DiscreteDataset& data);

}  // namespace qbnsl
