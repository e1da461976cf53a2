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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbnsl/baselines.hpp"
#include "qbnsl/hamiltonian.hpp"
#include "qbnsl/noise.hpp"
#include "qbnsl/qaoa.hpp"
#include "qbnsl/scoring.hpp"
#include "qbnsl/statevector.hpp"

namespace qbnsl {

enum class Task { kScore, kLearn, kSample, kSweepPa, kSweepNoise, kCompare };

std::string task_name(Task task);
/// ConfigError (path "task") for unknown names.
Task parse_task(const std::string& name);

struct NoiseSetting {
  ChannelKind channel = ChannelKind::kPhaseDamping;
  double omega = 0.0;
};

struct ExperimentConfig {
  Task task = Task::kLearn;
  std::uint64_t seed = 0;
  std::filesystem::path output;

  // data
  std::filesystem::path dataset;
  std::filesystem::path network;
  std::string dataset_arg;  // paths as written in the config
  std::string network_arg;
  std::size_t samples = 0;             // forward samples when no dataset is given
  std::vector<std::string> variables;  // optional column subset, in order

  // score
  ScoreKind score = ScoreKind::bic();
  std::size_t max_indegree = 2;

  // qaoa
  std::vector<std::size_t> layers{3};
  std::vector<double> alphas{0.3};
  std::size_t shots = 1024;
  std::size_t restarts = 20;
  OptimizerConfig optimizer;
  std::optional<double> delta_max;
  std::optional<PenaltyWeights> penalties;
  std::optional<NoiseSetting> noise;

  // sweep-noise
  std::vector<ChannelKind> channels;
  std::vector<double> omegas;

  // compare
  std::vector<std::string> algorithms;
  TabuConfig tabu;
  AnnealSchedule anneal;
  /// Starting temperature; the dominance penalty of the instance when unset.
  std::optional<double> anneal_t0;
  std::size_t anneal_restarts = 10;

  std::size_t workers = 1;
  bool allow_override = false;

  /// Canonical JSON of every field that influences results (not the output path).
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// Parses a JSON experiment file. Relative paths resolve against
/// `base_dir`. Errors name the offending field. When `expected` is given the
/// file's "task" may be omitted but must not disagree.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              std::optional<Task> expected = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<Task> expected = std::nullopt);

struct ResultTable {
  std::string config_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// "# config_hash <hex>", the header, then one line per row.
  void write_csv(std::ostream& out) const;
  static ResultTable read_csv(std::istream& in);
};

/// Shortest round-trip decimal form, identical on every run.
std::string format_number(double value);

struct ExperimentOutput {
  ResultTable table;
  std::string manifest_json;
  /// Extra files: (suffix appended to the output path, contents).
  std::vector<std::pair<std::string, std::string>> attachments;
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes the table to cfg.output, the manifest beside it
/// (<output>.manifest.json) and any attachments. IoError on failure.
void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out);

/// True when the table at `path` carries the hash of `cfg`.
bool replay_matches(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// Rows (bitstring, count, cost, arcs) sorted by count, largest first.
void emit_histogram(std::ostream& out, const ShotHistogram& hist, const CostOracle& cost,
                    std::span<const std::string> names = {});
ShotHistogram read_histogram(std::istream& in);

/// Runs `count` jobs on at most `workers` threads; results keep job order.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job);

}  // namespace qbnsl
