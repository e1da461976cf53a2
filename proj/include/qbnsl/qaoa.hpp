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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbnsl/cobyla.hpp"
#include "qbnsl/graph.hpp"
#include "qbnsl/hamiltonian.hpp"
#include "qbnsl/noise.hpp"
#include "qbnsl/statevector.hpp"

namespace qbnsl {

/// QAOA circuit shape for a fixed Ising cost: a Hadamard wall, then p layers
/// of RZ(2 gamma h_k), ZZ(2 gamma J_kl) and RX(2 beta) on every qubit.
class AnsatzTemplate {
 public:
  AnsatzTemplate(IsingCoefficients ising, std::size_t layers, bool allow_override = false);

  std::size_t num_qubits() const noexcept { return ising_.num_qubits; }
  std::size_t layers() const noexcept { return layers_; }
  std::size_t num_parameters() const noexcept { return 2 * layers_; }
  std::size_t gates_per_layer() const noexcept {
    return ising_.linear.size() + ising_.quadratic.size() + ising_.num_qubits;
  }
  const IsingCoefficients& ising() const noexcept { return ising_; }
  bool allow_override() const noexcept { return allow_override_; }

  /// Explicit gate list. With `decompose_zz` each ZZ becomes CNOT, RZ, CNOT.
  std::vector<GateOp> circuit(std::span<const double> gammas, std::span<const double> betas,
                              bool decompose_zz = false) const;

  /// Noiseless final state, computed with one diagonal phase per cost layer.
  /// Equal to running circuit() up to a global phase.
  StateVector prepare_state(std::span<const double> gammas, std::span<const double> betas) const;

  /// Diagonal of the cost operator without its constant, indexed by basis state.
  double energy(std::uint64_t index) const;

 private:
  void check_parameters(std::span<const double> gammas, std::span<const double> betas) const;
  void apply_cost_layer(StateVector& state, double gamma) const;

  IsingCoefficients ising_;
  std::size_t layers_;
  bool allow_override_;
  std::vector<std::pair<std::size_t, double>> linear_;
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> quadratic_;
  std::vector<double> energies_;  // filled when the register is small enough
};

/// Hamiltonian value plus delta_max * max(0, d_i - m)^2 for every node whose
/// decoded in-degree d_i exceeds m.
double penalized_cost(std::span<const std::uint8_t> bits, const PseudoBooleanPolynomial& poly,
                      std::size_t max_indegree, double delta_max);

/// penalized_cost by basis index, tabulated for registers up to 22 qubits.
class CostOracle {
 public:
  CostOracle(const PseudoBooleanPolynomial& poly, std::size_t max_indegree, double delta_max);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  double operator()(std::uint64_t index) const;
  double operator()(std::span<const std::uint8_t> bits) const;

 private:
  double compute(std::uint64_t index) const;

  std::size_t num_qubits_;
  std::size_t num_nodes_;
  std::size_t max_indegree_;
  double delta_max_;
  double constant_ = 0.0;
  std::vector<std::pair<std::size_t, double>> linear_;
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> quadratic_;
  std::vector<std::vector<std::size_t>> parent_qubits_;  // per child node
  std::vector<double> table_;
};

using CostFunction = std::function<double(std::uint64_t)>;

/// Mean of the ceil(alpha * t) lowest shot costs.
double cvar(const ShotHistogram& hist, const CostFunction& cost, double alpha);
/// Plain sample mean of the shot costs.
double expectation(const ShotHistogram& hist, const CostFunction& cost);

/// Shannon entropy (nats) of counts / total.
double solution_entropy(const ShotHistogram& hist);

struct ObjectiveConfig {
  double alpha = 0.3;
  std::size_t shots = 1024;
  std::size_t max_indegree = 2;
  /// In-degree penalty weight; the harness uses dominance_penalty(table).
  double delta_max = 1.0;

  void validate() const;
};

struct Evaluation {
  double objective = 0.0;
  ShotHistogram histogram;
};

/// Samples `cfg.shots` outcomes of the bound circuit and scores them. Without
/// noise this draws from one statevector; with noise every shot is its own
/// trajectory. `params` is (gamma_1..gamma_p, beta_1..beta_p).
Evaluation evaluate(std::span<const double> params, const AnsatzTemplate& ansatz,
                    const ObjectiveConfig& cfg, const CostOracle& cost, const NoiseModel& noise,
                    std::uint64_t seed);
double evaluate_objective(std::span<const double> params, const AnsatzTemplate& ansatz,
                          const ObjectiveConfig& cfg, const CostOracle& cost,
                          const NoiseModel& noise, std::uint64_t seed);

struct OptimizerConfig {
  double rhobeg = 0.5;
  double rhoend = 1e-3;
  std::size_t maxiter = 500;
};

struct QaoaResult {
  Bits best_bits;
  double best_cost = 0.0;
  AdjacencyMatrix best_adjacency;
  std::optional<Dag> best_dag;  // empty when the adjacency block is cyclic
  std::vector<double> gammas;
  std::vector<double> betas;
  /// Objective evaluations performed.
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;            // objective per evaluation
  std::vector<double> best_cost_trace;  // best shot cost seen so far, per evaluation
  /// Lowest objective value reached; gammas/betas attain it.
  double best_objective = 0.0;
  ShotHistogram final_histogram;  // samples at gammas/betas
};

/// One COBYLA run from uniform random parameters in [0, 2pi)^{2p}. Every
/// parameter vector is wrapped modulo 2pi before it is bound. All evaluations
/// of a run share one sampling seed so the objective is a fixed function of
/// the parameters.
QaoaResult optimize(const AnsatzTemplate& ansatz, const ObjectiveConfig& cfg,
                    const PseudoBooleanPolynomial& poly, const OptimizerConfig& opt,
                    const NoiseModel& noise, std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(std::span<const double> values);

/// Restart r uses seed derive_seed(master_seed, r).
std::vector<QaoaResult> optimize_restarts(const AnsatzTemplate& ansatz, const ObjectiveConfig& cfg,
                                          const PseudoBooleanPolynomial& poly,
                                          const OptimizerConfig& opt, const NoiseModel& noise,
                                          std::uint64_t master_seed, std::size_t restarts);

/// Common text record for QAOA and baseline results.
struct ResultRecord {
  std::string algorithm;
  double cost = 0.0;
  std::string bits;  // empty for DAG-space searches
  AdjacencyMatrix adjacency;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<double> gammas;
  std::vector<double> betas;
  std::vector<double> trace;
};

ResultRecord to_record(const QaoaResult& result);
void write_result_record(std::ostream& out, const ResultRecord& record,
                         std::span<const std::string> names = {});

}  // namespace qbnsl
