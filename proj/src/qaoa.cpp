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

#include "qbnsl/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "qbnsl/error.hpp"

namespace qbnsl {
namespace {

constexpr std::size_t kEnergyTableQubits = 24;
constexpr std::size_t kCostTableQubits = 22;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double spin(std::uint64_t index, std::size_t qubit) {
  return ((index >> qubit) & 1U) ? -1.0 : 1.0;
}

}  // namespace

AnsatzTemplate::AnsatzTemplate(IsingCoefficients ising, std::size_t layers, bool allow_override)
    : ising_(std::move(ising)), layers_(layers), allow_override_(allow_override) {
  if (layers_ < 1) throw DomainError("ansatz needs at least one layer");
  const std::size_t ceiling = allow_override_ ? kOverrideQubitCeiling : kDefaultQubitCeiling;
  if (ising_.num_qubits > ceiling) {
    throw ResourceError("ansatz register of " + std::to_string(ising_.num_qubits) +
                        " qubits exceeds the ceiling of " + std::to_string(ceiling));
  }
  for (const auto& [k, h] : ising_.linear) {
    if (k >= ising_.num_qubits) throw DomainError("linear term qubit out of range");
    if (h != 0.0) linear_.emplace_back(k, h);
  }
  for (const auto& [kl, j] : ising_.quadratic) {
    if (kl.first >= ising_.num_qubits || kl.second >= ising_.num_qubits || kl.first == kl.second) {
      throw DomainError("quadratic term qubits invalid");
    }
    if (j != 0.0) quadratic_.emplace_back(kl, j);
  }
  if (ising_.num_qubits <= kEnergyTableQubits) {
    energies_.resize(std::size_t{1} << ising_.num_qubits);
    for (std::uint64_t i = 0; i < energies_.size(); ++i) {
      double e = 0.0;
      for (const auto& [k, h] : linear_) e += h * spin(i, k);
      for (const auto& [kl, j] : quadratic_) e += j * spin(i, kl.first) * spin(i, kl.second);
      energies_[i] = e;
    }
  }
}

double AnsatzTemplate::energy(std::uint64_t index) const {
  if (!energies_.empty()) return energies_.at(index);
  double e = 0.0;
  for (const auto& [k, h] : linear_) e += h * spin(index, k);
  for (const auto& [kl, j] : quadratic_) e += j * spin(index, kl.first) * spin(index, kl.second);
  return e;
}

void AnsatzTemplate::check_parameters(std::span<const double> gammas,
                                      std::span<const double> betas) const {
  if (gammas.size() != layers_ || betas.size() != layers_) {
    throw DomainError("expected " + std::to_string(layers_) + " gammas and betas");
  }
}

std::vector<GateOp> AnsatzTemplate::circuit(std::span<const double> gammas,
                                            std::span<const double> betas,
                                            bool decompose_zz) const {
  check_parameters(gammas, betas);
  const std::size_t nq = num_qubits();
  std::vector<GateOp> gates;
  gates.reserve(nq + layers_ * (gates_per_layer() + 2 * quadratic_.size()));
  for (std::size_t q = 0; q < nq; ++q) gates.push_back(GateOp::h(q));
  for (std::size_t l = 0; l < layers_; ++l) {
    const double g = gammas[l];
    for (const auto& [k, h] : linear_) gates.push_back(GateOp::rz(2.0 * g * h, k));
    for (const auto& [kl, j] : quadratic_) {
      if (decompose_zz) {
        gates.push_back(GateOp::cnot(kl.first, kl.second));
        gates.push_back(GateOp::rz(2.0 * g * j, kl.second));
        gates.push_back(GateOp::cnot(kl.first, kl.second));
      } else {
        gates.push_back(GateOp::zz(2.0 * g * j, kl.first, kl.second));
      }
    }
    for (std::size_t q = 0; q < nq; ++q) gates.push_back(GateOp::rx(2.0 * betas[l], q));
  }
  return gates;
}

void AnsatzTemplate::apply_cost_layer(StateVector& state, double gamma) const {
  if (!energies_.empty()) {
    apply_diagonal_phase(state, energies_, gamma);
    return;
  }
  auto amp = state.amplitudes();
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    amp[i] *= std::polar(1.0, -gamma * energy(i));
  }
}

StateVector AnsatzTemplate::prepare_state(std::span<const double> gammas,
                                          std::span<const double> betas) const {
  check_parameters(gammas, betas);
  StateVector state = StateVector::uniform_superposition(num_qubits(), allow_override_);
  for (std::size_t l = 0; l < layers_; ++l) {
    apply_cost_layer(state, gammas[l]);
    apply_rx_all(state, 2.0 * betas[l]);
  }
  return state;
}

double penalized_cost(std::span<const std::uint8_t> bits, const PseudoBooleanPolynomial& poly,
                      std::size_t max_indegree, double delta_max) {
  if (bits.size() != poly.num_vars()) throw DomainError("bitstring length does not match polynomial");
  const QubitLayout layout = QubitLayout::for_qubit_count(poly.num_vars());
  double value = poly.evaluate(bits);
  const std::size_t n = layout.num_nodes();
  for (std::size_t child = 0; child < n; ++child) {
    std::size_t d = 0;
    for (std::size_t parent = 0; parent < n; ++parent) {
      if (parent != child && bits[layout.adjacency_qubit(parent, child)]) ++d;
    }
    if (d > max_indegree) {
      const double excess = static_cast<double>(d - max_indegree);
      value += delta_max * excess * excess;
    }
  }
  return value;
}

CostOracle::CostOracle(const PseudoBooleanPolynomial& poly, std::size_t max_indegree,
                       double delta_max)
    : num_qubits_(poly.num_vars()), max_indegree_(max_indegree), delta_max_(delta_max) {
  if (!(delta_max > 0.0)) throw DomainError("delta_max must be positive");
  const QubitLayout layout = QubitLayout::for_qubit_count(num_qubits_);
  num_nodes_ = layout.num_nodes();
  for (const auto& [mono, c] : poly.terms()) {
    if (mono.empty()) {
      constant_ += c;
    } else if (mono.size() == 1) {
      linear_.emplace_back(mono[0], c);
    } else {
      quadratic_.emplace_back(std::make_pair(mono[0], mono[1]), c);
    }
  }
  parent_qubits_.resize(num_nodes_);
  for (std::size_t child = 0; child < num_nodes_; ++child) {
    for (std::size_t parent = 0; parent < num_nodes_; ++parent) {
      if (parent != child) parent_qubits_[child].push_back(layout.adjacency_qubit(parent, child));
    }
  }
  if (num_qubits_ <= kCostTableQubits) {
    table_.resize(std::size_t{1} << num_qubits_);
    for (std::uint64_t i = 0; i < table_.size(); ++i) table_[i] = compute(i);
  }
}

double CostOracle::compute(std::uint64_t index) const {
  double value = constant_;
  for (const auto& [k, c] : linear_) {
    if ((index >> k) & 1U) value += c;
  }
  for (const auto& [kl, c] : quadratic_) {
    if (((index >> kl.first) & 1U) && ((index >> kl.second) & 1U)) value += c;
  }
  for (const auto& qubits : parent_qubits_) {
    std::size_t d = 0;
    for (std::size_t q : qubits) d += (index >> q) & 1U;
    if (d > max_indegree_) {
      const double excess = static_cast<double>(d - max_indegree_);
      value += delta_max_ * excess * excess;
    }
  }
  return value;
}

double CostOracle::operator()(std::uint64_t index) const {
  if (!table_.empty()) return table_.at(index);
  if (num_qubits_ < 64 && (index >> num_qubits_) != 0) throw DomainError("basis index out of range");
  return compute(index);
}

double CostOracle::operator()(std::span<const std::uint8_t> bits) const {
  if (bits.size() != num_qubits_) throw DomainError("bitstring length does not match polynomial");
  return (*this)(index_from_bits(bits));
}

double cvar(const ShotHistogram& hist, const CostFunction& cost, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (hist.empty()) throw DomainError("empty histogram");
  std::vector<std::pair<double, std::uint64_t>> costs;
  costs.reserve(hist.counts().size());
  for (const auto& [index, count] : hist.counts()) costs.emplace_back(cost(index), count);
  std::stable_sort(costs.begin(), costs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::uint64_t t = hist.total();
  // alpha * t is meant as an exact product; shave rounding noise before ceil.
  auto keep = static_cast<std::uint64_t>(std::ceil(alpha * static_cast<double>(t) - 1e-9));
  keep = std::clamp<std::uint64_t>(keep, 1, t);
  double sum = 0.0;
  std::uint64_t taken = 0;
  for (const auto& [c, count] : costs) {
    const std::uint64_t n = std::min(count, keep - taken);
    sum += c * static_cast<double>(n);
    taken += n;
    if (taken == keep) break;
  }
  return sum / static_cast<double>(keep);
}

double expectation(const ShotHistogram& hist, const CostFunction& cost) {
  if (hist.empty()) throw DomainError("empty histogram");
  double sum = 0.0;
  for (const auto& [index, count] : hist.counts()) sum += cost(index) * static_cast<double>(count);
  return sum / static_cast<double>(hist.total());
}

double solution_entropy(const ShotHistogram& hist) {
  if (hist.empty()) throw DomainError("empty histogram");
  const double t = static_cast<double>(hist.total());
  double h = 0.0;
  for (const auto& [index, count] : hist.counts()) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / t;
    h -= p * std::log(p);
  }
  return h;
}

void ObjectiveConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (shots < 1) throw DomainError("shots must be at least 1");
  if (!(delta_max > 0.0)) throw DomainError("delta_max must be positive");
}

Evaluation evaluate(std::span<const double> params, const AnsatzTemplate& ansatz,
                    const ObjectiveConfig& cfg, const CostOracle& cost, const NoiseModel& noise,
                    std::uint64_t seed) {
  cfg.validate();
  const std::size_t p = ansatz.layers();
  if (params.size() != 2 * p) {
    throw DomainError("expected " + std::to_string(2 * p) + " parameters, got " +
                      std::to_string(params.size()));
  }
  if (cost.num_qubits() != ansatz.num_qubits()) throw DomainError("cost and ansatz sizes differ");
  const auto gammas = params.first(p);
  const auto betas = params.subspan(p);

  Evaluation out;
  if (noise.empty()) {
    const StateVector state = ansatz.prepare_state(gammas, betas);
    out.histogram = sample(state, cfg.shots, seed);
  } else {
    const std::vector<GateOp> gates = ansatz.circuit(gammas, betas, true);
    out.histogram = ShotHistogram(ansatz.num_qubits());
    StateVector state(ansatz.num_qubits(), ansatz.allow_override());
    for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
      state.reset();
      Rng rng(derive_seed(seed, shot));
      run_noisy_trajectory(state, gates, noise, rng);
      out.histogram.add(sample_once(state, rng));
    }
  }
  out.objective = cvar(out.histogram, [&](std::uint64_t i) { return cost(i); }, cfg.alpha);
  return out;
}

double evaluate_objective(std::span<const double> params, const AnsatzTemplate& ansatz,
                          const ObjectiveConfig& cfg, const CostOracle& cost,
                          const NoiseModel& noise, std::uint64_t seed) {
  return evaluate(params, ansatz, cfg, cost, noise, seed).objective;
}

QaoaResult optimize(const AnsatzTemplate& ansatz, const ObjectiveConfig& cfg,
                    const PseudoBooleanPolynomial& poly, const OptimizerConfig& opt,
                    const NoiseModel& noise, std::uint64_t seed) {
  cfg.validate();
  if (poly.num_vars() != ansatz.num_qubits()) throw DomainError("polynomial and ansatz sizes differ");
  const CostOracle cost(poly, cfg.max_indegree, cfg.delta_max);
  const std::size_t p = ansatz.layers();

  Rng init(derive_seed(seed, 0));
  std::vector<double> x0(2 * p);
  for (auto& v : x0) v = uniform01(init) * kTwoPi;
  const std::uint64_t eval_seed = derive_seed(seed, 1);

  QaoaResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  result.best_objective = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  std::uint64_t best_index = 0;

  const Objective objective = [&](std::span<const double> x) {
    std::vector<double> wrapped(x.size());
    std::transform(x.begin(), x.end(), wrapped.begin(), wrap_angle);
    Evaluation e = evaluate(wrapped, ansatz, cfg, cost, noise, eval_seed);
    for (const auto& [index, count] : e.histogram.counts()) {
      const double c = cost(index);
      if (c < result.best_cost) {
        result.best_cost = c;
        best_index = index;
      }
    }
    result.trace.push_back(e.objective);
    result.best_cost_trace.push_back(result.best_cost);
    if (e.objective < result.best_objective) {
      result.best_objective = e.objective;
      best_params = wrapped;
      result.final_histogram = std::move(e.histogram);
    }
    return e.objective;
  };

  CobylaOptions copt;
  copt.rhobeg = opt.rhobeg;
  copt.rhoend = opt.rhoend;
  copt.max_evaluations = opt.maxiter;
  const CobylaResult cr = cobyla_minimize(objective, x0, copt);

  result.iterations = cr.evaluations;
  result.converged = cr.converged;
  result.gammas.assign(best_params.begin(), best_params.begin() + static_cast<std::ptrdiff_t>(p));
  result.betas.assign(best_params.begin() + static_cast<std::ptrdiff_t>(p), best_params.end());
  result.best_bits = bits_from_index(best_index, ansatz.num_qubits());
  const QubitLayout layout = QubitLayout::for_qubit_count(ansatz.num_qubits());
  result.best_adjacency = decode(result.best_bits, layout).adjacency;
  if (result.best_adjacency.is_acyclic()) result.best_dag = Dag::from_adjacency(result.best_adjacency);
  return result;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summary of no values");
  Summary s;
  double sum = 0.0;
  s.min = s.max = values[0];
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<QaoaResult> optimize_restarts(const AnsatzTemplate& ansatz, const ObjectiveConfig& cfg,
                                          const PseudoBooleanPolynomial& poly,
                                          const OptimizerConfig& opt, const NoiseModel& noise,
                                          std::uint64_t master_seed, std::size_t restarts) {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  std::vector<QaoaResult> out;
  out.reserve(restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    out.push_back(optimize(ansatz, cfg, poly, opt, noise, derive_seed(master_seed, r)));
  }
  return out;
}

ResultRecord to_record(const QaoaResult& result) {
  ResultRecord rec;
  rec.algorithm = "QAOA";
  rec.cost = result.best_cost;
  rec.bits = bits_to_string(result.best_bits);
  rec.adjacency = result.best_adjacency;
  rec.iterations = result.iterations;
  rec.converged = result.converged;
  rec.gammas = result.gammas;
  rec.betas = result.betas;
  rec.trace = result.trace;
  return rec;
}

namespace {

void write_list(std::ostream& out, const char* key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << v;
  out << '\n';
}

}  // namespace

void write_result_record(std::ostream& out, const ResultRecord& record,
                         std::span<const std::string> names) {
  const auto old_precision = out.precision(17);
  out << "algorithm " << record.algorithm << '\n';
  out << "cost " << record.cost << '\n';
  if (!record.bits.empty()) out << "bits " << record.bits << '\n';
  out << "arcs " << format_arcs(record.adjacency, names) << '\n';
  out << "iterations " << record.iterations << '\n';
  out << "converged " << (record.converged ? 1 : 0) << '\n';
  if (!record.gammas.empty()) {
    write_list(out, "gammas", record.gammas);
    write_list(out, "betas", record.betas);
  }
  if (!record.trace.empty()) write_list(out, "trace", record.trace);
  out << "end\n";
  out.precision(old_precision);
}

}  // namespace qbnsl
