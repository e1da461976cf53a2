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

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qbnsl/error.hpp"
#include "qbnsl/network.hpp"
#include "qbnsl/qaoa.hpp"
#include "qbnsl/rng.hpp"

using qbnsl::AnsatzTemplate;
using qbnsl::CostOracle;
using qbnsl::IsingCoefficients;
using qbnsl::ObjectiveConfig;
using qbnsl::PseudoBooleanPolynomial;
using qbnsl::ShotHistogram;
using qbnsl::StateVector;

namespace {

qbnsl::LocalScoreTable n3_table(std::uint64_t seed) {
  const auto bn = oracle::random_network(3, seed);
  return qbnsl::build_score_table(qbnsl::forward_sample(bn, 400, seed), qbnsl::ScoreKind::bic(), 2);
}

double overlap(const StateVector& a, const StateVector& b) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a.amplitude(i)) * b.amplitude(i);
  return std::abs(s);
}

ShotHistogram histogram_of(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> items,
                           std::size_t q = 3) {
  ShotHistogram h(q);
  for (const auto& [z, c] : items) h.add(z, c);
  return h;
}

}  // namespace

TEST_CASE("in-degree penalty") {
  const PseudoBooleanPolynomial zero4(18);
  const qbnsl::QubitLayout l4(4);
  qbnsl::Bits bits(18, 0);
  CHECK(qbnsl::penalized_cost(bits, zero4, 2, 7.0) == 0.0);
  for (std::size_t p = 1; p < 4; ++p) bits[l4.adjacency_qubit(p, 0)] = 1;
  CHECK(qbnsl::penalized_cost(bits, zero4, 2, 7.0) == 7.0);
  CHECK(qbnsl::penalized_cost(bits, zero4, 3, 7.0) == 0.0);
  CHECK(qbnsl::penalized_cost(bits, zero4, 1, 7.0) == 28.0);

  const PseudoBooleanPolynomial zero5(30);
  const qbnsl::QubitLayout l5(5);
  qbnsl::Bits b5(30, 0);
  for (std::size_t p = 1; p < 5; ++p) b5[l5.adjacency_qubit(p, 0)] = 1;
  CHECK(qbnsl::penalized_cost(b5, zero5, 2, 1.5) == 6.0);

  const CostOracle oracle4(zero4, 2, 7.0);
  CHECK(oracle4(bits) == 7.0);
  CHECK(oracle4(qbnsl::index_from_bits(bits)) == 7.0);
  CHECK_THROWS_AS(qbnsl::penalized_cost(qbnsl::Bits(5, 0), zero4, 2, 1.0), qbnsl::DomainError);
  CHECK_THROWS_AS(CostOracle(zero4, 2, 0.0), qbnsl::DomainError);
}

TEST_CASE("cost oracle agrees with the polynomial plus penalty") {
  const auto table = n3_table(5);
  const auto poly = qbnsl::build_hamiltonian(table);
  const double delta = qbnsl::dominance_penalty(table);
  for (std::size_t m : {0u, 1u, 2u}) {
    const CostOracle c(poly, m, delta);
    for (std::uint64_t z = 0; z < 512; ++z) {
      const auto bits = qbnsl::bits_from_index(z, 9);
      CHECK(c(z) == doctest::Approx(qbnsl::penalized_cost(bits, poly, m, delta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("CVaR examples") {
  const auto h = histogram_of({{0, 1}, {1, 1}, {2, 1}, {3, 1}});
  auto cost = [](std::uint64_t z) { return static_cast<double>(z + 1); };
  CHECK(qbnsl::cvar(h, cost, 0.5) == 1.5);
  CHECK(qbnsl::cvar(h, cost, 1.0) == 2.5);
  CHECK(qbnsl::cvar(h, cost, 0.1) == 1.0);
  CHECK(qbnsl::cvar(h, cost, 0.26) == 1.5);

  const auto h10 = histogram_of({{4, 3}, {1, 7}});
  CHECK(qbnsl::cvar(h10, cost, 0.3) == 2.0);
  CHECK(qbnsl::cvar(h10, cost, 0.8) == doctest::Approx((7 * 2.0 + 5.0) / 8));
  CHECK_THROWS_AS(qbnsl::cvar(h, cost, 0.0), qbnsl::DomainError);
  CHECK_THROWS_AS(qbnsl::cvar(h, cost, 1.1), qbnsl::DomainError);
  CHECK_THROWS_AS(qbnsl::cvar(ShotHistogram(3), cost, 0.5), qbnsl::DomainError);
}

TEST_CASE("CVaR matches the expand-and-sort oracle") {
  qbnsl::Rng rng(11);
  auto cost = [](std::uint64_t z) { return std::sin(1.7 * static_cast<double>(z)) * 3.0; };
  for (int trial = 0; trial < 50; ++trial) {
    ShotHistogram h(4);
    const auto shots = 1 + qbnsl::uniform_below(rng, 300);
    for (std::uint64_t s = 0; s < shots; ++s) h.add(qbnsl::uniform_below(rng, 16));
    double previous = -1e300;
    for (double a : {0.01, 0.1, 0.25, 0.3, 1.0 / 3, 0.5, 0.7, 0.9, 1.0}) {
      const double got = qbnsl::cvar(h, cost, a);
      CHECK(got == doctest::Approx(oracle::cvar_expanded(h.counts(), cost, a)).epsilon(1e-12));
      CHECK(got >= previous - 1e-12);
      previous = got;
    }
    CHECK(std::abs(qbnsl::cvar(h, cost, 1.0) - qbnsl::expectation(h, cost)) <= 1e-12);
  }
}

TEST_CASE("solution entropy") {
  CHECK(qbnsl::solution_entropy(histogram_of({{0, 5}, {1, 5}, {2, 5}, {3, 5}})) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(qbnsl::solution_entropy(histogram_of({{6, 9}})) == 0.0);
  auto a = histogram_of({{0, 2}});
  a.merge(histogram_of({{1, 2}}));
  CHECK(a.total() == 4);
  CHECK(qbnsl::solution_entropy(a) == doctest::Approx(std::log(2.0)));
  const double p = 0.25;
  CHECK(qbnsl::solution_entropy(histogram_of({{0, 1}, {1, 3}})) ==
        doctest::Approx(-(p * std::log(p) + (1 - p) * std::log(1 - p))));
}

TEST_CASE("ansatz shape") {
  const auto table = n3_table(2);
  const auto ising = qbnsl::to_ising(qbnsl::build_hamiltonian(table));
  for (std::size_t p : {1u, 2u, 4u}) {
    const AnsatzTemplate a(ising, p);
    CHECK(a.num_qubits() == 9);
    CHECK(a.num_parameters() == 2 * p);
    const std::vector<double> g(p, 0.3), b(p, 0.2);
    const auto plain = a.circuit(g, b);
    CHECK(plain.size() == 9 + p * a.gates_per_layer());
    const auto split = a.circuit(g, b, true);
    CHECK(split.size() == 9 + p * (a.gates_per_layer() + 2 * ising.quadratic.size()));
    std::size_t rx = 0;
    for (const auto& op : plain) rx += op.kind == qbnsl::GateKind::kRx;
    CHECK(rx == 9 * p);
    CHECK_THROWS_AS(a.circuit(std::vector<double>(p + 1, 0.0), b), qbnsl::DomainError);
  }
  CHECK_THROWS_AS(AnsatzTemplate(ising, 0), qbnsl::DomainError);
  IsingCoefficients wide;
  wide.num_qubits = 25;
  CHECK_THROWS_AS(AnsatzTemplate(wide, 1), qbnsl::ResourceError);
}

TEST_CASE("gate circuit equals the fast state preparation") {
  const auto table = n3_table(4);
  const auto ising = qbnsl::to_ising(qbnsl::build_hamiltonian(table));
  const AnsatzTemplate a(ising, 2);
  const std::vector<double> g{0.011, -0.027}, b{0.4, 1.3};
  const auto fast = a.prepare_state(g, b);
  for (bool decompose : {false, true}) {
    StateVector s(9);
    qbnsl::apply_gates(s, a.circuit(g, b, decompose));
    CHECK(overlap(s, fast) == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (std::uint64_t z = 0; z < 512; ++z)
    CHECK(a.energy(z) == doctest::Approx(ising.energy_index(z)).epsilon(1e-12));
}

TEST_CASE("two-qubit ansatz against explicit matrices") {
  IsingCoefficients ising;
  ising.num_qubits = 2;
  ising.constant = 4.0;
  ising.linear = {{0, 0.7}, {1, -1.3}};
  ising.quadratic = {{{0, 1}, 0.45}};
  const AnsatzTemplate a(ising, 1);
  qbnsl::Rng rng(99);
  for (int k = 0; k < 20; ++k) {
    const double gamma = (qbnsl::uniform01(rng) - 0.5) * 4.0;
    const double beta = (qbnsl::uniform01(rng) - 0.5) * 4.0;
    const auto h = oracle::embed(oracle::hadamard(), 0, 2) * oracle::embed(oracle::hadamard(), 1, 2);
    const auto cost = oracle::zz(2 * gamma * 0.45, 0, 1, 2) *
                      oracle::embed(oracle::rz(2 * gamma * -1.3), 1, 2) *
                      oracle::embed(oracle::rz(2 * gamma * 0.7), 0, 2);
    const auto mix = oracle::embed(oracle::rx(2 * beta), 0, 2) * oracle::embed(oracle::rx(2 * beta), 1, 2);
    const auto psi = oracle::apply(mix * cost * h, {1.0, 0.0, 0.0, 0.0});
    const std::vector<double> gv{gamma}, bv{beta};
    const auto got = a.prepare_state(gv, bv);
    std::complex<double> ip = 0.0;
    for (std::size_t i = 0; i < 4; ++i) ip += std::conj(psi[i]) * got.amplitude(i);
    CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zero angles give the uniform superposition") {
  const auto ising = qbnsl::to_ising(qbnsl::build_hamiltonian(n3_table(1)));
  const AnsatzTemplate a(ising, 1);
  const std::vector<double> zero{0.0};
  const auto s = a.prepare_state(zero, zero);
  for (std::uint64_t z = 0; z < 512; ++z) CHECK(s.probability(z) == doctest::Approx(1.0 / 512));
}

TEST_CASE("sampled expectation converges at the shot-noise rate") {
  const auto table = n3_table(3);
  const auto poly = qbnsl::build_hamiltonian(table);
  const double delta = qbnsl::dominance_penalty(table);
  const CostOracle cost(poly, 2, delta);
  const AnsatzTemplate a(qbnsl::to_ising(poly), 1);
  const std::vector<double> params{0.003, 0.7};
  const auto state = a.prepare_state(std::span(params).first(1), std::span(params).last(1));
  auto f = [&](std::uint64_t z) { return cost(z); };
  const double exact = qbnsl::exact_diagonal_expectation(state, f);
  double second = 0.0;
  for (std::uint64_t z = 0; z < 512; ++z) second += state.probability(z) * cost(z) * cost(z);
  const double sigma = std::sqrt(second - exact * exact);

  ObjectiveConfig cfg;
  cfg.alpha = 1.0;
  cfg.delta_max = delta;
  cfg.shots = 100000;
  const double big = qbnsl::evaluate_objective(params, a, cfg, cost, {}, 17);
  CHECK(std::abs(big - exact) <= 3 * sigma / std::sqrt(1e5));

  auto spread = [&](std::size_t shots) {
    cfg.shots = shots;
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 300; ++s) v.push_back(qbnsl::evaluate_objective(params, a, cfg, cost, {}, s));
    return qbnsl::summarize(v).stddev;
  };
  const double s100 = spread(100), s1600 = spread(1600);
  CHECK(s100 == doctest::Approx(sigma / 10).epsilon(0.15));
  CHECK(s1600 == doctest::Approx(sigma / 40).epsilon(0.15));
}

TEST_CASE("evaluation argument checks") {
  const auto poly = qbnsl::build_hamiltonian(n3_table(1));
  const CostOracle cost(poly, 2, 1.0);
  const AnsatzTemplate a(qbnsl::to_ising(poly), 2);
  ObjectiveConfig cfg;
  const std::vector<double> three(3, 0.1), four(4, 0.1);
  CHECK_THROWS_AS(qbnsl::evaluate(three, a, cfg, cost, {}, 1), qbnsl::DomainError);
  cfg.shots = 0;
  CHECK_THROWS_AS(qbnsl::evaluate(four, a, cfg, cost, {}, 1), qbnsl::DomainError);
  cfg.shots = 10;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(qbnsl::evaluate(four, a, cfg, cost, {}, 1), qbnsl::DomainError);
}

TEST_CASE("noisy evaluation is seeded") {
  const auto poly = qbnsl::build_hamiltonian(n3_table(1));
  const CostOracle cost(poly, 2, 1.0);
  const AnsatzTemplate a(qbnsl::to_ising(poly), 1);
  ObjectiveConfig cfg;
  cfg.shots = 64;
  qbnsl::NoiseModel noise;
  noise.channels.emplace_back(qbnsl::ChannelKind::kDepolarizing, 0.05);
  const std::vector<double> params{0.02, 0.5};
  const auto x = qbnsl::evaluate(params, a, cfg, cost, noise, 8);
  const auto y = qbnsl::evaluate(params, a, cfg, cost, noise, 8);
  CHECK(x.histogram == y.histogram);
  CHECK(x.objective == y.objective);
  CHECK(x.histogram.total() == 64);
}

TEST_CASE("optimize bookkeeping") {
  const auto table = n3_table(6);
  const auto poly = qbnsl::build_hamiltonian(table);
  ObjectiveConfig cfg;
  cfg.shots = 256;
  cfg.delta_max = qbnsl::dominance_penalty(table);
  qbnsl::OptimizerConfig opt;
  opt.maxiter = 40;
  const AnsatzTemplate a(qbnsl::to_ising(poly), 1);
  const auto r = qbnsl::optimize(a, cfg, poly, opt, {}, 123);
  const auto again = qbnsl::optimize(a, cfg, poly, opt, {}, 123);

  CHECK(r.iterations <= 40);
  CHECK(r.trace.size() == r.iterations);
  CHECK(r.best_cost_trace.size() == r.iterations);
  for (std::size_t k = 1; k < r.best_cost_trace.size(); ++k)
    CHECK(r.best_cost_trace[k] <= r.best_cost_trace[k - 1]);
  CHECK(r.best_cost == r.best_cost_trace.back());
  CHECK(r.best_cost ==
        doctest::Approx(qbnsl::penalized_cost(r.best_bits, poly, 2, cfg.delta_max)).epsilon(1e-12));
  CHECK(r.best_objective == *std::min_element(r.trace.begin(), r.trace.end()));
  CHECK(r.final_histogram.total() == 256);
  CHECK(r.gammas.size() == 1);
  for (double v : r.gammas) CHECK((v >= 0.0 && v < 2 * std::numbers::pi));
  for (double v : r.betas) CHECK((v >= 0.0 && v < 2 * std::numbers::pi));

  std::vector<double> params = r.gammas;
  params.insert(params.end(), r.betas.begin(), r.betas.end());
  const CostOracle cost(poly, 2, cfg.delta_max);
  CHECK(qbnsl::evaluate_objective(params, a, cfg, cost, {}, qbnsl::derive_seed(123, 1)) ==
        r.best_objective);

  CHECK(again.trace == r.trace);
  CHECK(again.best_bits == r.best_bits);
  CHECK(again.final_histogram == r.final_histogram);
  CHECK(r.best_adjacency == qbnsl::decode(r.best_bits, qbnsl::QubitLayout(3)).adjacency);
  CHECK(r.best_dag.has_value() == r.best_adjacency.is_acyclic());
}

TEST_CASE("restarts derive their seeds from the master seed") {
  const auto table = n3_table(7);
  const auto poly = qbnsl::build_hamiltonian(table);
  ObjectiveConfig cfg;
  cfg.shots = 64;
  cfg.delta_max = qbnsl::dominance_penalty(table);
  qbnsl::OptimizerConfig opt;
  opt.maxiter = 10;
  const AnsatzTemplate a(qbnsl::to_ising(poly), 1);
  const auto rs = qbnsl::optimize_restarts(a, cfg, poly, opt, {}, 5, 3);
  REQUIRE(rs.size() == 3);
  const auto second = qbnsl::optimize(a, cfg, poly, opt, {}, qbnsl::derive_seed(5, 1));
  CHECK(rs[1].trace == second.trace);
  CHECK(rs[0].trace != rs[2].trace);
  CHECK_THROWS_AS(qbnsl::optimize_restarts(a, cfg, poly, opt, {}, 5, 0), qbnsl::DomainError);
}

TEST_CASE("summaries") {
  const std::vector<double> v{1.0, 2.0, 3.0, 6.0};
  const auto s = qbnsl::summarize(v);
  CHECK(s.mean == 3.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 6.0);
  CHECK(s.stddev == doctest::Approx(std::sqrt(14.0 / 3)));
  const std::vector<double> one{4.0};
  CHECK(qbnsl::summarize(one).stddev == 0.0);
  CHECK_THROWS_AS(qbnsl::summarize(std::vector<double>{}), qbnsl::DomainError);
}

TEST_CASE("result record text") {
  qbnsl::QaoaResult r;
  r.best_bits = qbnsl::bits_from_string("100000000");
  r.best_cost = -1.25;
  r.best_adjacency = qbnsl::decode(r.best_bits, qbnsl::QubitLayout(3)).adjacency;
  r.iterations = 12;
  r.converged = true;
  r.gammas = {0.5};
  r.betas = {0.25};
  const auto rec = qbnsl::to_record(r);
  CHECK(rec.algorithm == "QAOA");
  CHECK(rec.bits == "100000000");
  std::ostringstream out;
  qbnsl::write_result_record(out, rec);
  const std::string text = out.str();
  CHECK(text.find("algorithm QAOA\n") != std::string::npos);
  CHECK(text.find("cost -1.25\n") != std::string::npos);
  CHECK(text.find("bits 100000000\n") != std::string::npos);
  CHECK(text.find("arcs 0->1\n") != std::string::npos);
  CHECK(text.find("iterations 12\n") != std::string::npos);
}
