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

#include "qbnsl/statevector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "qbnsl/error.hpp"

namespace qbnsl {

StateVector::StateVector(std::size_t num_qubits, bool allow_override) : num_qubits_(num_qubits) {
  if (num_qubits == 0) throw DomainError("state vector needs at least one qubit");
  const std::size_t ceiling = allow_override ? kOverrideQubitCeiling : kDefaultQubitCeiling;
  if (num_qubits > ceiling) {
    throw ResourceError(std::to_string(num_qubits) + " qubits exceeds the simulator ceiling of " +
                        std::to_string(ceiling) +
                        (allow_override ? "" : " (pass the qubit-ceiling override to allow 30)"));
  }
  amplitudes_.assign(std::size_t{1} << num_qubits, Complex(0.0, 0.0));
  amplitudes_[0] = 1.0;
}

StateVector StateVector::uniform_superposition(std::size_t num_qubits, bool allow_override) {
  StateVector s(num_qubits, allow_override);
  const double a = std::pow(2.0, -0.5 * static_cast<double>(num_qubits));
  std::fill(s.amplitudes_.begin(), s.amplitudes_.end(), Complex(a, 0.0));
  return s;
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

void StateVector::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw DomainError("cannot normalize a zero state");
  const double inv = 1.0 / n;
  for (auto& a : amplitudes_) a *= inv;
}

void StateVector::reset() { set_basis_state(0); }

void StateVector::set_basis_state(std::uint64_t index) {
  if (index >= amplitudes_.size()) throw DomainError("basis index out of range");
  std::fill(amplitudes_.begin(), amplitudes_.end(), Complex(0.0, 0.0));
  amplitudes_[index] = 1.0;
}

namespace {

void check_target(const StateVector& s, std::size_t q) {
  if (q >= s.num_qubits()) {
    throw DomainError("gate target " + std::to_string(q) + " out of range for " +
                      std::to_string(s.num_qubits()) + " qubits");
  }
}

}  // namespace

void apply_matrix(StateVector& state, std::size_t qubit, const Matrix2& m) {
  check_target(state, qubit);
  auto amp = state.amplitudes();
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = amp.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a0 = amp[i];
      const Complex a1 = amp[i + stride];
      amp[i] = m[0] * a0 + m[1] * a1;
      amp[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_gate(StateVector& state, const GateOp& gate) {
  auto amp = state.amplitudes();
  const std::size_t dim = amp.size();
  switch (gate.kind) {
    case GateKind::kH: {
      const double r = 1.0 / std::sqrt(2.0);
      apply_matrix(state, gate.targets[0], {r, r, r, -r});
      return;
    }
    case GateKind::kRx: {
      const double c = std::cos(gate.theta / 2);
      const Complex s(0.0, -std::sin(gate.theta / 2));
      apply_matrix(state, gate.targets[0], {c, s, s, c});
      return;
    }
    case GateKind::kRz: {
      const std::size_t q = gate.targets[0];
      check_target(state, q);
      const Complex p0 = std::polar(1.0, -gate.theta / 2);
      const Complex p1 = std::polar(1.0, gate.theta / 2);
      for (std::size_t i = 0; i < dim; ++i) amp[i] *= ((i >> q) & 1) ? p1 : p0;
      return;
    }
    case GateKind::kCnot: {
      const auto [c, t] = gate.targets;
      check_target(state, c);
      check_target(state, t);
      if (c == t) throw DomainError("CNOT control and target coincide");
      const std::size_t cbit = std::size_t{1} << c;
      const std::size_t tbit = std::size_t{1} << t;
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
      }
      return;
    }
    case GateKind::kZz: {
      const auto [a, b] = gate.targets;
      check_target(state, a);
      check_target(state, b);
      if (a == b) throw DomainError("ZZ targets coincide");
      const Complex same = std::polar(1.0, -gate.theta / 2);
      const Complex diff = std::polar(1.0, gate.theta / 2);
      for (std::size_t i = 0; i < dim; ++i) {
        amp[i] *= (((i >> a) ^ (i >> b)) & 1) ? diff : same;
      }
      return;
    }
  }
  throw DomainError("unknown gate kind");
}

void apply_gates(StateVector& state, std::span<const GateOp> gates) {
  for (const auto& g : gates) apply_gate(state, g);
}

void apply_rx_all(StateVector& state, double theta) {
  const double c = std::cos(theta / 2);
  const double s = -std::sin(theta / 2);
  auto amp = state.amplitudes();
  const std::size_t dim = amp.size();
  for (std::size_t q = 0; q < state.num_qubits(); ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double r0 = amp[i].real(), i0 = amp[i].imag();
        const double r1 = amp[i + stride].real(), i1 = amp[i + stride].imag();
        // (c, -i sin) acting on (a0, a1): -i*s*a = (s*im, -s*re) with s = -sin
        amp[i] = Complex(c * r0 - s * i1, c * i0 + s * r1);
        amp[i + stride] = Complex(c * r1 - s * i0, c * i1 + s * r0);
      }
    }
  }
}

void apply_diagonal_phase(StateVector& state, std::span<const double> energies, double gamma) {
  auto amp = state.amplitudes();
  if (energies.size() != amp.size()) throw DomainError("diagonal size mismatch");
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double phi = -gamma * energies[i];
    const double c = std::cos(phi), s = std::sin(phi);
    const double re = amp[i].real(), im = amp[i].imag();
    amp[i] = Complex(c * re - s * im, c * im + s * re);
  }
}

double exact_diagonal_expectation(const StateVector& state,
                                  const std::function<double(std::uint64_t)>& cost) {
  const auto amp = state.amplitudes();
  double total = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double p = std::norm(amp[i]);
    if (p != 0.0) total += p * cost(i);
  }
  return total;
}

std::uint64_t ShotHistogram::count(std::uint64_t index) const {
  auto it = counts_.find(index);
  return it == counts_.end() ? 0 : it->second;
}

void ShotHistogram::add(std::uint64_t index, std::uint64_t times) {
  if (num_qubits_ < 64 && (index >> num_qubits_) != 0) {
    throw DomainError("outcome index wider than the histogram's qubit count");
  }
  if (times == 0) return;
  counts_[index] += times;
  total_ += times;
}

void ShotHistogram::merge(const ShotHistogram& other) {
  if (other.num_qubits_ != num_qubits_) throw DomainError("histogram widths differ");
  for (const auto& [k, c] : other.counts_) add(k, c);
}

std::uint64_t sample_once(const StateVector& state, Rng& rng) {
  const auto amp = state.amplitudes();
  const double u = uniform01(rng) * state.norm() * state.norm();
  double acc = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    acc += std::norm(amp[i]);
    if (u < acc) return i;
  }
  // Round-off: fall back to the last outcome with nonzero weight.
  for (std::size_t i = amp.size(); i-- > 0;) {
    if (std::norm(amp[i]) > 0.0) return i;
  }
  return 0;
}

ShotHistogram sample(const StateVector& state, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("sample requires at least one shot");
  const auto amp = state.amplitudes();
  std::vector<double> cdf(amp.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    acc += std::norm(amp[i]);
    cdf[i] = acc;
  }
  Rng rng(seed);
  ShotHistogram hist(state.num_qubits());
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    if (idx >= cdf.size()) idx = cdf.size() - 1;
    // Skip zero-weight outcomes that share a cumulative value.
    while (idx > 0 && std::norm(amp[idx]) == 0.0 && cdf[idx - 1] >= u) --idx;
    hist.add(idx);
  }
  return hist;
}

namespace {

std::string angle_text(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_angle(const std::string& t, std::size_t line_no) {
  double x = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw IoError("gate program line " + std::to_string(line_no) + ": bad angle '" + t + "'");
  }
  return x;
}

std::size_t parse_qubit(const std::string& t, std::size_t line_no) {
  std::size_t x = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw IoError("gate program line " + std::to_string(line_no) + ": bad qubit '" + t + "'");
  }
  return x;
}

}  // namespace

std::string write_gate_program(std::span<const GateOp> gates) {
  std::ostringstream os;
  for (const auto& g : gates) {
    switch (g.kind) {
      case GateKind::kH: os << "H " << g.targets[0]; break;
      case GateKind::kRx: os << "RX " << angle_text(g.theta) << ' ' << g.targets[0]; break;
      case GateKind::kRz: os << "RZ " << angle_text(g.theta) << ' ' << g.targets[0]; break;
      case GateKind::kCnot: os << "CNOT " << g.targets[0] << ' ' << g.targets[1]; break;
      case GateKind::kZz:
        os << "ZZ " << angle_text(g.theta) << ' ' << g.targets[0] << ' ' << g.targets[1];
        break;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<GateOp> parse_gate_program(std::istream& in) {
  std::vector<GateOp> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    const auto& op = tok[0];
    auto want = [&](std::size_t n) {
      if (tok.size() != n) {
        throw IoError("gate program line " + std::to_string(line_no) + ": '" + op + "' expects " +
                      std::to_string(n - 1) + " operands");
      }
    };
    if (op == "H") {
      want(2);
      out.push_back(GateOp::h(parse_qubit(tok[1], line_no)));
    } else if (op == "RX") {
      want(3);
      out.push_back(GateOp::rx(parse_angle(tok[1], line_no), parse_qubit(tok[2], line_no)));
    } else if (op == "RZ") {
      want(3);
      out.push_back(GateOp::rz(parse_angle(tok[1], line_no), parse_qubit(tok[2], line_no)));
    } else if (op == "CNOT") {
      want(3);
      out.push_back(GateOp::cnot(parse_qubit(tok[1], line_no), parse_qubit(tok[2], line_no)));
    } else if (op == "ZZ") {
      want(4);
      out.push_back(GateOp::zz(parse_angle(tok[1], line_no), parse_qubit(tok[2], line_no),
                               parse_qubit(tok[3], line_no)));
    } else {
      throw IoError("gate program line " + std::to_string(line_no) + ": unknown gate '" + op + "'");
    }
  }
  return out;
}

}  // namespace qbnsl
