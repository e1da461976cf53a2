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

#include "qbnsl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qbnsl/error.hpp"
#include "qbnsl/network.hpp"
#include "qbnsl/rng.hpp"
#include "qbnsl/version.hpp"

namespace qbnsl {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string task_name(Task task) {
  switch (task) {
    case Task::kScore: return "score";
    case Task::kLearn: return "learn";
    case Task::kSample: return "sample";
    case Task::kSweepPa: return "sweep-pa";
    case Task::kSweepNoise: return "sweep-noise";
    case Task::kCompare: return "compare";
  }
  return "unknown";
}

Task parse_task(const std::string& name) {
  for (Task t : {Task::kScore, Task::kLearn, Task::kSample, Task::kSweepPa, Task::kSweepNoise,
                 Task::kCompare}) {
    if (task_name(t) == name) return t;
  }
  throw ConfigError("task", "unknown task '" + name + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(join_path(path, key), "unknown field");
  }
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

// A scalar or a nonempty list of scalars.
template <class F>
auto as_list(const json& v, const std::string& path, F convert) {
  using T = decltype(convert(v, path));
  std::vector<T> out;
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(path, "list must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert(v[i], index_path(path, i)));
  } else {
    out.push_back(convert(v, path));
  }
  return out;
}

fs::path resolve(const std::string& p, const fs::path& base) {
  fs::path path(p);
  return path.is_relative() ? (base / path).lexically_normal() : path;
}

ChannelKind as_channel(const json& v, const std::string& path) {
  try {
    return parse_channel(as_string(v, path));
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir,
                              std::optional<Task> expected) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"task", "seed", "output", "data", "score", "qaoa", "noise", "noise_sweep",
                        "compare", "workers"});
  ExperimentConfig cfg;

  if (root.contains("task")) {
    cfg.task = parse_task(as_string(root["task"], "task"));
    if (expected && *expected != cfg.task) {
      throw ConfigError("task", "config is for '" + task_name(cfg.task) + "', not '" +
                                    task_name(*expected) + "'");
    }
  } else if (expected) {
    cfg.task = *expected;
  } else {
    throw ConfigError("task", "missing");
  }
  if (root.contains("seed")) cfg.seed = as_count(root["seed"], "seed");
  if (root.contains("output")) cfg.output = resolve(as_string(root["output"], "output"), base_dir);
  if (root.contains("workers")) {
    cfg.workers = as_count(root["workers"], "workers");
    if (cfg.workers < 1) throw ConfigError("workers", "must be at least 1");
  }

  if (!root.contains("data")) throw ConfigError("data", "missing");
  {
    const json& d = root["data"];
    check_keys(d, "data", {"dataset", "network", "samples", "variables"});
    if (d.contains("dataset")) {
      cfg.dataset_arg = as_string(d["dataset"], "data.dataset");
      cfg.dataset = resolve(cfg.dataset_arg, base_dir);
    }
    if (d.contains("network")) {
      cfg.network_arg = as_string(d["network"], "data.network");
      cfg.network = resolve(cfg.network_arg, base_dir);
    }
    if (d.contains("samples")) cfg.samples = as_count(d["samples"], "data.samples");
    if (d.contains("variables")) {
      cfg.variables = as_list(d["variables"], "data.variables", as_string);
      std::set<std::string> unique(cfg.variables.begin(), cfg.variables.end());
      if (unique.size() != cfg.variables.size()) throw ConfigError("data.variables", "duplicate name");
    }
    if (cfg.dataset.empty() && cfg.network.empty()) {
      throw ConfigError("data", "needs a dataset or a network");
    }
    if (cfg.dataset.empty() && cfg.samples == 0) {
      throw ConfigError("data.samples", "must be positive when sampling from the network");
    }
    if (cfg.task == Task::kSample && (cfg.network.empty() || cfg.samples == 0)) {
      throw ConfigError("data", "sample task needs a network and a positive sample count");
    }
    for (const auto& [path, field] : {std::pair{cfg.dataset, "data.dataset"},
                                      std::pair{cfg.network, "data.network"}}) {
      if (!path.empty() && !fs::exists(path)) {
        throw IoError(std::string(field) + ": file not found: " + path.string());
      }
    }
  }

  if (root.contains("score")) {
    const json& s = root["score"];
    check_keys(s, "score", {"type", "ess", "max_indegree"});
    if (s.contains("type")) {
      const std::string t = as_string(s["type"], "score.type");
      if (t == "bic") {
        cfg.score = ScoreKind::bic();
      } else if (t == "bdeu") {
        cfg.score = ScoreKind::bdeu();
      } else {
        throw ConfigError("score.type", "expected 'bic' or 'bdeu'");
      }
    }
    if (s.contains("ess")) {
      cfg.score.ess = as_number(s["ess"], "score.ess");
      if (!(cfg.score.ess > 0.0)) throw ConfigError("score.ess", "must be positive");
    }
    if (s.contains("max_indegree")) {
      cfg.max_indegree = as_count(s["max_indegree"], "score.max_indegree");
      if (cfg.max_indegree < 1 || cfg.max_indegree > 2) {
        throw ConfigError("score.max_indegree", "must be 1 or 2");
      }
    }
  }

  if (root.contains("qaoa")) {
    const json& q = root["qaoa"];
    check_keys(q, "qaoa", {"layers", "alpha", "shots", "restarts", "rhobeg", "rhoend", "maxiter",
                           "delta_max", "penalties"});
    if (q.contains("layers")) {
      cfg.layers = as_list(q["layers"], "qaoa.layers", [](const json& v, const std::string& p) {
        const auto n = as_count(v, p);
        if (n < 1) throw ConfigError(p, "must be at least 1");
        return static_cast<std::size_t>(n);
      });
    }
    if (q.contains("alpha")) {
      cfg.alphas = as_list(q["alpha"], "qaoa.alpha", [](const json& v, const std::string& p) {
        const double a = as_number(v, p);
        if (!(a > 0.0 && a <= 1.0)) throw ConfigError(p, "must lie in (0, 1]");
        return a;
      });
    }
    if (q.contains("shots")) {
      cfg.shots = as_count(q["shots"], "qaoa.shots");
      if (cfg.shots < 1) throw ConfigError("qaoa.shots", "must be at least 1");
    }
    if (q.contains("restarts")) {
      cfg.restarts = as_count(q["restarts"], "qaoa.restarts");
      if (cfg.restarts < 1) throw ConfigError("qaoa.restarts", "must be at least 1");
    }
    if (q.contains("rhobeg")) cfg.optimizer.rhobeg = as_number(q["rhobeg"], "qaoa.rhobeg");
    if (q.contains("rhoend")) cfg.optimizer.rhoend = as_number(q["rhoend"], "qaoa.rhoend");
    if (!(cfg.optimizer.rhoend > 0.0 && cfg.optimizer.rhoend <= cfg.optimizer.rhobeg)) {
      throw ConfigError("qaoa.rhoend", "need 0 < rhoend <= rhobeg");
    }
    if (q.contains("maxiter")) {
      cfg.optimizer.maxiter = as_count(q["maxiter"], "qaoa.maxiter");
      if (cfg.optimizer.maxiter < 1) throw ConfigError("qaoa.maxiter", "must be at least 1");
    }
    if (q.contains("delta_max")) {
      cfg.delta_max = as_number(q["delta_max"], "qaoa.delta_max");
      if (!(*cfg.delta_max > 0.0)) throw ConfigError("qaoa.delta_max", "must be positive");
    }
    if (q.contains("penalties")) {
      const json& p = q["penalties"];
      check_keys(p, "qaoa.penalties", {"trans", "consist"});
      if (!p.contains("trans") || !p.contains("consist")) {
        throw ConfigError("qaoa.penalties", "needs both 'trans' and 'consist'");
      }
      PenaltyWeights w{as_number(p["trans"], "qaoa.penalties.trans"),
                       as_number(p["consist"], "qaoa.penalties.consist")};
      if (!(w.trans > 0.0)) throw ConfigError("qaoa.penalties.trans", "must be positive");
      if (!(w.consist > 0.0)) throw ConfigError("qaoa.penalties.consist", "must be positive");
      cfg.penalties = w;
    }
  }

  if (root.contains("noise")) {
    const json& n = root["noise"];
    check_keys(n, "noise", {"channel", "omega"});
    if (!n.contains("channel")) throw ConfigError("noise.channel", "missing");
    NoiseSetting s;
    s.channel = as_channel(n["channel"], "noise.channel");
    s.omega = n.contains("omega") ? as_number(n["omega"], "noise.omega") : 0.0;
    if (!(s.omega >= 0.0 && s.omega <= 1.0)) throw ConfigError("noise.omega", "must lie in [0, 1]");
    cfg.noise = s;
  }

  if (root.contains("noise_sweep")) {
    const json& n = root["noise_sweep"];
    check_keys(n, "noise_sweep", {"channels", "omegas", "log10_omegas"});
    if (n.contains("channels")) cfg.channels = as_list(n["channels"], "noise_sweep.channels", as_channel);
    if (n.contains("omegas") && n.contains("log10_omegas")) {
      throw ConfigError("noise_sweep", "give either 'omegas' or 'log10_omegas'");
    }
    if (n.contains("omegas")) cfg.omegas = as_list(n["omegas"], "noise_sweep.omegas", as_number);
    if (n.contains("log10_omegas")) {
      for (double e : as_list(n["log10_omegas"], "noise_sweep.log10_omegas", as_number)) {
        cfg.omegas.push_back(std::pow(10.0, e));
      }
    }
    for (std::size_t i = 0; i < cfg.omegas.size(); ++i) {
      if (!(cfg.omegas[i] >= 0.0 && cfg.omegas[i] <= 1.0)) {
        throw ConfigError(index_path("noise_sweep.omegas", i), "must lie in [0, 1]");
      }
    }
  }
  if (cfg.task == Task::kSweepNoise && (cfg.channels.empty() || cfg.omegas.empty())) {
    throw ConfigError("noise_sweep", "sweep-noise needs channels and omegas");
  }

  if (root.contains("compare")) {
    const json& c = root["compare"];
    check_keys(c, "compare", {"algorithms", "tabu", "anneal"});
    if (c.contains("algorithms")) {
      cfg.algorithms = as_list(c["algorithms"], "compare.algorithms", as_string);
      for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        const auto& a = cfg.algorithms[i];
        if (a != "exhaustive" && a != "hc" && a != "tabu" && a != "sa" && a != "qaoa") {
          throw ConfigError(index_path("compare.algorithms", i),
                            "expected exhaustive, hc, tabu, sa or qaoa");
        }
      }
    }
    if (c.contains("tabu")) {
      const json& t = c["tabu"];
      check_keys(t, "compare.tabu", {"tenure", "max_stall"});
      if (t.contains("tenure")) cfg.tabu.tenure = as_count(t["tenure"], "compare.tabu.tenure");
      if (t.contains("max_stall")) cfg.tabu.max_stall = as_count(t["max_stall"], "compare.tabu.max_stall");
      if (cfg.tabu.tenure < 1) throw ConfigError("compare.tabu.tenure", "must be at least 1");
    }
    if (c.contains("anneal")) {
      const json& a = c["anneal"];
      check_keys(a, "compare.anneal", {"t0", "tend", "steps", "restarts"});
      if (a.contains("t0")) cfg.anneal_t0 = as_number(a["t0"], "compare.anneal.t0");
      if (a.contains("tend")) cfg.anneal.tend = as_number(a["tend"], "compare.anneal.tend");
      if (a.contains("steps")) cfg.anneal.steps = as_count(a["steps"], "compare.anneal.steps");
      if (a.contains("restarts")) {
        cfg.anneal_restarts = as_count(a["restarts"], "compare.anneal.restarts");
        if (cfg.anneal_restarts < 1) throw ConfigError("compare.anneal.restarts", "must be at least 1");
      }
      try {
        AnnealSchedule check = cfg.anneal;
        check.t0 = cfg.anneal_t0.value_or(2 * check.tend);
        check.validate();
      } catch (const DomainError& e) {
        throw ConfigError("compare.anneal", e.what());
      }
    }
  }
  if (cfg.task == Task::kCompare && cfg.algorithms.empty()) {
    cfg.algorithms = {"exhaustive", "hc", "tabu", "sa", "qaoa"};
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, std::optional<Task> expected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), expected);
}

std::string ExperimentConfig::canonical() const {
  json j;
  j["task"] = task_name(task);
  j["seed"] = seed;
  j["data"] = {{"dataset", dataset_arg}, {"network", network_arg}, {"samples", samples},
               {"variables", variables}};
  j["score"] = {{"type", score.name()}, {"ess", score.ess}, {"max_indegree", max_indegree}};
  json q = {{"layers", layers}, {"alpha", alphas}, {"shots", shots}, {"restarts", restarts},
            {"rhobeg", optimizer.rhobeg}, {"rhoend", optimizer.rhoend},
            {"maxiter", optimizer.maxiter}};
  q["delta_max"] = delta_max ? json(*delta_max) : json(nullptr);
  q["penalties"] = penalties ? json{{"trans", penalties->trans}, {"consist", penalties->consist}}
                             : json(nullptr);
  j["qaoa"] = q;
  j["noise"] = noise ? json{{"channel", channel_name(noise->channel)}, {"omega", noise->omega}}
                     : json(nullptr);
  std::vector<std::string> ch;
  for (auto c : channels) ch.push_back(channel_name(c));
  j["noise_sweep"] = {{"channels", ch}, {"omegas", omegas}};
  j["compare"] = {{"algorithms", algorithms},
                  {"tabu", {{"tenure", tabu.tenure}, {"max_stall", tabu.max_stall}}},
                  {"anneal", {{"t0", anneal_t0 ? json(*anneal_t0) : json(nullptr)},
                              {"tend", anneal.tend}, {"steps", anneal.steps},
                              {"restarts", anneal_restarts}}}};
  j["allow_override"] = allow_override;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Tables and histograms

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

void ResultTable::write_csv(std::ostream& out) const {
  out << "# config_hash " << config_hash << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

ResultTable ResultTable::read_csv(std::istream& in) {
  ResultTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("result table: empty file");
  line = strip_cr(line);
  const std::string prefix = "# config_hash ";
  if (line.rfind(prefix, 0) != 0) throw IoError("result table: missing config hash line");
  t.config_hash = line.substr(prefix.size());
  if (!std::getline(in, line)) throw IoError("result table: missing header");
  t.columns = split_commas(strip_cr(line));
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    t.rows.push_back(split_commas(line));
    if (t.rows.back().size() != t.columns.size()) throw IoError("result table: ragged row");
  }
  return t;
}

void emit_histogram(std::ostream& out, const ShotHistogram& hist, const CostOracle& cost,
                    std::span<const std::string> names) {
  const QubitLayout layout = QubitLayout::for_qubit_count(hist.num_qubits());
  struct Row {
    std::string bits;
    std::uint64_t count;
    std::uint64_t index;
  };
  std::vector<Row> rows;
  for (const auto& [index, count] : hist.counts()) {
    rows.push_back({bits_to_string(bits_from_index(index, hist.num_qubits())), count, index});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.count != b.count ? a.count > b.count : a.bits < b.bits;
  });
  out << "bitstring,count,cost,arcs\n";
  for (const auto& r : rows) {
    const Bits bits = bits_from_index(r.index, hist.num_qubits());
    out << r.bits << ',' << r.count << ',' << format_number(cost(r.index)) << ','
        << format_arcs(decode(bits, layout).adjacency, names) << '\n';
  }
}

ShotHistogram read_histogram(std::istream& in) {
  std::string line;
  std::optional<ShotHistogram> hist;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("bitstring,", 0) == 0) continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() < 2) throw IoError("histogram line " + std::to_string(line_no) + ": too few cells");
    Bits bits;
    std::uint64_t count = 0;
    try {
      bits = bits_from_string(cells[0]);
    } catch (const DomainError& e) {
      throw IoError("histogram line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto res = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), count);
    if (res.ec != std::errc() || res.ptr != cells[1].data() + cells[1].size()) {
      throw IoError("histogram line " + std::to_string(line_no) + ": bad count");
    }
    if (!hist) hist.emplace(bits.size());
    if (bits.size() != hist->num_qubits()) {
      throw IoError("histogram line " + std::to_string(line_no) + ": bitstring length changed");
    }
    hist->add(index_from_bits(bits), count);
  }
  if (!hist) throw IoError("histogram: no rows");
  return *hist;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Problem {
  DiscreteDataset data;
  std::optional<BayesianNetwork> network;
  std::optional<AdjacencyMatrix> truth;  // generating structure over the selected variables
  std::uint64_t data_seed = 0;
};

Problem load_problem(const ExperimentConfig& cfg) {
  std::optional<BayesianNetwork> bn;
  if (!cfg.network.empty()) bn = load_network(cfg.network);
  const std::uint64_t data_seed = derive_seed(cfg.seed, 0);
  auto data = [&] {
    if (!cfg.dataset.empty()) {
      return bn ? load_dataset_csv(cfg.dataset, bn->variables()) : load_dataset_csv(cfg.dataset);
    }
    return forward_sample(*bn, cfg.samples, data_seed);
  }();
  std::vector<std::size_t> columns;
  if (!cfg.variables.empty()) {
    for (std::size_t i = 0; i < cfg.variables.size(); ++i) {
      try {
        columns.push_back(data.index_of(cfg.variables[i]));
      } catch (const DomainError&) {
        throw ConfigError(index_path("data.variables", i),
                          "no variable named '" + cfg.variables[i] + "'");
      }
    }
    data = data.select(columns);
  }
  std::optional<AdjacencyMatrix> truth;
  if (bn) {
    std::vector<std::size_t> nodes;
    for (const auto& name : data.names()) {
      try {
        nodes.push_back(bn->index_of(name));
      } catch (const DomainError&) {
        throw ConfigError("data", "dataset column '" + name + "' is not in the network");
      }
    }
    truth = bn->dag().adjacency().induced(nodes);
  }
  return Problem{std::move(data), std::move(bn), std::move(truth),
                 cfg.dataset.empty() ? data_seed : 0};
}

struct Instance {
  Problem problem;
  LocalScoreTable table;
  PseudoBooleanPolynomial hamiltonian;
  double delta_max;
  std::optional<ScoredDag> optimum;
  std::vector<std::string> names;
};

Instance build_instance(const ExperimentConfig& cfg) {
  Problem problem = load_problem(cfg);
  LocalScoreTable table = build_score_table(problem.data, cfg.score, cfg.max_indegree);
  PseudoBooleanPolynomial h = cfg.penalties ? build_hamiltonian(table, *cfg.penalties)
                                            : build_hamiltonian(table);
  const double dmax = cfg.delta_max ? *cfg.delta_max : dominance_penalty(table);
  std::optional<ScoredDag> optimum;
  if (table.num_nodes() <= 5) optimum = exhaustive_best_dag(table);
  auto names = problem.data.names();
  return Instance{std::move(problem), std::move(table), std::move(h), dmax, std::move(optimum),
                  std::move(names)};
}

// Structure the SHD column is measured against.
std::pair<const AdjacencyMatrix*, std::string> reference(const Instance& inst) {
  if (inst.problem.truth) return {&*inst.problem.truth, "truth"};
  if (inst.optimum) return {&inst.optimum->dag.adjacency(), "exhaustive"};
  return {nullptr, "none"};
}

std::string shd_cell(const Instance& inst, const AdjacencyMatrix& g) {
  const auto [ref, label] = reference(inst);
  return ref ? std::to_string(shd(g, *ref)) : "NA";
}

NoiseModel make_noise(const std::optional<NoiseSetting>& s) {
  NoiseModel m;
  if (s) m.channels.emplace_back(s->channel, s->omega);
  return m;
}

struct QaoaCell {
  std::size_t layers = 1;
  double alpha = 1.0;
  std::optional<NoiseSetting> noise;
  std::uint64_t seed = 0;
  std::vector<QaoaResult> results;
  double wall_seconds = 0.0;
};

void run_qaoa_cell(const ExperimentConfig& cfg, const Instance& inst, QaoaCell& cell) {
  const auto start = Clock::now();
  const AnsatzTemplate ansatz(to_ising(inst.hamiltonian), cell.layers, cfg.allow_override);
  ObjectiveConfig oc;
  oc.alpha = cell.alpha;
  oc.shots = cfg.shots;
  oc.max_indegree = cfg.max_indegree;
  oc.delta_max = inst.delta_max;
  cell.results = optimize_restarts(ansatz, oc, inst.hamiltonian, cfg.optimizer,
                                   make_noise(cell.noise), cell.seed, cfg.restarts);
  cell.wall_seconds = seconds_since(start);
}

// Lowest best_cost; first restart on ties.
std::size_t best_restart(const std::vector<QaoaResult>& results) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].best_cost < results[best].best_cost) best = r;
  }
  return best;
}

const std::vector<std::string> kQaoaColumns = {
    "id",           "algorithm",      "layers",        "alpha",           "shots",
    "channel",      "omega",          "restarts",      "best_cost_mean",  "best_cost_std",
    "best_cost_min", "objective_mean", "objective_std", "iterations_mean", "iterations_std",
    "converged",    "entropy_mean",   "optimum_hits",  "shd",             "reference",
    "arcs"};

std::vector<std::string> qaoa_row(const std::string& id, const ExperimentConfig& cfg,
                                  const Instance& inst, const QaoaCell& cell) {
  std::vector<double> costs, objectives, iterations, entropies;
  std::size_t converged = 0, hits = 0;
  for (const auto& r : cell.results) {
    costs.push_back(r.best_cost);
    objectives.push_back(r.best_objective);
    iterations.push_back(static_cast<double>(r.iterations));
    entropies.push_back(solution_entropy(r.final_histogram));
    converged += r.converged ? 1 : 0;
    if (inst.optimum && r.best_dag && *r.best_dag == inst.optimum->dag) ++hits;
  }
  const Summary c = summarize(costs), o = summarize(objectives), it = summarize(iterations),
                e = summarize(entropies);
  const QaoaResult& best = cell.results[best_restart(cell.results)];
  return {id,
          "QAOA",
          std::to_string(cell.layers),
          format_number(cell.alpha),
          std::to_string(cfg.shots),
          cell.noise ? channel_name(cell.noise->channel) : "none",
          format_number(cell.noise ? cell.noise->omega : 0.0),
          std::to_string(cell.results.size()),
          format_number(c.mean),
          format_number(c.stddev),
          format_number(c.min),
          format_number(o.mean),
          format_number(o.stddev),
          format_number(it.mean),
          format_number(it.stddev),
          std::to_string(converged),
          format_number(e.mean),
          inst.optimum ? std::to_string(hits) : "NA",
          shd_cell(inst, best.best_adjacency),
          reference(inst).second,
          format_arcs(best.best_adjacency, inst.names)};
}

json manifest_base(const ExperimentConfig& cfg, const Instance* inst) {
  json m;
  m["tool"] = "qbnsl";
  m["version"] = kVersion;
  m["task"] = task_name(cfg.task);
  m["config"] = json::parse(cfg.canonical());
  m["config_hash"] = cfg.hash();
  m["master_seed"] = cfg.seed;
  m["seed_scheme"] =
      "dataset = derive_seed(master, 0); cell k = derive_seed(master, k + 1); "
      "restart r = derive_seed(cell, r)";
  if (inst) {
    m["dataset_seed"] = inst->problem.data_seed;
    m["variables"] = inst->names;
    m["rows"] = inst->problem.data.num_rows();
    m["delta_max"] = inst->delta_max;
    if (inst->optimum) {
      m["exhaustive_optimum"] = {{"score", inst->optimum->score},
                                 {"arcs", format_arcs(inst->optimum->dag.adjacency(), inst->names)}};
    }
  }
  return m;
}

ExperimentOutput run_qaoa_grid(const ExperimentConfig& cfg, const Instance& inst,
                               std::vector<QaoaCell> cells, json manifest,
                               const std::string& id_prefix) {
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k].seed = derive_seed(cfg.seed, k + 1);
  parallel_for(cells.size(), cfg.workers, [&](std::size_t k) { run_qaoa_cell(cfg, inst, cells[k]); });

  ExperimentOutput out;
  out.table.config_hash = cfg.hash();
  out.table.columns = kQaoaColumns;
  json cell_log = json::array();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string id = id_prefix + std::to_string(k);
    out.table.rows.push_back(qaoa_row(id, cfg, inst, cells[k]));
    json seeds = json::array();
    for (std::size_t r = 0; r < cells[k].results.size(); ++r) seeds.push_back(derive_seed(cells[k].seed, r));
    cell_log.push_back({{"id", id}, {"seed", cells[k].seed}, {"restart_seeds", seeds},
                        {"wall_seconds", cells[k].wall_seconds}});
  }
  manifest["cells"] = cell_log;

  if (cfg.task == Task::kLearn) {
    const CostOracle cost(inst.hamiltonian, cfg.max_indegree, inst.delta_max);
    std::ostringstream records, hist;
    for (const auto& cell : cells) {
      for (const auto& r : cell.results) write_result_record(records, to_record(r), inst.names);
    }
    const QaoaCell& first = cells.front();
    emit_histogram(hist, first.results[best_restart(first.results)].final_histogram, cost, inst.names);
    out.attachments.emplace_back(".records.txt", records.str());
    out.attachments.emplace_back(".histogram.csv", hist.str());
  }
  out.manifest_json = manifest.dump(2);
  return out;
}

ExperimentOutput run_score(const ExperimentConfig& cfg, const Instance& inst, json manifest) {
  ExperimentOutput out;
  out.table.config_hash = cfg.hash();
  out.table.columns = {"node", "parents", "score"};
  for (std::size_t i = 0; i < inst.table.num_nodes(); ++i) {
    for (const auto& [parents, value] : inst.table.node_entries(i)) {
      std::string ps;
      for (std::size_t p : parents) ps += (ps.empty() ? "" : " ") + inst.names[p];
      out.table.rows.push_back({inst.names[i], ps.empty() ? "-" : ps, format_number(value)});
    }
  }
  out.manifest_json = manifest.dump(2);
  return out;
}

ExperimentOutput run_sample(const ExperimentConfig& cfg, const Problem& problem, json manifest) {
  ExperimentOutput out;
  out.table.config_hash = cfg.hash();
  const auto& d = problem.data;
  out.table.columns = d.names();
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    std::vector<std::string> row;
    for (std::size_t v = 0; v < d.num_variables(); ++v) {
      row.push_back(d.variable(v).states.at(static_cast<std::size_t>(d.value(r, v))));
    }
    out.table.rows.push_back(std::move(row));
  }
  manifest["dataset_seed"] = problem.data_seed;
  manifest["rows"] = d.num_rows();
  out.manifest_json = manifest.dump(2);
  return out;
}

std::string score_cell(const Instance& inst, const AdjacencyMatrix& g, std::size_t m) {
  if (!g.is_acyclic()) return "NA";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.in_degree(i) > m) return "NA";
  }
  return format_number(inst.table.structure_score(g));
}

ExperimentOutput run_compare(const ExperimentConfig& cfg, const Instance& inst, json manifest) {
  struct Entry {
    std::vector<std::string> row;
    json log;
  };
  const std::size_t count = cfg.algorithms.size();
  std::vector<Entry> entries(count);
  const std::size_t m = cfg.max_indegree;

  // QAOA tuning cells run through the pool individually.
  std::vector<QaoaCell> qaoa_cells;
  std::size_t qaoa_slot = count;
  for (std::size_t k = 0; k < count; ++k) {
    if (cfg.algorithms[k] != "qaoa") continue;
    qaoa_slot = k;
    const std::uint64_t base = derive_seed(cfg.seed, k + 1);
    for (std::size_t p : cfg.layers) {
      for (double a : cfg.alphas) {
        QaoaCell c;
        c.layers = p;
        c.alpha = a;
        c.noise = cfg.noise;
        c.seed = derive_seed(base, qaoa_cells.size());
        qaoa_cells.push_back(c);
      }
    }
    break;
  }
  const std::size_t jobs = count + qaoa_cells.size();
  parallel_for(jobs, cfg.workers, [&](std::size_t job) {
    if (job >= count) {
      run_qaoa_cell(cfg, inst, qaoa_cells[job - count]);
      return;
    }
    const std::string& algo = cfg.algorithms[job];
    const std::uint64_t seed = derive_seed(cfg.seed, job + 1);
    const auto start = Clock::now();
    Entry& e = entries[job];
    const std::string id = "c" + std::to_string(job);
    if (algo == "exhaustive") {
      if (!inst.optimum) throw ResourceError("exhaustive search supports at most 5 variables");
      const auto& g = inst.optimum->dag.adjacency();
      e.row = {id, "exhaustive", "-", "1", format_number(inst.optimum->score),
               format_number(-inst.optimum->score), shd_cell(inst, g), reference(inst).second,
               format_arcs(g, inst.names)};
    } else if (algo == "hc" || algo == "tabu") {
      const SearchResult r = algo == "hc" ? hill_climb(inst.table, m, seed)
                                          : tabu_search(inst.table, m, cfg.tabu, seed);
      const std::string settings =
          algo == "hc" ? "-"
                       : "tenure=" + std::to_string(cfg.tabu.tenure) +
                             " max_stall=" + std::to_string(cfg.tabu.max_stall);
      e.row = {id, algo == "hc" ? "HC" : "Tabu", settings, "1", format_number(r.score),
               format_number(-r.score), shd_cell(inst, r.dag.adjacency()), reference(inst).second,
               format_arcs(r.dag.adjacency(), inst.names)};
    } else if (algo == "sa") {
      AnnealSchedule schedule = cfg.anneal;
      schedule.t0 = cfg.anneal_t0.value_or(inst.delta_max);
      std::optional<AnnealResult> best;
      for (std::size_t r = 0; r < cfg.anneal_restarts; ++r) {
        AnnealResult a = simulated_annealing_qubo(inst.hamiltonian, schedule, derive_seed(seed, r),
                                                  m, inst.delta_max);
        if (!best || a.cost < best->cost) best = std::move(a);
      }
      const AdjacencyMatrix g =
          decode(best->bits, QubitLayout::for_qubit_count(inst.hamiltonian.num_vars())).adjacency;
      e.row = {id, kAnnealLabel,
               "t0=" + format_number(schedule.t0) + " tend=" + format_number(schedule.tend) +
                   " steps=" + std::to_string(schedule.steps),
               std::to_string(cfg.anneal_restarts), score_cell(inst, g, m),
               format_number(best->cost), shd_cell(inst, g), reference(inst).second,
               format_arcs(g, inst.names)};
    }
    e.log = {{"id", id}, {"algorithm", algo}, {"seed", seed},
             {"wall_seconds", seconds_since(start)}};
  });

  if (qaoa_slot < count) {
    std::size_t best_cell = 0;
    for (std::size_t c = 1; c < qaoa_cells.size(); ++c) {
      const auto& a = qaoa_cells[c].results;
      const auto& b = qaoa_cells[best_cell].results;
      if (a[best_restart(a)].best_cost < b[best_restart(b)].best_cost) best_cell = c;
    }
    const QaoaCell& cell = qaoa_cells[best_cell];
    const QaoaResult& r = cell.results[best_restart(cell.results)];
    const std::string id = "c" + std::to_string(qaoa_slot);
    Entry& e = entries[qaoa_slot];
    e.row = {id, "QAOA",
             "p=" + std::to_string(cell.layers) + " alpha=" + format_number(cell.alpha) +
                 " shots=" + std::to_string(cfg.shots),
             std::to_string(cfg.restarts), score_cell(inst, r.best_adjacency, m),
             format_number(r.best_cost), shd_cell(inst, r.best_adjacency), reference(inst).second,
             format_arcs(r.best_adjacency, inst.names)};
    json tuning = json::array();
    double wall = 0.0;
    for (const auto& c : qaoa_cells) {
      const auto& rs = c.results;
      tuning.push_back({{"layers", c.layers}, {"alpha", c.alpha}, {"seed", c.seed},
                        {"best_cost", rs[best_restart(rs)].best_cost},
                        {"wall_seconds", c.wall_seconds}});
      wall += c.wall_seconds;
    }
    e.log = {{"id", id}, {"algorithm", "qaoa"}, {"seed", derive_seed(cfg.seed, qaoa_slot + 1)},
             {"tuning", tuning}, {"wall_seconds", wall}};
  }

  ExperimentOutput out;
  out.table.config_hash = cfg.hash();
  out.table.columns = {"id", "algorithm", "settings", "restarts", "score", "cost", "shd",
                       "reference", "arcs"};
  json cell_log = json::array();
  for (auto& e : entries) {
    out.table.rows.push_back(std::move(e.row));
    cell_log.push_back(std::move(e.log));
  }
  manifest["cells"] = cell_log;
  out.manifest_json = manifest.dump(2);
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  ExperimentOutput out;
  if (cfg.task == Task::kSample) {
    const Problem problem = load_problem(cfg);
    out = run_sample(cfg, problem, manifest_base(cfg, nullptr));
  } else {
    const Instance inst = build_instance(cfg);
    const json manifest = manifest_base(cfg, &inst);
    switch (cfg.task) {
      case Task::kScore:
        out = run_score(cfg, inst, manifest);
        break;
      case Task::kLearn:
      case Task::kSweepPa: {
        std::vector<QaoaCell> cells;
        for (std::size_t p : cfg.layers) {
          for (double a : cfg.alphas) {
            QaoaCell c;
            c.layers = p;
            c.alpha = a;
            c.noise = cfg.noise;
            cells.push_back(c);
          }
        }
        out = run_qaoa_grid(cfg, inst, std::move(cells), manifest,
                            cfg.task == Task::kLearn ? "l" : "pa");
        break;
      }
      case Task::kSweepNoise: {
        std::vector<QaoaCell> cells;
        for (ChannelKind ch : cfg.channels) {
          for (double w : cfg.omegas) {
            QaoaCell c;
            c.layers = cfg.layers.front();
            c.alpha = cfg.alphas.front();
            c.noise = NoiseSetting{ch, w};
            cells.push_back(c);
          }
        }
        out = run_qaoa_grid(cfg, inst, std::move(cells), manifest, "n");
        break;
      }
      case Task::kCompare:
        out = run_compare(cfg, inst, manifest);
        break;
      case Task::kSample:
        break;
    }
  }
  json m = json::parse(out.manifest_json);
  m["wall_seconds"] = seconds_since(start);
  out.manifest_json = m.dump(2);
  return out;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out) {
  if (cfg.output.empty()) throw ConfigError("output", "no output path given");
  auto write_file = [](const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << contents;
    if (!f) throw IoError("failed writing '" + path.string() + "'");
  };
  std::ostringstream table;
  out.table.write_csv(table);
  write_file(cfg.output, table.str());
  write_file(fs::path(cfg.output.string() + ".manifest.json"), out.manifest_json + "\n");
  for (const auto& [suffix, contents] : out.attachments) {
    write_file(fs::path(cfg.output.string() + suffix), contents);
  }
}

bool replay_matches(const fs::path& path, const ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return ResultTable::read_csv(in).config_hash == cfg.hash();
}

}  // namespace qbnsl
