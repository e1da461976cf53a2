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

#include "qbnsl/qbnsl.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "qbnsl/dataset.hpp"
#include "qbnsl/error.hpp"
#include "qbnsl/experiment.hpp"
#include "qbnsl/graph.hpp"
#include "qbnsl/hamiltonian.hpp"
#include "qbnsl/network.hpp"
#include "qbnsl/qaoa.hpp"
#include "qbnsl/scoring.hpp"
#include "qbnsl/version.hpp"

struct qbnsl_dataset {
  qbnsl::DiscreteDataset value;
};
struct qbnsl_network {
  qbnsl::BayesianNetwork value;
};
struct qbnsl_score_table {
  qbnsl::LocalScoreTable value;
};
struct qbnsl_hamiltonian {
  qbnsl::PseudoBooleanPolynomial poly;
  double delta_max;
  std::size_t max_indegree;
};
struct qbnsl_result {
  qbnsl::QaoaResult value;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return QBNSL_OK;
  } catch (const qbnsl::ConfigError& e) {
    return fail(QBNSL_ERR_CONFIG, e.what());
  } catch (const qbnsl::IoError& e) {
    return fail(QBNSL_ERR_IO, e.what());
  } catch (const qbnsl::ResourceError& e) {
    return fail(QBNSL_ERR_RESOURCE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QBNSL_ERR_RESOURCE, "out of memory");
  } catch (const qbnsl::DomainError& e) {
    return fail(QBNSL_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(QBNSL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QBNSL_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw qbnsl::DomainError(std::string(name) + " is NULL");
}

void copy_adjacency(const qbnsl::AdjacencyMatrix& g, uint8_t* out, size_t size) {
  const std::size_t n = g.size();
  if (size < n * n) throw qbnsl::DomainError("adjacency buffer too small");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = g.arc(i, j) ? 1 : 0;
  }
}

}  // namespace

extern "C" {

const char* qbnsl_last_error(void) { return g_last_error.c_str(); }

const char* qbnsl_version(void) { return qbnsl::kVersion; }

int qbnsl_count_dags(int n, char* buffer, size_t buffer_size) {
  return guarded([&] {
    require(buffer, "buffer");
    const std::string s = qbnsl::count_dags(n).str();
    if (s.size() + 1 > buffer_size) throw qbnsl::DomainError("buffer too small");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
  });
}

int qbnsl_dataset_load_csv(const char* path, qbnsl_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new qbnsl_dataset{qbnsl::load_dataset_csv(path)};
  });
}

size_t qbnsl_dataset_num_variables(const qbnsl_dataset* data) {
  return data ? data->value.num_variables() : 0;
}

size_t qbnsl_dataset_num_rows(const qbnsl_dataset* data) { return data ? data->value.num_rows() : 0; }

void qbnsl_dataset_free(qbnsl_dataset* data) { delete data; }

int qbnsl_network_load(const char* path, qbnsl_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new qbnsl_network{qbnsl::load_network(path)};
  });
}

size_t qbnsl_network_num_nodes(const qbnsl_network* bn) { return bn ? bn->value.size() : 0; }

int qbnsl_network_adjacency(const qbnsl_network* bn, uint8_t* adjacency, size_t size) {
  return guarded([&] {
    require(bn, "network");
    require(adjacency, "adjacency");
    copy_adjacency(bn->value.dag().adjacency(), adjacency, size);
  });
}

int qbnsl_network_sample(const qbnsl_network* bn, size_t rows, uint64_t seed, qbnsl_dataset** out) {
  return guarded([&] {
    require(bn, "network");
    require(out, "out");
    *out = new qbnsl_dataset{qbnsl::forward_sample(bn->value, rows, seed)};
  });
}

void qbnsl_network_free(qbnsl_network* bn) { delete bn; }

int qbnsl_score_table_build(const qbnsl_dataset* data, qbnsl_score_type type, double ess,
                            size_t max_indegree, qbnsl_score_table** out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    qbnsl::ScoreKind kind;
    if (type == QBNSL_SCORE_BIC) {
      kind = qbnsl::ScoreKind::bic();
    } else if (type == QBNSL_SCORE_BDEU) {
      kind = qbnsl::ScoreKind::bdeu(ess);
    } else {
      throw qbnsl::DomainError("unknown score type");
    }
    *out = new qbnsl_score_table{qbnsl::build_score_table(data->value, kind, max_indegree)};
  });
}

int qbnsl_score_table_local(const qbnsl_score_table* table, size_t node, const size_t* parents,
                            size_t num_parents, double* out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    if (num_parents > 0) require(parents, "parents");
    qbnsl::ParentSet ps(parents, parents + num_parents);
    std::sort(ps.begin(), ps.end());
    *out = table->value.score(node, ps);
  });
}

int qbnsl_score_table_best_dag(const qbnsl_score_table* table, uint8_t* adjacency, size_t size,
                               double* score) {
  return guarded([&] {
    require(table, "table");
    require(adjacency, "adjacency");
    require(score, "score");
    const qbnsl::ScoredDag best = qbnsl::exhaustive_best_dag(table->value);
    copy_adjacency(best.dag.adjacency(), adjacency, size);
    *score = best.score;
  });
}

void qbnsl_score_table_free(qbnsl_score_table* table) { delete table; }

int qbnsl_hamiltonian_build(const qbnsl_score_table* table, qbnsl_hamiltonian** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = new qbnsl_hamiltonian{qbnsl::build_hamiltonian(table->value),
                                 qbnsl::dominance_penalty(table->value), table->value.max_indegree()};
  });
}

size_t qbnsl_hamiltonian_num_qubits(const qbnsl_hamiltonian* h) { return h ? h->poly.num_vars() : 0; }

int qbnsl_hamiltonian_evaluate(const qbnsl_hamiltonian* h, const char* bits, double* out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(bits, "bits");
    require(out, "out");
    *out = h->poly.evaluate(qbnsl::bits_from_string(bits));
  });
}

void qbnsl_hamiltonian_free(qbnsl_hamiltonian* h) { delete h; }

void qbnsl_qaoa_options_default(qbnsl_qaoa_options* options) {
  if (options == nullptr) return;
  const qbnsl::ObjectiveConfig oc;
  const qbnsl::OptimizerConfig opt;
  options->layers = 3;
  options->alpha = oc.alpha;
  options->shots = oc.shots;
  options->rhobeg = opt.rhobeg;
  options->rhoend = opt.rhoend;
  options->maxiter = opt.maxiter;
  options->allow_override = 0;
}

int qbnsl_qaoa_run(const qbnsl_hamiltonian* h, const qbnsl_qaoa_options* options, uint64_t seed,
                   qbnsl_result** out) {
  return guarded([&] {
    require(h, "hamiltonian");
    require(options, "options");
    require(out, "out");
    const qbnsl::AnsatzTemplate ansatz(qbnsl::to_ising(h->poly), options->layers,
                                       options->allow_override != 0);
    qbnsl::ObjectiveConfig oc;
    oc.alpha = options->alpha;
    oc.shots = options->shots;
    oc.max_indegree = h->max_indegree;
    oc.delta_max = h->delta_max;
    qbnsl::OptimizerConfig opt{options->rhobeg, options->rhoend, options->maxiter};
    *out = new qbnsl_result{qbnsl::optimize(ansatz, oc, h->poly, opt, qbnsl::NoiseModel{}, seed)};
  });
}

double qbnsl_result_best_cost(const qbnsl_result* r) { return r ? r->value.best_cost : 0.0; }

int qbnsl_result_best_bits(const qbnsl_result* r, char* buffer, size_t buffer_size) {
  return guarded([&] {
    require(r, "result");
    require(buffer, "buffer");
    const std::string s = qbnsl::bits_to_string(r->value.best_bits);
    if (s.size() + 1 > buffer_size) throw qbnsl::DomainError("buffer too small");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
  });
}

size_t qbnsl_result_iterations(const qbnsl_result* r) { return r ? r->value.iterations : 0; }

int qbnsl_result_converged(const qbnsl_result* r) { return r && r->value.converged ? 1 : 0; }

void qbnsl_result_free(qbnsl_result* r) { delete r; }

int qbnsl_run_experiment(const char* task, const char* config_path, int has_seed, uint64_t seed,
                         const char* out_path, int allow_override) {
  return guarded([&] {
    require(task, "task");
    require(config_path, "config_path");
    qbnsl::ExperimentConfig cfg = qbnsl::load_config(config_path, qbnsl::parse_task(task));
    if (has_seed) cfg.seed = seed;
    if (out_path != nullptr) cfg.output = out_path;
    cfg.allow_override = allow_override != 0;
    if (cfg.output.empty()) throw qbnsl::ConfigError("output", "no output path given");
    const qbnsl::ExperimentOutput result = qbnsl::run_experiment(cfg);
    qbnsl::write_outputs(cfg, result);
  });
}

}  // extern "C"
