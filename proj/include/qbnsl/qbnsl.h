/* Copyright 2026 The qbnsl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QBNSL_QBNSL_H_
#define QBNSL_QBNSL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(QBNSL_BUILDING_LIBRARY)
#define QBNSL_API __attribute__((visibility("default")))
#else
#define QBNSL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The nonzero values double as CLI exit codes. */
typedef enum {
  QBNSL_OK = 0,
  QBNSL_ERR_CONFIG = 2,
  QBNSL_ERR_IO = 3,
  QBNSL_ERR_RESOURCE = 4,
  QBNSL_ERR_DOMAIN = 5,
  QBNSL_ERR_INTERNAL = 6
} qbnsl_status;

typedef enum { QBNSL_SCORE_BIC = 0, QBNSL_SCORE_BDEU = 1 } qbnsl_score_type;

typedef struct qbnsl_dataset qbnsl_dataset;
typedef struct qbnsl_network qbnsl_network;
typedef struct qbnsl_score_table qbnsl_score_table;
typedef struct qbnsl_hamiltonian qbnsl_hamiltonian;
typedef struct qbnsl_result qbnsl_result;

/* Message for the last failing call on this thread; "" when none. */
QBNSL_API const char* qbnsl_last_error(void);
QBNSL_API const char* qbnsl_version(void);

/* Number of labelled DAGs on n nodes as a decimal string. */
QBNSL_API int qbnsl_count_dags(int n, char* buffer, size_t buffer_size);

QBNSL_API int qbnsl_dataset_load_csv(const char* path, qbnsl_dataset** out);
QBNSL_API size_t qbnsl_dataset_num_variables(const qbnsl_dataset* data);
QBNSL_API size_t qbnsl_dataset_num_rows(const qbnsl_dataset* data);
QBNSL_API void qbnsl_dataset_free(qbnsl_dataset* data);

QBNSL_API int qbnsl_network_load(const char* path, qbnsl_network** out);
QBNSL_API size_t qbnsl_network_num_nodes(const qbnsl_network* bn);
/* Row-major n*n adjacency of the network's DAG. */
QBNSL_API int qbnsl_network_adjacency(const qbnsl_network* bn, uint8_t* adjacency, size_t size);
QBNSL_API int qbnsl_network_sample(const qbnsl_network* bn, size_t rows, uint64_t seed,
                                   qbnsl_dataset** out);
QBNSL_API void qbnsl_network_free(qbnsl_network* bn);

QBNSL_API int qbnsl_score_table_build(const qbnsl_dataset* data, qbnsl_score_type type, double ess,
                                      size_t max_indegree, qbnsl_score_table** out);
QBNSL_API int qbnsl_score_table_local(const qbnsl_score_table* table, size_t node,
                                      const size_t* parents, size_t num_parents, double* out);
/* Best DAG by exhaustive search (n <= 5): row-major n*n adjacency and score. */
QBNSL_API int qbnsl_score_table_best_dag(const qbnsl_score_table* table, uint8_t* adjacency,
                                         size_t size, double* score);
QBNSL_API void qbnsl_score_table_free(qbnsl_score_table* table);

/* Score terms plus penalties at the default dominance weights. */
QBNSL_API int qbnsl_hamiltonian_build(const qbnsl_score_table* table, qbnsl_hamiltonian** out);
QBNSL_API size_t qbnsl_hamiltonian_num_qubits(const qbnsl_hamiltonian* h);
/* `bits` is a '0'/'1' string, qubit 0 first. */
QBNSL_API int qbnsl_hamiltonian_evaluate(const qbnsl_hamiltonian* h, const char* bits, double* out);
QBNSL_API void qbnsl_hamiltonian_free(qbnsl_hamiltonian* h);

typedef struct {
  size_t layers;
  double alpha;
  size_t shots;
  double rhobeg;
  double rhoend;
  size_t maxiter;
  int allow_override; /* nonzero lifts the qubit ceiling to 30 */
} qbnsl_qaoa_options;

QBNSL_API void qbnsl_qaoa_options_default(qbnsl_qaoa_options* options);
/* One noiseless QAOA run on the Hamiltonian. */
QBNSL_API int qbnsl_qaoa_run(const qbnsl_hamiltonian* h, const qbnsl_qaoa_options* options,
                             uint64_t seed, qbnsl_result** out);
QBNSL_API double qbnsl_result_best_cost(const qbnsl_result* r);
/* Writes the best bitstring plus NUL; needs num_qubits + 1 bytes. */
QBNSL_API int qbnsl_result_best_bits(const qbnsl_result* r, char* buffer, size_t buffer_size);
QBNSL_API size_t qbnsl_result_iterations(const qbnsl_result* r);
QBNSL_API int qbnsl_result_converged(const qbnsl_result* r);
QBNSL_API void qbnsl_result_free(qbnsl_result* r);

/* Runs an experiment task ("score", "learn", "sample", "sweep-pa",
 * "sweep-noise", "compare") from a config file. `seed` and `out_path`
 * override the config when `has_seed` is nonzero / `out_path` is non-NULL. */
QBNSL_API int qbnsl_run_experiment(const char* task, const char* config_path, int has_seed,
                                   uint64_t seed, const char* out_path, int allow_override);

#ifdef __cplusplus
}
#endif

#endif /* QBNSL_QBNSL_H_ */
