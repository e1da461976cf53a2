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

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qbnsl/qbnsl.h"

namespace {

struct Invocation {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool override_ceiling = false;
};

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", inv.seed, "Master seed, overrides the config");
  cmd->add_option("--out", inv.out, "Output table path, overrides the config");
  cmd->add_flag("--override-qubit-ceiling", inv.override_ceiling,
                "Allow registers up to 30 qubits (n = 5)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian network structure learning with QAOA"};
  app.set_version_flag("--version", std::string(qbnsl_version()));
  app.require_subcommand(1);

  Invocation inv;
  const char* tasks[][2] = {
      {"score", "Local score table for a dataset"},
      {"learn", "QAOA structure learning with restarts"},
      {"sample", "Forward-sample a dataset from a network"},
      {"sweep-pa", "Grid over layers p and CVaR alpha"},
      {"sweep-noise", "Grid over noise channels and strengths"},
      {"compare", "Exhaustive, HC, tabu, SA and QAOA side by side"},
  };
  for (const auto& t : tasks) add_common(app.add_subcommand(t[0], t[1]), inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  const int rc = qbnsl_run_experiment(task.c_str(), inv.config.c_str(), inv.seed.has_value() ? 1 : 0,
                                      inv.seed.value_or(0), inv.out ? inv.out->c_str() : nullptr,
                                      inv.override_ceiling ? 1 : 0);
  if (rc != QBNSL_OK) {
    std::fprintf(stderr, "qbnsl %s: %s\n", task.c_str(), qbnsl_last_error());
    if (rc == QBNSL_ERR_DOMAIN) return QBNSL_ERR_CONFIG;
    return rc == QBNSL_ERR_INTERNAL ? 1 : rc;
  }
  return 0;
}
