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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "qbnsl/error.hpp"
#include "qbnsl/experiment.hpp"

namespace fs = std::filesystem;
using qbnsl::ExperimentConfig;
using qbnsl::Task;

namespace {

const fs::path kSource = QBNSL_SOURCE_DIR;

std::string config_path_error(const std::string& text) {
  try {
    qbnsl::parse_config(text, kSource);
  } catch (const qbnsl::ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string learn_config(const std::string& extra = "") {
  return R"({"task": "learn", "seed": 3, "output": "out.csv",
    "data": {"network": "data/cancer_like.json", "samples": 300,
             "variables": ["Pollution", "Smoker", "Cancer"]},
    "qaoa": {"layers": [1], "alpha": [0.5], "shots": 64, "restarts": 2, "maxiter": 15})" +
         extra + "}";
}

std::string table_text(const qbnsl::ResultTable& t) {
  std::ostringstream out;
  t.write_csv(out);
  return out.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qbnsl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("task names") {
  for (Task t : {Task::kScore, Task::kLearn, Task::kSample, Task::kSweepPa, Task::kSweepNoise,
                 Task::kCompare})
    CHECK(qbnsl::parse_task(qbnsl::task_name(t)) == t);
  CHECK_THROWS_AS(qbnsl::parse_task("fit"), qbnsl::ConfigError);
}

TEST_CASE("config parsing fills fields and resolves paths") {
  const auto cfg = qbnsl::parse_config(learn_config(), kSource);
  CHECK(cfg.task == Task::kLearn);
  CHECK(cfg.seed == 3);
  CHECK(cfg.network == kSource / "data/cancer_like.json");
  CHECK(cfg.network_arg == "data/cancer_like.json");
  CHECK(cfg.output == kSource / "out.csv");
  CHECK(cfg.samples == 300);
  CHECK(cfg.layers == std::vector<std::size_t>{1});
  CHECK(cfg.alphas == std::vector<double>{0.5});
  CHECK(cfg.shots == 64);
  CHECK(cfg.restarts == 2);
  CHECK(cfg.optimizer.maxiter == 15);
  CHECK(cfg.score.type == qbnsl::ScoreKind::Type::kBic);
  CHECK_FALSE(cfg.noise.has_value());
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_path_error("{") == "");
  CHECK(config_path_error(R"({"data": {"network": "x.json", "samples": 5}})") == "task");
  CHECK(config_path_error(learn_config(R"(, "colour": 1)")) == "colour");
  CHECK(config_path_error(learn_config(R"(, "score": {"type": "aic"})")) == "score.type");
  CHECK(config_path_error(learn_config(R"(, "score": {"max_indegree": 3})")) == "score.max_indegree");
  CHECK(config_path_error(learn_config(R"(, "score": {"ess": -1})")) == "score.ess");
  CHECK(config_path_error(learn_config(R"(, "noise": {"omega": 0.1})")) == "noise.channel");
  CHECK(config_path_error(learn_config(R"(, "noise": {"channel": "pd", "phase": 0.1})")) ==
        "noise.phase");
  CHECK(config_path_error(learn_config(R"(, "workers": 0)")) == "workers");
  CHECK(config_path_error(R"({"task": "learn", "data": {}})") == "data");
  CHECK(config_path_error(R"({"task": "learn", "data": {"network": "data/cancer_like.json", "samples": -4}})") ==
        "data.samples");
  CHECK(config_path_error(R"({"task": "learn", "data": {"network": "data/cancer_like.json", "samples": 1},
                              "qaoa": {"alpha": [0.5, 1.5]}})") == "qaoa.alpha[1]");
  CHECK(config_path_error(R"({"task": "learn", "data": {"network": "data/cancer_like.json", "samples": 1},
                              "qaoa": {"layers": [2, 0]}})") == "qaoa.layers[1]");
  CHECK(config_path_error(R"({"task": "learn", "data": {"network": "data/cancer_like.json", "samples": 1},
                              "qaoa": {"rhobeg": 0.1, "rhoend": 0.2}})") == "qaoa.rhoend");
  CHECK(config_path_error(R"({"task": "compare", "data": {"network": "data/cancer_like.json", "samples": 1},
                              "compare": {"algorithms": ["hc", "ga"]}})")
            .rfind("compare.algorithms", 0) == 0);
  CHECK(config_path_error(R"({"task": "sweep-noise", "data": {"network": "data/cancer_like.json", "samples": 1}})") ==
        "noise_sweep");
  CHECK_THROWS_AS(qbnsl::parse_config(learn_config(), kSource, Task::kCompare), qbnsl::ConfigError);
}

TEST_CASE("expected task may stand in for a missing one") {
  const std::string text = R"({"data": {"network": "data/cancer_like.json", "samples": 10}})";
  CHECK(qbnsl::parse_config(text, kSource, Task::kScore).task == Task::kScore);
}

TEST_CASE("config hash tracks result-relevant fields only") {
  const auto a = qbnsl::parse_config(learn_config(), kSource);
  auto b = a;
  b.output = "/elsewhere/out.csv";
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.shots = 65;
  CHECK(a.hash() != b.hash());
  auto c = a;
  c.seed = 4;
  CHECK(a.hash() != c.hash());
  CHECK(nlohmann::json::parse(a.canonical())["qaoa"]["shots"] == 64);
  CHECK(a.canonical().find("out.csv") == std::string::npos);
}

TEST_CASE("numbers format deterministically") {
  CHECK(qbnsl::format_number(-0.0) == "0");
  CHECK(qbnsl::format_number(0.1) == "0.1");
  CHECK(qbnsl::format_number(1e-5) == "1e-05");
  CHECK(qbnsl::format_number(-2.5) == "-2.5");
  CHECK(qbnsl::format_number(1.0 / 3) == "0.3333333333333333");
  CHECK(std::stod(qbnsl::format_number(M_PI)) == M_PI);
}

TEST_CASE("result tables round-trip") {
  qbnsl::ResultTable t;
  t.config_hash = "0123456789abcdef";
  t.columns = {"a", "b", "c"};
  t.rows = {{"1", "", "x"}, {"2", "0.5", ""}};
  const std::string text = table_text(t);
  CHECK(text.rfind("# config_hash 0123456789abcdef\na,b,c\n", 0) == 0);
  std::istringstream in(text);
  const auto back = qbnsl::ResultTable::read_csv(in);
  CHECK(back.config_hash == t.config_hash);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);

  std::istringstream no_hash("a,b\n1,2\n");
  CHECK_THROWS_AS(qbnsl::ResultTable::read_csv(no_hash), qbnsl::IoError);
  std::istringstream ragged("# config_hash 0\na,b\n1\n");
  CHECK_THROWS_AS(qbnsl::ResultTable::read_csv(ragged), qbnsl::IoError);
}

TEST_CASE("histograms round-trip through their text form") {
  qbnsl::PseudoBooleanPolynomial poly(9);
  poly.add_term({0}, -1.0);
  const qbnsl::CostOracle cost(poly, 2, 1.0);
  qbnsl::ShotHistogram h(9);
  h.add(1, 5);
  h.add(3, 9);
  h.add(256, 1);
  std::ostringstream out;
  const std::vector<std::string> names{"A", "B", "C"};
  qbnsl::emit_histogram(out, h, cost, names);
  const std::string text = out.str();
  CHECK(text.rfind("bitstring,count,cost,arcs\n110000000,9,-1,A->B A->C\n100000000,5,-1,A->B\n", 0) == 0);
  std::istringstream in(text);
  CHECK(qbnsl::read_histogram(in) == h);

  std::istringstream bad("bitstring,count\n0101,x\n");
  CHECK_THROWS_AS(qbnsl::read_histogram(bad), qbnsl::IoError);
  std::istringstream mixed("01,1\n011,1\n");
  CHECK_THROWS_AS(qbnsl::read_histogram(mixed), qbnsl::IoError);
  std::istringstream empty("bitstring,count\n");
  CHECK_THROWS_AS(qbnsl::read_histogram(empty), qbnsl::IoError);
}

TEST_CASE("parallel_for covers every job and propagates errors") {
  for (std::size_t workers : {1u, 3u, 16u}) {
    std::vector<int> out(37, 0);
    qbnsl::parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  }
  CHECK_THROWS_AS(qbnsl::parallel_for(8, 4,
                                      [](std::size_t i) {
                                        if (i == 5) throw qbnsl::DomainError("job 5");
                                      }),
                  qbnsl::DomainError);
}

TEST_CASE("score task tabulates every family") {
  const auto cfg = qbnsl::parse_config(
      R"({"task": "score", "seed": 1, "data": {"network": "data/cancer_like.json", "samples": 200}})",
      kSource);
  const auto out = qbnsl::run_experiment(cfg);
  CHECK(out.table.columns == std::vector<std::string>{"node", "parents", "score"});
  CHECK(out.table.rows.size() == 5 * 11);
  CHECK(out.table.config_hash == cfg.hash());
}

TEST_CASE("learn runs are byte-identical and independent of worker count") {
  auto cfg = qbnsl::parse_config(learn_config(), kSource);
  const auto a = qbnsl::run_experiment(cfg);
  const auto b = qbnsl::run_experiment(cfg);
  cfg.workers = 3;
  const auto c = qbnsl::run_experiment(cfg);
  CHECK(table_text(a.table) == table_text(b.table));
  CHECK(table_text(a.table) == table_text(c.table));
  REQUIRE(a.table.rows.size() == 1);
  CHECK(a.table.columns.front() == "id");
  CHECK(a.table.rows[0][0] == "l0");
  CHECK(a.attachments == b.attachments);
  const auto manifest = nlohmann::json::parse(a.manifest_json);
  CHECK(manifest.contains("wall_seconds"));
  CHECK(table_text(a.table).find("wall") == std::string::npos);
}

TEST_CASE("outputs land beside the table and replay") {
  const fs::path dir = scratch_dir("outputs");
  auto cfg = qbnsl::parse_config(learn_config(), kSource);
  cfg.output = dir / "nested" / "learn.csv";
  const auto out = qbnsl::run_experiment(cfg);
  qbnsl::write_outputs(cfg, out);
  CHECK(fs::exists(cfg.output));
  CHECK(fs::exists(dir / "nested" / "learn.csv.manifest.json"));
  for (const auto& [suffix, contents] : out.attachments) {
    std::ifstream f(cfg.output.string() + suffix);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == contents);
  }
  CHECK(qbnsl::replay_matches(cfg.output, cfg));
  auto other = cfg;
  other.seed = 99;
  CHECK_FALSE(qbnsl::replay_matches(cfg.output, other));
  CHECK_THROWS_AS(qbnsl::replay_matches(dir / "missing.csv", cfg), qbnsl::IoError);
  other.output.clear();
  CHECK_THROWS_AS(qbnsl::write_outputs(other, out), qbnsl::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("unknown variables in the subset are reported by index") {
  const auto cfg = qbnsl::parse_config(
      R"({"task": "score", "data": {"network": "data/cancer_like.json", "samples": 20,
                                     "variables": ["Smoker", "Weather"]}})",
      kSource);
  try {
    qbnsl::run_experiment(cfg);
    FAIL("expected a config error");
  } catch (const qbnsl::ConfigError& e) {
    CHECK(e.path() == "data.variables[1]");
  }
}
