// Copyright 2026 The malcomm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the built command-line tool and checks exit codes and outputs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "malcomm/text_format.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() /
                       ("malcomm_cli_test_" + std::to_string(std::random_device{}()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome run(const std::string& args) {
  const fs::path log = scratch() / "last_output.txt";
  const std::string cmd =
      std::string("\"") + MALCOMM_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome out;
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  out.output = malcomm::read_file(log);
  return out;
}

std::string path(const std::string& rel) { return "\"" + (scratch() / rel).string() + "\""; }

void ensure_corpus() {
  static bool done = false;
  if (done) return;
  REQUIRE(run("synth --families 4 --samples-per-family 12 --out-dir " + path("corpus")).code == 0);
  done = true;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code != 0);
  CHECK(run("pipeline --bogus").code == 2);
}

TEST_CASE("synth writes a corpus and a dictionary") {
  ensure_corpus();
  CHECK(fs::exists(scratch() / "corpus" / "dataset.jsonl"));
  CHECK(fs::exists(scratch() / "corpus" / "dictionary.csv"));
}

TEST_CASE("pipeline end to end") {
  ensure_corpus();
  const Outcome o = run("pipeline --input " + path("corpus/dataset.jsonl") + " --dict " +
                        path("corpus/dictionary.csv") + " --out-dir " + path("run"));
  REQUIRE(o.code == 0);
  for (const char* f : {"edges.tsv", "partition.csv", "eval.json", "report.json"}) {
    CHECK(fs::exists(scratch() / "run" / f));
  }
  const auto eval = nlohmann::json::parse(malcomm::read_file(scratch() / "run" / "eval.json"));
  CHECK(eval["accuracy"].get<double>() >= 0.9);
}

TEST_CASE("parameter errors exit with code 2 and name the parameter") {
  ensure_corpus();
  const Outcome o = run("pipeline --input " + path("corpus/dataset.jsonl") + " --p 0 --out-dir " +
                        path("bad"));
  CHECK(o.code == 2);
  CHECK(o.output.find("p must be") != std::string::npos);
  CHECK(run("pipeline --input " + path("corpus/dataset.jsonl") + " --scope app --out-dir " +
            path("bad"))
            .code == 2);
  CHECK(run("graph --input " + path("corpus/dataset.jsonl") + " --method mst").code == 2);
}

TEST_CASE("missing or malformed input exits with code 1") {
  CHECK(run("pipeline --input " + path("nope.jsonl") + " --out-dir " + path("bad")).code == 1);
  malcomm::write_file(scratch() / "broken.jsonl", "{\"id\":\"a\",\"features\":{}}\nnot json\n");
  const Outcome o = run("tfidf --input " + path("broken.jsonl"));
  CHECK(o.code == 1);
  CHECK(o.output.find("line 2") != std::string::npos);
}

TEST_CASE("stage commands chain together") {
  ensure_corpus();
  const std::string data = path("corpus/dataset.jsonl");
  REQUIRE(run("graph --input " + data + " --out-dir " + path("g")).code == 0);
  REQUIRE(run("detect --input " + path("g/edges.tsv") + " --seed 5 --out-dir " + path("d")).code ==
          0);
  const Outcome e = run("eval --input " + data + " --partition " + path("d/partition.csv"));
  REQUIRE(e.code == 0);
  CHECK(nlohmann::json::parse(e.output)["rs"].get<double>() >= 0.9);
  CHECK(run("kmeans --input " + data + " --c 4 --out-dir " + path("k")).code == 0);
  CHECK(fs::exists(scratch() / "k" / "partition.csv"));
  CHECK(run("tfidf --input " + data).code == 0);
  CHECK(run("stats --input " + data + " --top 3").code == 0);
  CHECK(run("family-sim --input " + data).code == 0);
  CHECK(run("sweep --input " + data + " --values 1,10").code == 0);
  CHECK(run("bench --sizes 40 --repeats 1").code == 0);
}
