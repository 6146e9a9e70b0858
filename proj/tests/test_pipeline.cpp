/*
 * Copyright 2026 The NETL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "netl/error.hpp"
#include "netl/pipeline.hpp"
#include "netl/tabular.hpp"

namespace netl {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Workdir {
  fs::path dir;
  explicit Workdir(const std::string& name)
      : dir(fs::temp_directory_path() / ("netl-test-" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const char* f : {"corpus.jsonl", "topics.tsv", "gold.tsv"}) {
      fs::copy_file(fs::path(NETL_FIXTURE_DIR) / f, dir / f);
    }
  }
  ~Workdir() { fs::remove_all(dir); }
};

PipelineConfig small_config(const fs::path& dir) {
  PipelineConfig c;
  c.skipgram.dim = 12;
  c.skipgram.epochs = 20;
  c.dbow.dim = 12;
  c.dbow.epochs = 20;
  c.svr.epochs = 200;
  c.cv.folds = 2;
  c.cv.runs = 1;
  c.paths = c.paths.resolved(dir);
  return c;
}

void run_all(const PipelineConfig& c, std::ostream& log) {
  for (Stage s : {Stage::kPreprocess, Stage::kTrainEmbeddings, Stage::kPageRank,
                  Stage::kGenerate, Stage::kFeatures, Stage::kTrainRanker, Stage::kLabel}) {
    run_stage(s, c, log);
  }
}

TEST_CASE("stage names") {
  for (const char* name : {"preprocess", "train-embeddings", "pagerank", "generate", "features",
                           "train-ranker", "label", "evaluate", "ablate"}) {
    const auto stage = parse_stage(name);
    REQUIRE(stage.has_value());
    CHECK(to_string(*stage) == name);
  }
  CHECK_FALSE(parse_stage("bogus").has_value());
}

TEST_CASE("missing inputs are reported before any work") {
  const fs::path dir = fs::temp_directory_path() / "netl-test-empty";
  fs::create_directories(dir);
  PipelineConfig c;
  c.paths = c.paths.resolved(dir);
  std::ostringstream log;
  try {
    run_stage(Stage::kGenerate, c, log);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingInput);
    CHECK(std::string(e.what()).find("lexicon-doc.tsv") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("stages compose, are deterministic and log provenance") {
  Workdir w("compose");
  const PipelineConfig c = small_config(w.dir);
  std::ostringstream log;
  run_all(c, log);
  CHECK(log.str().find("[preprocess] param min_body_tokens = 40") != std::string::npos);
  CHECK(log.str().find("[label] output") != std::string::npos);
  CHECK(log.str().find("fnv1a=") != std::string::npos);

  // filter drops the short and the disambiguation record
  std::ifstream articles(c.paths.articles);
  std::size_t n = 0;
  for (std::string line; std::getline(articles, line);) ++n;
  CHECK(n == 24);

  // 19 candidates per topic where the union is large enough
  std::ifstream cands(c.paths.candidates);
  std::map<std::string, int> per_topic;
  for (std::string line; std::getline(cands, line);) {
    if (!line.starts_with("topic_id")) ++per_topic[split_tabs(line)[0]];
  }
  CHECK(per_topic.size() == 6);
  for (const auto& [topic, count] : per_topic) CHECK(count == 19);

  const std::string end_to_end = slurp(c.paths.labels);
  PipelineConfig staged = c;
  staged.from_features = true;
  run_stage(Stage::kLabel, staged, log);
  CHECK(slurp(c.paths.labels) == end_to_end);

  std::map<fs::path, std::string> first;
  for (const auto& entry : fs::directory_iterator(w.dir)) first[entry.path()] = slurp(entry.path());
  run_all(c, log);
  for (const auto& [path, bytes] : first) CHECK_MESSAGE(slurp(path) == bytes, path.string());

  run_stage(Stage::kEvaluate, c, log);
  run_stage(Stage::kAblate, c, log);
  CHECK(fs::exists(c.paths.report));
  CHECK(fs::exists(c.paths.quality));
  CHECK(fs::exists(c.paths.ablation));

  PipelineConfig unsupervised = c;
  unsupervised.unsupervised = true;
  unsupervised.from_features = true;
  run_stage(Stage::kLabel, unsupervised, log);
  CHECK(slurp(c.paths.labels).find("\tNA\n") != std::string::npos);
}

TEST_CASE("single-model candidate generation") {
  Workdir w("single");
  PipelineConfig c = small_config(w.dir);
  c.models = EmbeddingModels::kWord;
  std::ostringstream log;
  for (Stage s : {Stage::kPreprocess, Stage::kTrainEmbeddings, Stage::kGenerate}) {
    run_stage(s, c, log);
  }
  CHECK_FALSE(fs::exists(c.paths.doc_vectors));
  const std::string cands = slurp(c.paths.candidates);
  CHECK(cands.find("\tNA\t") != std::string::npos);
}

TEST_CASE("tabular helpers") {
  CHECK(format_fixed(-0.0000001) == "0.000000");
  CHECK(format_fixed(1.5, 2) == "1.50");
  CHECK(format_exact(0.1) == "0.1");
  CHECK(parse_double("2.5", "x") == 2.5);
  CHECK_THROWS_AS(parse_double("2.5x", "x"), Error);
  CHECK_THROWS_AS(parse_int("", "x"), Error);
  CHECK(split_tabs("a\t\tb") == std::vector<std::string>{"a", "", "b"});

  const fs::path dir = fs::temp_directory_path() / "netl-test-atomic";
  fs::remove_all(dir);
  const fs::path file = dir / "sub" / "out.txt";
  write_file_atomic(file, [](std::ostream& out) { out << "hello\n"; });
  CHECK(slurp(file) == "hello\n");
  CHECK(file_checksum(file).size() == 16);
  // a failing writer leaves the old file in place
  CHECK_THROWS(write_file_atomic(file, [](std::ostream& out) {
    out << "partial";
    throw std::runtime_error("boom");
  }));
  CHECK(slurp(file) == "hello\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(file.parent_path())) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace netl
