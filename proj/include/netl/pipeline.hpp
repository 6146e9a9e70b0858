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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "netl/embeddings.hpp"
#include "netl/evaluation.hpp"
#include "netl/features.hpp"
#include "netl/generation.hpp"
#include "netl/ranker.hpp"

namespace netl {

struct PipelinePaths {
  std::filesystem::path corpus = "corpus.jsonl";
  std::filesystem::path articles = "articles.jsonl";
  std::filesystem::path lexicon_doc = "lexicon-doc.tsv";
  std::filesystem::path lexicon_word = "lexicon-word.tsv";
  std::filesystem::path collapsed = "collapsed.txt";
  std::filesystem::path word_vectors = "word.vec";
  std::filesystem::path doc_vectors = "doc.vec";
  std::filesystem::path docword_vectors = "docword.vec";
  std::filesystem::path pagerank = "pagerank.tsv";
  std::filesystem::path topics = "topics.tsv";
  std::filesystem::path candidates = "candidates.tsv";
  std::filesystem::path features = "features.tsv";
  std::filesystem::path gold = "gold.tsv";
  std::filesystem::path model = "model.json";
  std::filesystem::path labels = "labels.tsv";
  std::filesystem::path report = "report.tsv";
  std::filesystem::path quality = "quality.tsv";
  std::filesystem::path ablation = "ablation.tsv";

  // Relative paths are taken relative to `workdir`.
  PipelinePaths resolved(const std::filesystem::path& workdir) const;
};

enum class EmbeddingModels { kBoth, kDoc, kWord };

struct PipelineConfig {
  PipelinePaths paths;
  std::size_t min_body_tokens = 40;
  std::size_t max_title_words = 4;
  TrainConfig skipgram = TrainConfig::desk_skipgram();
  TrainConfig dbow = TrainConfig::desk_dbow();
  EmbeddingModels models = EmbeddingModels::kBoth;
  std::size_t topic_terms = 10;
  GenerationConfig generation;
  PageRankConfig pagerank;
  SvrConfig svr;
  CvConfig cv;
  // `label` from an existing features file instead of generating.
  bool from_features = false;
  // `label` by the trigram baseline instead of a trained model.
  bool unsupervised = false;

  // Copies a global seed and worker count into every stage's settings.
  void set_seed(std::uint64_t seed);
  void set_workers(int workers);
};

enum class Stage {
  kPreprocess,
  kTrainEmbeddings,
  kPageRank,
  kGenerate,
  kFeatures,
  kTrainRanker,
  kLabel,
  kEvaluate,
  kAblate,
};

std::optional<Stage> parse_stage(std::string_view name);
std::string_view to_string(Stage stage);

// Input files a stage reads under `config`.
std::vector<std::filesystem::path> stage_inputs(Stage stage, const PipelineConfig& config);

// Runs one stage. Every output is written atomically; stage parameters and
// input/output checksums are logged to `log`. Throws kMissingInput when an input is
// missing, and netl::Error for invalid content.
void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log);

}  // namespace netl
