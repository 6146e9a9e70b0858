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

// Command-line driver: one subcommand per pipeline stage.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "netl/error.hpp"
#include "netl/pipeline.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;
constexpr int kExitRuntime = 70;

void add_train_options(CLI::App& app, const std::string& prefix, netl::TrainConfig& c) {
  app.add_option("--" + prefix + "-dim", c.dim, "vector dimension");
  app.add_option("--" + prefix + "-window", c.window, "context window");
  app.add_option("--" + prefix + "-negative", c.negative_samples, "negative samples");
  app.add_option("--" + prefix + "-sample", c.subsample_threshold, "subsampling threshold");
  app.add_option("--" + prefix + "-epochs", c.epochs, "training epochs");
  app.add_option("--" + prefix + "-min-count", c.min_count, "minimum token frequency");
  app.add_option("--" + prefix + "-alpha", c.alpha_initial, "initial learning rate");
  app.add_option("--" + prefix + "-min-alpha", c.alpha_final, "final learning rate");
  app.add_option("--" + prefix + "-dynamic-window", c.dynamic_window,
                 "shrink the window at random per center word");
}

void add_path_options(CLI::App& app, netl::PipelinePaths& p) {
  app.add_option("--corpus", p.corpus, "raw article records (JSON lines)");
  app.add_option("--articles", p.articles, "filtered article records");
  app.add_option("--lexicon-doc", p.lexicon_doc, "title lexicon for the document model");
  app.add_option("--lexicon-word", p.lexicon_word, "title lexicon for the word model");
  app.add_option("--collapsed", p.collapsed, "title-collapsed training text");
  app.add_option("--word-vectors", p.word_vectors, "skip-gram word table");
  app.add_option("--doc-vectors", p.doc_vectors, "dbow document table");
  app.add_option("--docword-vectors", p.docword_vectors, "dbow word table");
  app.add_option("--pagerank-scores", p.pagerank, "PageRank scores");
  app.add_option("--topics", p.topics, "topics table");
  app.add_option("--candidates", p.candidates, "candidate labels table");
  app.add_option("--features", p.features, "label features table");
  app.add_option("--gold", p.gold, "gold ratings table");
  app.add_option("--model", p.model, "trained ranker");
  app.add_option("--labels", p.labels, "ranked labels output");
  app.add_option("--report", p.report, "evaluation report");
  app.add_option("--quality", p.quality, "candidate quality statistics");
  app.add_option("--ablation-report", p.ablation, "feature ablation report");
}

int exit_code(netl::ErrorCode code) {
  switch (code) {
    case netl::ErrorCode::kInvalidConfig: return kExitUsage;
    case netl::ErrorCode::kIo: return kExitRuntime;
    default: return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic labelling with title embeddings and a supervised reranker", "netl"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file of option = value lines; flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();

  netl::PipelineConfig config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::filesystem::path workdir = ".";
  std::string models = "both";
  std::string dcg = "linear";

  app.add_option("--seed", seed, "seed for every randomized stage");
  app.add_option("--workers", workers, "worker threads; 1 is deterministic")
      ->check(CLI::PositiveNumber);
  app.add_option("--workdir", workdir, "directory that relative paths resolve against");
  add_path_options(app, config.paths);

  app.add_option("--min-body-tokens", config.min_body_tokens, "drop shorter articles");
  app.add_option("--max-title-words", config.max_title_words, "longest title kept as a label");
  add_train_options(app, "w2v", config.skipgram);
  add_train_options(app, "d2v", config.dbow);
  app.add_option("--models", models, "embedding models to use")
      ->check(CLI::IsMember({"both", "doc", "word"}));
  app.add_option("--topic-terms", config.topic_terms, "top terms per topic");
  app.add_option("--k-per-source", config.generation.k_per_source,
                 "titles kept from each embedding model");
  app.add_option("--out-k", config.generation.out_k, "candidates kept per topic");
  app.add_option("--damping", config.pagerank.damping, "PageRank damping factor");
  app.add_option("--pagerank-tol", config.pagerank.tolerance, "PageRank L1 tolerance");
  app.add_option("--pagerank-max-iter", config.pagerank.max_iterations,
                 "PageRank iteration cap");
  app.add_option("--svr-c", config.svr.c, "SVR cost");
  app.add_option("--svr-epsilon", config.svr.epsilon, "SVR insensitive-zone width");
  app.add_option("--svr-epochs", config.svr.epochs, "SVR optimisation epochs");
  app.add_option("--folds", config.cv.folds, "cross-validation folds");
  app.add_option("--runs", config.cv.runs, "cross-validation repetitions");
  app.add_option("--dcg", dcg, "gain form for nDCG")
      ->check(CLI::IsMember({"linear", "exponential"}));
  app.add_flag("--from-features", config.from_features,
               "label: rank an existing features table");
  app.add_flag("--unsupervised", config.unsupervised, "label: rank by letter trigrams only");

  const std::map<std::string, std::string> stages = {
      {"preprocess", "filter articles, build title lexicons and collapsed text"},
      {"train-embeddings", "train the dbow and skip-gram tables"},
      {"pagerank", "score articles over the link graph"},
      {"generate", "generate candidate labels per topic"},
      {"features", "compute ranking features for candidates"},
      {"train-ranker", "fit the SVR ranker on gold ratings"},
      {"label", "rank candidate labels for each topic"},
      {"evaluate", "cross-validated and cross-domain evaluation"},
      {"ablate", "drop-one-feature evaluation"},
  };
  for (const auto& [name, description] : stages) app.add_subcommand(name, description);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto stage = netl::parse_stage(name);
  if (!stage) {
    std::cerr << "netl: unknown subcommand '" << name << "'\n";
    return kExitUsage;
  }

  if (seed) config.set_seed(*seed);
  config.set_workers(workers);
  config.models = models == "doc"    ? netl::EmbeddingModels::kDoc
                  : models == "word" ? netl::EmbeddingModels::kWord
                                     : netl::EmbeddingModels::kBoth;
  config.cv.variant =
      dcg == "exponential" ? netl::DcgVariant::kExponential : netl::DcgVariant::kLinear;
  config.paths = config.paths.resolved(workdir);

  try {
    config.skipgram.validate();
    config.dbow.validate();
    netl::run_stage(*stage, config, std::cerr);
  } catch (const netl::Error& e) {
    std::cerr << "netl " << name << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "netl " << name << ": " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
