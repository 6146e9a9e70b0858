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

#include "netl/pipeline.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "netl/corpus.hpp"
#include "netl/tabular.hpp"

namespace netl {
namespace fs = std::filesystem;

PipelinePaths PipelinePaths::resolved(const fs::path& workdir) const {
  PipelinePaths out = *this;
  for (fs::path* p :
       {&out.corpus, &out.articles, &out.lexicon_doc, &out.lexicon_word, &out.collapsed,
        &out.word_vectors, &out.doc_vectors, &out.docword_vectors, &out.pagerank,
        &out.topics, &out.candidates, &out.features, &out.gold, &out.model, &out.labels,
        &out.report, &out.quality, &out.ablation}) {
    if (p->is_relative()) *p = workdir / *p;
  }
  return out;
}

void PipelineConfig::set_seed(std::uint64_t seed) {
  skipgram.seed = seed;
  dbow.seed = seed;
  svr.seed = seed;
  cv.seed = seed;
}

void PipelineConfig::set_workers(int workers) {
  skipgram.workers = workers;
  dbow.workers = workers;
  generation.workers = workers;
}

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kPreprocess, "preprocess"}, {Stage::kTrainEmbeddings, "train-embeddings"},
    {Stage::kPageRank, "pagerank"},     {Stage::kGenerate, "generate"},
    {Stage::kFeatures, "features"},     {Stage::kTrainRanker, "train-ranker"},
    {Stage::kLabel, "label"},           {Stage::kEvaluate, "evaluate"},
    {Stage::kAblate, "ablate"},
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingInput, path.string());
  return in;
}

template <typename Reader>
auto read_file(const fs::path& path, Reader&& reader) {
  auto in = open_input(path);
  return reader(in);
}

bool wants_doc(const PipelineConfig& c) { return c.models != EmbeddingModels::kWord; }
bool wants_word(const PipelineConfig& c) { return c.models != EmbeddingModels::kDoc; }

std::string describe(const TrainConfig& c) {
  std::ostringstream out;
  out << "dim=" << c.dim << " window=" << c.window << " negative=" << c.negative_samples
      << " sample=" << format_exact(c.subsample_threshold) << " epochs=" << c.epochs
      << " min_count=" << c.min_count << " seed=" << c.seed
      << " alpha=" << format_exact(c.alpha_initial) << ".." << format_exact(c.alpha_final)
      << " dynamic_window=" << c.dynamic_window << " workers=" << c.workers;
  return out.str();
}

class StageLog {
 public:
  StageLog(std::ostream& log, Stage stage) : log_(log), stage_(to_string(stage)) {}

  void param(std::string_view key, const std::string& value) {
    log_ << "[" << stage_ << "] param " << key << " = " << value << '\n';
  }
  void input(const fs::path& path) {
    log_ << "[" << stage_ << "] input " << path.string() << " fnv1a=" << file_checksum(path)
         << '\n';
  }
  void output(const fs::path& path) {
    log_ << "[" << stage_ << "] output " << path.string() << " fnv1a=" << file_checksum(path)
         << '\n';
  }
  void note(const std::string& text) { log_ << "[" << stage_ << "] " << text << '\n'; }

 private:
  std::ostream& log_;
  std::string stage_;
};

std::vector<Article> read_article_store(const fs::path& path) {
  return read_file(path, [](std::istream& in) { return read_articles(in); });
}

TitleLexicon load_lexicon(const fs::path& path, TitleVariant variant, std::size_t max_words) {
  return read_file(path, [&](std::istream& in) { return read_lexicon(in, variant, max_words); });
}

std::vector<Topic> load_topics(const PipelineConfig& config) {
  auto topics = read_file(config.paths.topics, [](std::istream& in) { return read_topics(in); });
  for (auto& t : topics) t = t.truncated(config.topic_terms);
  return topics;
}

void run_preprocess(const PipelineConfig& config, StageLog& log) {
  const auto& p = config.paths;
  log.param("min_body_tokens", std::to_string(config.min_body_tokens));
  log.param("max_title_words", std::to_string(config.max_title_words));
  const auto raw = read_article_store(p.corpus);
  const auto articles = filter_articles(raw, config.min_body_tokens);
  log.note("kept " + std::to_string(articles.size()) + " of " + std::to_string(raw.size()) +
           " articles");
  const auto doc_lexicon =
      build_title_lexicon(articles, TitleVariant::kDocEmbedding, config.max_title_words);
  const auto word_lexicon =
      build_title_lexicon(articles, TitleVariant::kWordEmbedding, config.max_title_words);
  write_file_atomic(p.articles, [&](std::ostream& out) { write_articles(out, articles); });
  write_file_atomic(p.lexicon_doc, [&](std::ostream& out) { write_lexicon(out, doc_lexicon); });
  write_file_atomic(p.lexicon_word,
                    [&](std::ostream& out) { write_lexicon(out, word_lexicon); });
  const TitleCollapser collapser(word_lexicon);
  write_file_atomic(p.collapsed, [&](std::ostream& out) {
    for (const auto& a : articles) {
      const auto tokens = collapser.collapse(a.body_tokens);
      for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
      out << '\n';
    }
  });
  for (const auto& path : {p.articles, p.lexicon_doc, p.lexicon_word, p.collapsed}) {
    log.output(path);
  }
}

void run_train_embeddings(const PipelineConfig& config, StageLog& log) {
  const auto& p = config.paths;
  if (wants_doc(config)) {
    log.param("dbow", describe(config.dbow));
    const auto articles = read_article_store(p.articles);
    const auto lexicon =
        load_lexicon(p.lexicon_doc, TitleVariant::kDocEmbedding, config.max_title_words);
    std::vector<Document> documents;
    std::vector<std::string> keep;
    std::set<std::string> used;
    for (const auto& a : articles) {
      const std::string title = normalize_title(a.title, TitleVariant::kDocEmbedding);
      std::string key = title_token(title);
      if (lexicon.contains(title) && used.insert(key).second) {
        keep.push_back(key);
      } else {
        key = "#" + std::to_string(a.id);  // trains, but is not a candidate
      }
      documents.push_back({std::move(key), a.body_tokens});
    }
    auto tables = train_dbow(documents, config.dbow);
    const auto docs = tables.documents.subset(keep);
    write_file_atomic(p.doc_vectors, [&](std::ostream& out) { write_table(out, docs); });
    write_file_atomic(p.docword_vectors,
                      [&](std::ostream& out) { write_table(out, tables.words); });
    log.output(p.doc_vectors);
    log.output(p.docword_vectors);
  }
  if (wants_word(config)) {
    log.param("skipgram", describe(config.skipgram));
    std::vector<std::vector<std::string>> sentences;
    {
      auto in = open_input(p.collapsed);
      std::string line;
      while (std::getline(in, line)) sentences.push_back(split_whitespace(line));
    }
    const auto words = train_skipgram(sentences, config.skipgram);
    write_file_atomic(p.word_vectors, [&](std::ostream& out) { write_table(out, words); });
    log.output(p.word_vectors);
  }
}

void run_pagerank(const PipelineConfig& config, StageLog& log) {
  log.param("damping", format_exact(config.pagerank.damping));
  log.param("tolerance", format_exact(config.pagerank.tolerance));
  log.param("max_iterations", std::to_string(config.pagerank.max_iterations));
  const auto articles = read_article_store(config.paths.articles);
  const auto result = pagerank(LinkGraph::from_articles(articles), config.pagerank);
  log.note((result.converged ? "converged" : "NOT converged") + std::string(" after ") +
           std::to_string(result.iterations) + " iterations, residual " +
           format_exact(result.residual));
  write_file_atomic(config.paths.pagerank,
                    [&](std::ostream& out) { write_pagerank(out, result.scores); });
  log.output(config.paths.pagerank);
}

struct LoadedModels {
  std::optional<EmbeddingTable> docs, doc_words, words;
  TitleLexicon doc_lexicon, word_lexicon;
};

LoadedModels load_models(const PipelineConfig& config) {
  const auto& p = config.paths;
  LoadedModels m;
  m.doc_lexicon = load_lexicon(p.lexicon_doc, TitleVariant::kDocEmbedding, config.max_title_words);
  m.word_lexicon =
      load_lexicon(p.lexicon_word, TitleVariant::kWordEmbedding, config.max_title_words);
  if (wants_doc(config)) {
    m.docs = import_table(p.doc_vectors, TableKind::kDocument);
    m.doc_words = import_table(p.docword_vectors, TableKind::kWordFromDocModel);
  }
  if (wants_word(config)) m.words = import_table(p.word_vectors, TableKind::kWordFromWordModel);
  return m;
}

std::vector<TopicCandidates> generate_all(const PipelineConfig& config,
                                          const std::vector<Topic>& topics,
                                          const LoadedModels& m) {
  std::optional<CandidateSource> doc_source, word_source;
  if (m.docs) doc_source = CandidateSource{&*m.docs, &*m.doc_words, m.doc_lexicon.titles()};
  if (m.words) word_source = CandidateSource{&*m.words, &*m.words, m.word_lexicon.titles()};
  std::vector<TopicCandidates> out;
  for (const auto& topic : topics) {
    out.push_back({topic.id, generate_candidates(topic, doc_source, word_source,
                                                 config.generation)});
  }
  return out;
}

std::vector<TopicFeatures> features_all(const std::vector<Topic>& topics,
                                        const std::vector<TopicCandidates>& candidates,
                                        const TitleLexicon& doc_lexicon,
                                        const TitleLexicon& word_lexicon,
                                        const std::map<ArticleId, double>& scores) {
  std::map<std::string, const Topic*> by_id;
  for (const auto& t : topics) by_id.emplace(t.id, &t);
  const TitleLexicon* lexicons[] = {&word_lexicon, &doc_lexicon};
  const auto pagerank_of = [&](std::string_view label) {
    return title_pagerank(label, lexicons, scores);
  };
  std::vector<TopicFeatures> out;
  for (const auto& tc : candidates) {
    auto it = by_id.find(tc.topic_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "candidates reference unknown topic '" + tc.topic_id + "'");
    }
    if (tc.candidates.empty()) continue;
    std::vector<std::string> labels;
    for (const auto& c : tc.candidates) labels.push_back(c.label);
    out.push_back({tc.topic_id, compute_features(*it->second, labels, pagerank_of)});
  }
  return out;
}

void log_generation(const PipelineConfig& config, StageLog& log) {
  log.param("topic_terms", std::to_string(config.topic_terms));
  log.param("k_per_source", std::to_string(config.generation.k_per_source));
  log.param("out_k", std::to_string(config.generation.out_k));
  log.param("workers", std::to_string(config.generation.workers));
}

void run_generate(const PipelineConfig& config, StageLog& log) {
  log_generation(config, log);
  const auto topics = load_topics(config);
  const auto models = load_models(config);
  const auto candidates = generate_all(config, topics, models);
  write_file_atomic(config.paths.candidates,
                    [&](std::ostream& out) { write_candidates(out, candidates); });
  log.output(config.paths.candidates);
}

void run_features(const PipelineConfig& config, StageLog& log) {
  const auto& p = config.paths;
  const auto topics = load_topics(config);
  const auto candidates =
      read_file(p.candidates, [](std::istream& in) { return read_candidates(in); });
  const auto doc_lexicon =
      load_lexicon(p.lexicon_doc, TitleVariant::kDocEmbedding, config.max_title_words);
  const auto word_lexicon =
      load_lexicon(p.lexicon_word, TitleVariant::kWordEmbedding, config.max_title_words);
  const auto scores = read_file(p.pagerank, [](std::istream& in) { return read_pagerank(in); });
  const auto features = features_all(topics, candidates, doc_lexicon, word_lexicon, scores);
  write_file_atomic(p.features, [&](std::ostream& out) { write_features(out, features); });
  log.output(p.features);
}

void log_svr(const SvrConfig& svr, StageLog& log) {
  log.param("svr_c", format_exact(svr.c));
  log.param("svr_epsilon", format_exact(svr.epsilon));
  log.param("svr_epochs", std::to_string(svr.epochs));
  log.param("svr_seed", std::to_string(svr.seed));
}

std::map<std::string, std::string> topic_domains(const PipelineConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& t : load_topics(config)) out.emplace(t.id, t.domain);
  return out;
}

Dataset load_dataset(const PipelineConfig& config) {
  const auto features =
      read_file(config.paths.features, [](std::istream& in) { return read_features(in); });
  const auto ratings = read_file(config.paths.gold, [](std::istream& in) { return read_gold(in); });
  return build_dataset(features, GoldStandard(ratings), topic_domains(config));
}

void run_train_ranker(const PipelineConfig& config, StageLog& log) {
  log_svr(config.svr, log);
  const Dataset dataset = load_dataset(config);
  const auto model = fit(training_pairs(dataset), config.svr);
  write_file_atomic(config.paths.model, [&](std::ostream& out) { write_model(out, model); });
  log.output(config.paths.model);
}

void run_label(const PipelineConfig& config, StageLog& log) {
  const auto& p = config.paths;
  log.param("from_features", config.from_features ? "true" : "false");
  log.param("unsupervised", config.unsupervised ? "true" : "false");
  std::vector<TopicFeatures> features;
  if (config.from_features) {
    features = read_file(p.features, [](std::istream& in) { return read_features(in); });
  } else {
    log_generation(config, log);
    const auto topics = load_topics(config);
    const auto models = load_models(config);
    const auto candidates = generate_all(config, topics, models);
    const auto scores = read_file(p.pagerank, [](std::istream& in) { return read_pagerank(in); });
    features = features_all(topics, candidates, models.doc_lexicon, models.word_lexicon, scores);
  }
  std::optional<RegressionModel> model;
  if (!config.unsupervised) {
    model = read_file(p.model, [](std::istream& in) { return read_model(in); });
  }
  write_file_atomic(p.labels, [&](std::ostream& out) {
    out << "topic_id\trank\tlabel\tscore\n";
    for (const auto& topic : features) {
      std::vector<RerankedLabel> ranked;
      if (model) {
        ranked = rerank(*model, topic.candidates);
      } else {
        for (const auto& c : topic.candidates) {
          ranked.push_back({c.label, -static_cast<double>(c.features.letter_trigram_rank),
                            c.features});
        }
        sort_reranked(ranked);
      }
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        out << topic.topic_id << '\t' << i + 1 << '\t' << ranked[i].label << '\t'
            << (model ? format_fixed(ranked[i].score) : std::string("NA")) << '\n';
      }
    }
  });
  log.output(p.labels);
}

CvConfig cv_config(const PipelineConfig& config) {
  CvConfig cv = config.cv;
  cv.svr = config.svr;
  return cv;
}

void log_cv(const CvConfig& cv, StageLog& log) {
  log.param("folds", std::to_string(cv.folds));
  log.param("runs", std::to_string(cv.runs));
  log.param("cv_seed", std::to_string(cv.seed));
  log.param("dcg", cv.variant == DcgVariant::kLinear ? "linear" : "exponential");
  log_svr(cv.svr, log);
}

void run_evaluate(const PipelineConfig& config, StageLog& log, std::ostream& console) {
  const CvConfig cv = cv_config(config);
  log_cv(cv, log);
  const Dataset dataset = load_dataset(config);
  const auto report = evaluate(dataset, cv);
  const auto quality = candidate_quality_stats(dataset);
  write_file_atomic(config.paths.report, [&](std::ostream& out) { write_report_tsv(out, report); });
  write_file_atomic(config.paths.quality,
                    [&](std::ostream& out) { write_quality_tsv(out, quality); });
  write_report_table(console, report);
  log.output(config.paths.report);
  log.output(config.paths.quality);
}

void run_ablate(const PipelineConfig& config, StageLog& log, std::ostream& console) {
  const CvConfig cv = cv_config(config);
  log_cv(cv, log);
  const auto report = ablation(load_dataset(config), cv);
  write_file_atomic(config.paths.ablation,
                    [&](std::ostream& out) { write_report_tsv(out, report); });
  write_report_table(console, report);
  log.output(config.paths.ablation);
}

}  // namespace

std::optional<Stage> parse_stage(std::string_view name) {
  for (const auto& [stage, text] : kStageNames) {
    if (text == name) return stage;
  }
  return std::nullopt;
}

std::string_view to_string(Stage stage) {
  for (const auto& [s, text] : kStageNames) {
    if (s == stage) return text;
  }
  return "unknown";
}

std::vector<fs::path> stage_inputs(Stage stage, const PipelineConfig& config) {
  const auto& p = config.paths;
  std::vector<fs::path> models;
  models.push_back(p.lexicon_doc);
  models.push_back(p.lexicon_word);
  if (wants_doc(config)) {
    models.push_back(p.doc_vectors);
    models.push_back(p.docword_vectors);
  }
  if (wants_word(config)) models.push_back(p.word_vectors);
  switch (stage) {
    case Stage::kPreprocess: return {p.corpus};
    case Stage::kTrainEmbeddings: {
      std::vector<fs::path> in;
      if (wants_doc(config)) {
        in.push_back(p.articles);
        in.push_back(p.lexicon_doc);
      }
      if (wants_word(config)) in.push_back(p.collapsed);
      return in;
    }
    case Stage::kPageRank: return {p.articles};
    case Stage::kGenerate:
      models.push_back(p.topics);
      return models;
    case Stage::kFeatures:
      return {p.topics, p.candidates, p.lexicon_doc, p.lexicon_word, p.pagerank};
    case Stage::kTrainRanker:
    case Stage::kEvaluate:
    case Stage::kAblate: return {p.features, p.gold, p.topics};
    case Stage::kLabel: {
      std::vector<fs::path> in;
      if (config.from_features) {
        in.push_back(p.features);
      } else {
        in = models;
        in.push_back(p.topics);
        in.push_back(p.pagerank);
      }
      if (!config.unsupervised) in.push_back(p.model);
      return in;
    }
  }
  return {};
}

void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log) {
  const auto inputs = stage_inputs(stage, config);
  for (const auto& path : inputs) {
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::kMissingInput, path.string());
  }
  StageLog stage_log(log, stage);
  for (const auto& path : inputs) stage_log.input(path);
  switch (stage) {
    case Stage::kPreprocess: run_preprocess(config, stage_log); break;
    case Stage::kTrainEmbeddings: run_train_embeddings(config, stage_log); break;
    case Stage::kPageRank: run_pagerank(config, stage_log); break;
    case Stage::kGenerate: run_generate(config, stage_log); break;
    case Stage::kFeatures: run_features(config, stage_log); break;
    case Stage::kTrainRanker: run_train_ranker(config, stage_log); break;
    case Stage::kLabel: run_label(config, stage_log); break;
    case Stage::kEvaluate: run_evaluate(config, stage_log, log); break;
    case Stage::kAblate: run_ablate(config, stage_log, log); break;
  }
}

}  // namespace netl
