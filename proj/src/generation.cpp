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

#include "netl/generation.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "netl/corpus.hpp"
#include "netl/tabular.hpp"

namespace netl {

Topic Topic::truncated(std::size_t n) const {
  Topic out = *this;
  if (out.terms.size() > n) out.terms.resize(n);
  if (out.term_probs.size() > n) out.term_probs.resize(n);
  return out;
}

void Topic::validate() const {
  if (terms.empty()) {
    throw Error(ErrorCode::kMalformedRecord, "topic '" + id + "' has no terms");
  }
  for (const auto& term : terms) {
    if (term != to_lower_ascii(term)) {
      throw Error(ErrorCode::kMalformedRecord,
                  "topic '" + id + "' term '" + term + "' is not lowercase");
    }
  }
  if (!term_probs.empty()) {
    if (term_probs.size() != terms.size()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "topic '" + id + "' has " + std::to_string(terms.size()) +
                      " terms but " + std::to_string(term_probs.size()) +
                      " probabilities");
    }
    for (double p : term_probs) {
      if (!(p > 0.0)) {
        throw Error(ErrorCode::kMalformedRecord,
                    "topic '" + id + "' has a non-positive term probability");
      }
    }
  }
}

TopicScorer::TopicScorer(const Topic& topic, const EmbeddingTable& term_table,
                         Aggregation aggregation)
    : aggregation_(aggregation) {
  if (aggregation == Aggregation::kWeighted && !topic.has_probs()) {
    throw Error(ErrorCode::kMissingTermProbs, "topic '" + topic.id + "'");
  }
  std::vector<Eigen::Index> rows;
  std::vector<double> weights;
  for (std::size_t i = 0; i < topic.terms.size(); ++i) {
    if (auto row = term_table.find(topic.terms[i])) {
      rows.push_back(*row);
      weights.push_back(aggregation == Aggregation::kWeighted ? topic.term_probs[i]
                                                              : 1.0);
    }
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kAllTermsMissing,
                "no term of topic '" + topic.id + "' is in the " +
                    std::string(to_string(term_table.kind())) + " vocabulary");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  unit_terms_.resize(n, term_table.dim());
  weights_.resize(n);
  const double max_weight = *std::max_element(weights.begin(), weights.end());
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(term_table.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd v =
        term_table.row(rows[static_cast<std::size_t>(i)]).cast<double>();
    const double norm = v.norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::kDegenerateVector,
                  "topic term vector has zero norm in topic '" + topic.id + "'");
    }
    unit_terms_.row(i) = v / norm;
    weights_(i) = weights[static_cast<std::size_t>(i)] / max_weight;
    sum += v;
  }
  centroid_ = sum / static_cast<double>(n);
  if (aggregation == Aggregation::kCentroid && !(centroid_.norm() > 0.0)) {
    throw Error(ErrorCode::kDegenerateVector,
                "topic-term centroid has zero norm in topic '" + topic.id + "'");
  }
}

double TopicScorer::score_impl(const Eigen::RowVectorXd& title) const {
  const double norm = title.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kDegenerateVector, "title vector has zero norm");
  }
  if (aggregation_ == Aggregation::kCentroid) return cosine(title, centroid_);
  double weighted = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < unit_terms_.rows(); ++i) {
    weighted += weights_(i) * (unit_terms_.row(i).dot(title) / norm);
    total += weights_(i);
  }
  return weighted / total;
}

namespace {

Eigen::Index title_row(std::string_view title, const EmbeddingTable& table) {
  auto row = table.find(title_token(title));
  if (!row) {
    throw Error(ErrorCode::kUnknownTitle,
                "'" + std::string(title) + "' is not in the " +
                    std::string(to_string(table.kind())) + " table");
  }
  return *row;
}

double relevance(std::string_view title, const Topic& topic,
                 const EmbeddingTable& title_table,
                 const EmbeddingTable& term_table, Aggregation aggregation) {
  const Eigen::Index row = title_row(title, title_table);
  return TopicScorer(topic, term_table, aggregation).score(title_table.row(row));
}

struct Scored {
  std::string label;
  double score;
};

bool better(const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.label < b.label;
}

// Scores every label of a source against the topic. Work is split into
// contiguous slices; each slot is written by exactly one worker so the
// result does not depend on the worker count.
std::vector<Scored> score_source(const Topic& topic, const CandidateSource& source,
                                 int workers) {
  const TopicScorer scorer(topic, *source.terms);
  std::vector<std::pair<std::string, Eigen::Index>> present;
  for (const auto& label : source.labels) {
    if (auto row = source.titles->find(title_token(label))) {
      present.emplace_back(label, *row);
    }
  }
  std::vector<Scored> scored(present.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scored[i] = {present[i].first,
                   scorer.score(source.titles->row(present[i].second))};
    }
  };
  const std::size_t n = present.size();
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2 * w) {
    run(0, n);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < w; ++t) {
      threads.emplace_back(run, n * t / w, n * (t + 1) / w);
    }
  }
  return scored;
}

std::vector<Scored> top_k(std::vector<Scored> scored, std::size_t k) {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                    scored.end(), better);
  scored.resize(k);
  return scored;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string("NA");
}

}  // namespace

double rel_d2v(std::string_view title, const Topic& topic,
               const EmbeddingTable& doc_table, const EmbeddingTable& word_table) {
  return relevance(title, topic, doc_table, word_table, Aggregation::kMean);
}

double rel_w2v(std::string_view title, const Topic& topic,
               const EmbeddingTable& word_table) {
  return relevance(title, topic, word_table, word_table, Aggregation::kMean);
}

double rel_weighted(std::string_view title, const Topic& topic,
                    const EmbeddingTable& title_table,
                    const EmbeddingTable& term_table) {
  return relevance(title, topic, title_table, term_table, Aggregation::kWeighted);
}

double rel_centroid(std::string_view title, const Topic& topic,
                    const EmbeddingTable& title_table,
                    const EmbeddingTable& term_table) {
  return relevance(title, topic, title_table, term_table, Aggregation::kCentroid);
}

std::vector<CandidateLabel> generate_candidates(
    const Topic& topic, const std::optional<CandidateSource>& doc_model,
    const std::optional<CandidateSource>& word_model,
    const GenerationConfig& config) {
  if (config.k_per_source < 1) {
    throw Error(ErrorCode::kInvalidConfig, "k_per_source must be >= 1");
  }
  std::map<std::string, double> doc_scores;
  std::map<std::string, double> word_scores;
  std::set<std::string> pool;
  if (doc_model) {
    auto scored = score_source(topic, *doc_model, config.workers);
    for (const auto& s : scored) doc_scores.emplace(s.label, s.score);
    for (auto& s : top_k(std::move(scored), config.k_per_source)) pool.insert(s.label);
  }
  if (word_model) {
    auto scored = score_source(topic, *word_model, config.workers);
    for (const auto& s : scored) word_scores.emplace(s.label, s.score);
    for (auto& s : top_k(std::move(scored), config.k_per_source)) pool.insert(s.label);
  }

  std::vector<CandidateLabel> candidates;
  candidates.reserve(pool.size());
  for (const auto& label : pool) {
    CandidateLabel c;
    c.label = label;
    if (auto it = doc_scores.find(label); it != doc_scores.end()) c.rel_d2v = it->second;
    if (auto it = word_scores.find(label); it != word_scores.end()) c.rel_w2v = it->second;
    c.rel_combined = c.rel_d2v.value_or(0.0) + c.rel_w2v.value_or(0.0);
    candidates.push_back(std::move(c));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateLabel& a, const CandidateLabel& b) {
              if (a.rel_combined != b.rel_combined) return a.rel_combined > b.rel_combined;
              return a.label < b.label;
            });
  if (candidates.size() > config.out_k) candidates.resize(config.out_k);
  return candidates;
}

std::vector<Topic> read_topics(std::istream& in) {
  std::vector<Topic> topics;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with('#')) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw Error(ErrorCode::kMalformedRecord,
                  "topics line " + std::to_string(line_no) +
                      ": expected id, domain, terms[, probs]");
    }
    Topic topic;
    topic.id = fields[0];
    topic.domain = fields[1];
    topic.terms = split_whitespace(fields[2]);
    if (fields.size() == 4) {
      for (const auto& p : split_whitespace(fields[3])) {
        topic.term_probs.push_back(
            parse_double(p, "topics line " + std::to_string(line_no)));
      }
    }
    topic.validate();
    topics.push_back(std::move(topic));
  }
  return topics;
}

void write_topics(std::ostream& out, const std::vector<Topic>& topics) {
  for (const auto& topic : topics) {
    out << topic.id << '\t' << topic.domain << '\t';
    for (std::size_t i = 0; i < topic.terms.size(); ++i) {
      out << (i ? " " : "") << topic.terms[i];
    }
    if (topic.has_probs()) {
      out << '\t';
      for (std::size_t i = 0; i < topic.term_probs.size(); ++i) {
        out << (i ? " " : "") << format_exact(topic.term_probs[i]);
      }
    }
    out << '\n';
  }
}

void write_candidates(std::ostream& out,
                      const std::vector<TopicCandidates>& candidates) {
  out << "topic_id\trank\tlabel\trel_d2v\trel_w2v\trel_combined\n";
  for (const auto& topic : candidates) {
    for (std::size_t i = 0; i < topic.candidates.size(); ++i) {
      const auto& c = topic.candidates[i];
      out << topic.topic_id << '\t' << i + 1 << '\t' << c.label << '\t'
          << format_optional(c.rel_d2v) << '\t' << format_optional(c.rel_w2v)
          << '\t' << format_fixed(c.rel_combined) << '\n';
    }
  }
}

std::vector<TopicCandidates> read_candidates(std::istream& in) {
  std::vector<TopicCandidates> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("topic_id\t")) continue;
    const auto f = split_tabs(line);
    const std::string where = "candidates line " + std::to_string(line_no);
    if (f.size() != 6) throw Error(ErrorCode::kMalformedRecord, where);
    CandidateLabel c;
    c.label = f[2];
    if (f[3] != "NA") c.rel_d2v = parse_double(f[3], where);
    if (f[4] != "NA") c.rel_w2v = parse_double(f[4], where);
    c.rel_combined = parse_double(f[5], where);
    if (out.empty() || out.back().topic_id != f[0]) out.push_back({f[0], {}});
    out.back().candidates.push_back(std::move(c));
  }
  return out;
}

}  // namespace netl
