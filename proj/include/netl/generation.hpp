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

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netl/embeddings.hpp"

namespace netl {

struct Topic {
  std::string id;
  std::string domain;
  std::vector<std::string> terms;  // top-N, most probable first
  std::vector<double> term_probs;  // empty, or parallel to terms

  bool has_probs() const { return !term_probs.empty(); }
  // First `n` terms (and probabilities).
  Topic truncated(std::size_t n) const;
  // Throws kMalformedRecord.
  void validate() const;
};

enum class Aggregation {
  kMean,      // arithmetic mean of per-term cosines
  kWeighted,  // term-probability weighted mean of cosines
  kCentroid,  // cosine against the mean topic-term vector
};

// Precomputes the topic side of the relevance score against one word table
// so that many titles can be scored cheaply. Terms missing from the table are
// skipped; if none remain the constructor throws kAllTermsMissing.
class TopicScorer {
 public:
  TopicScorer(const Topic& topic, const EmbeddingTable& term_table,
              Aggregation aggregation = Aggregation::kMean);

  template <typename Derived>
  double score(const Eigen::MatrixBase<Derived>& title_vector) const {
    const Eigen::RowVectorXd t = title_vector.template cast<double>();
    return score_impl(t);
  }

  std::size_t terms_used() const {
    return static_cast<std::size_t>(unit_terms_.rows());
  }

 private:
  double score_impl(const Eigen::RowVectorXd& title) const;

  Aggregation aggregation_;
  Eigen::MatrixXd unit_terms_;  // one unit-norm row per present term
  Eigen::VectorXd weights_;     // scaled so the largest weight is exactly 1
  Eigen::RowVectorXd centroid_;
};

// Mean cosine between the dbow document vector of `title` and the dbow word
// vectors of the topic terms. `title` is the normalized (space separated)
// label. Throws kUnknownTitle / kAllTermsMissing.
double rel_d2v(std::string_view title, const Topic& topic,
               const EmbeddingTable& doc_table, const EmbeddingTable& word_table);

// Mean cosine between the skip-gram vector of the collapsed title token and
// the skip-gram vectors of the topic terms.
double rel_w2v(std::string_view title, const Topic& topic,
               const EmbeddingTable& word_table);

// Probability-weighted variant. Throws kMissingTermProbs.
double rel_weighted(std::string_view title, const Topic& topic,
                    const EmbeddingTable& title_table,
                    const EmbeddingTable& term_table);

// Cosine between the title vector and the centroid of the topic-term vectors.
// Throws kDegenerateVector when the centroid vanishes.
double rel_centroid(std::string_view title, const Topic& topic,
                    const EmbeddingTable& title_table,
                    const EmbeddingTable& term_table);

struct CandidateLabel {
  std::string label;  // normalized title
  std::optional<double> rel_d2v;
  std::optional<double> rel_w2v;
  double rel_combined = 0.0;

  bool from_doc_model() const { return rel_d2v.has_value(); }
  bool from_word_model() const { return rel_w2v.has_value(); }
};

// One embedding model's view of the candidate space: the table holding title
// vectors, the table holding topic-term vectors, and the lexicon titles that
// may be proposed.
struct CandidateSource {
  const EmbeddingTable* titles = nullptr;
  const EmbeddingTable* terms = nullptr;
  std::vector<std::string> labels;
};

struct GenerationConfig {
  std::size_t k_per_source = 100;
  std::size_t out_k = 19;
  int workers = 1;
};

// Top `k_per_source` titles from each source, re-scored over the union with
// both relevances where the title exists in a source, summed, and cut to the
// best `out_k` (descending, ties by label).
std::vector<CandidateLabel> generate_candidates(
    const Topic& topic, const std::optional<CandidateSource>& doc_model,
    const std::optional<CandidateSource>& word_model,
    const GenerationConfig& config = {});

// Tab separated: id, domain, space separated terms, optional space separated
// probabilities. Lines starting with '#' are comments.
std::vector<Topic> read_topics(std::istream& in);
void write_topics(std::ostream& out, const std::vector<Topic>& topics);

struct TopicCandidates {
  std::string topic_id;
  std::vector<CandidateLabel> candidates;
};

// Header line then: topic_id, rank, label, rel_d2v, rel_w2v, rel_combined
// ("NA" for an absent relevance).
void write_candidates(std::ostream& out,
                      const std::vector<TopicCandidates>& candidates);
std::vector<TopicCandidates> read_candidates(std::istream& in);

}  // namespace netl
