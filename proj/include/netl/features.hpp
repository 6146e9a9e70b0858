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
#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netl/corpus.hpp"
#include "netl/generation.hpp"

namespace netl {

// Maximum-likelihood multinomial over letter trigrams.
struct TrigramDistribution {
  std::map<std::string, double> probs;
};

// Letter trigrams are the contiguous 3-codepoint substrings of each string
// taken separately; no boundary padding and nothing spans two strings.
// Throws kNoTrigrams when every string is shorter than 3 codepoints.
TrigramDistribution trigram_distribution(std::span<const std::string> strings);

double trigram_cosine(const TrigramDistribution& a, const TrigramDistribution& b);

// Words of a label: whitespace and underscores both separate words.
std::vector<std::string> label_words(std::string_view label);

// Cosine between the label's and the topic terms' trigram distributions.
// Multiword labels contribute the trigrams of each word. Throws kNoTrigrams.
double letter_trigram_similarity(std::string_view label, const Topic& topic);

struct RankedLabel {
  std::string label;
  double similarity = 0.0;
  int rank = 0;  // 1-based
};

// Unsupervised baseline: candidates by trigram similarity, descending, ties
// by label. A label without any trigram scores 0.
std::vector<RankedLabel> unsupervised_rank(std::span<const std::string> labels,
                                           const Topic& topic);

// Directed hyperlink graph over article ids.
class LinkGraph {
 public:
  // Duplicate edges collapse; an endpoint that is not a node throws
  // kMalformedRecord.
  LinkGraph(std::vector<ArticleId> nodes,
            std::vector<std::pair<ArticleId, ArticleId>> edges);

  // One node per article; links to articles outside the set are dropped.
  static LinkGraph from_articles(std::span<const Article> articles);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<ArticleId>& nodes() const { return nodes_; }
  // Out-neighbour node indices of node index `i`.
  std::span<const std::size_t> out(std::size_t i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

 private:
  std::vector<ArticleId> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
};

struct PageRankConfig {
  double damping = 0.85;
  double tolerance = 1e-10;  // on the L1 change between iterates
  int max_iterations = 200;
};

struct PageRankResult {
  std::map<ArticleId, double> scores;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Power iteration with uniform teleport; the mass of dangling nodes is
// spread uniformly. Scores sum to 1. Throws kEmptyGraph.
PageRankResult pagerank(const LinkGraph& graph, const PageRankConfig& config = {});

// Largest score among the articles merged under `label` in any of the
// lexicons. Throws kUnknownLabel.
double title_pagerank(std::string_view label,
                      std::span<const TitleLexicon* const> lexicons,
                      const std::map<ArticleId, double>& scores);
double title_pagerank(std::string_view label, const TitleLexicon& lexicon,
                      const std::map<ArticleId, double>& scores);

// Distinct label words that are also topic terms.
int topic_overlap(std::string_view label, const Topic& topic);

// Throws kEmptyLabel.
int num_words(std::string_view label);

enum class Feature : int { kLetterTrigram = 0, kPageRank, kTopicOverlap, kNumWords };
inline constexpr std::size_t kNumFeatures = 4;
inline constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::kLetterTrigram, Feature::kPageRank, Feature::kTopicOverlap,
    Feature::kNumWords};
std::string_view to_string(Feature feature);

struct FeatureVector {
  int letter_trigram_rank = 1;
  double pagerank = 0.0;
  int topic_overlap = 0;
  int num_words = 1;

  Eigen::Vector4d values() const {
    return {static_cast<double>(letter_trigram_rank), pagerank,
            static_cast<double>(topic_overlap), static_cast<double>(num_words)};
  }
  bool operator==(const FeatureVector&) const = default;
};

struct LabelFeatures {
  std::string label;
  FeatureVector features;
};

// Features for every candidate label of one topic, in trigram-rank order.
std::vector<LabelFeatures> compute_features(
    const Topic& topic, std::span<const std::string> labels,
    const std::function<double(std::string_view)>& pagerank_of);

struct TopicFeatures {
  std::string topic_id;
  std::vector<LabelFeatures> candidates;
};

// Header then: topic_id, label, letter_trigram_rank, pagerank, topic_overlap,
// num_words.
void write_features(std::ostream& out, const std::vector<TopicFeatures>& features);
std::vector<TopicFeatures> read_features(std::istream& in);

// Two columns: article id, score.
void write_pagerank(std::ostream& out, const std::map<ArticleId, double>& scores);
std::map<ArticleId, double> read_pagerank(std::istream& in);

}  // namespace netl
