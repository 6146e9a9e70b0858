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

#include "netl/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "netl/tabular.hpp"

namespace netl {
namespace {

// Byte offsets at which UTF-8 codepoints start, plus the end offset.
std::vector<std::size_t> codepoint_starts(std::string_view s) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  starts.push_back(s.size());
  return starts;
}

double norm(const TrigramDistribution& d) {
  double sum = 0.0;
  for (const auto& [trigram, p] : d.probs) sum += p * p;
  return std::sqrt(sum);
}

}  // namespace

TrigramDistribution trigram_distribution(std::span<const std::string> strings) {
  std::map<std::string, double> counts;
  double total = 0.0;
  for (const auto& s : strings) {
    const auto starts = codepoint_starts(s);
    const std::size_t codepoints = starts.size() - 1;
    for (std::size_t i = 0; i + 3 <= codepoints; ++i) {
      counts[s.substr(starts[i], starts[i + 3] - starts[i])] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) {
    throw Error(ErrorCode::kNoTrigrams, "every string is shorter than 3 characters");
  }
  TrigramDistribution d;
  for (auto& [trigram, count] : counts) d.probs.emplace(trigram, count / total);
  return d;
}

double trigram_cosine(const TrigramDistribution& a, const TrigramDistribution& b) {
  const auto& small = a.probs.size() <= b.probs.size() ? a.probs : b.probs;
  const auto& large = a.probs.size() <= b.probs.size() ? b.probs : a.probs;
  double dot = 0.0;
  for (const auto& [trigram, p] : small) {
    if (auto it = large.find(trigram); it != large.end()) dot += p * it->second;
  }
  return dot / (norm(a) * norm(b));
}

std::vector<std::string> label_words(std::string_view label) {
  return split_whitespace(token_title(label));
}

double letter_trigram_similarity(std::string_view label, const Topic& topic) {
  return trigram_cosine(trigram_distribution(label_words(label)),
                        trigram_distribution(topic.terms));
}

std::vector<RankedLabel> unsupervised_rank(std::span<const std::string> labels,
                                           const Topic& topic) {
  const TrigramDistribution topic_dist = trigram_distribution(topic.terms);
  std::vector<RankedLabel> ranked;
  ranked.reserve(labels.size());
  for (const auto& label : labels) {
    double similarity = 0.0;
    try {
      similarity = trigram_cosine(trigram_distribution(label_words(label)), topic_dist);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoTrigrams) throw;
    }
    ranked.push_back({label, similarity, 0});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedLabel& a, const RankedLabel& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.label < b.label;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i + 1);
  return ranked;
}

LinkGraph::LinkGraph(std::vector<ArticleId> nodes,
                     std::vector<std::pair<ArticleId, ArticleId>> edges)
    : nodes_(std::move(nodes)) {
  std::unordered_map<ArticleId, std::size_t> index;
  index.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index.emplace(nodes_[i], i).second) {
      throw Error(ErrorCode::kMalformedRecord,
                  "duplicate graph node " + std::to_string(nodes_[i]));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> resolved;
  resolved.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto f = index.find(from);
    auto t = index.find(to);
    if (f == index.end() || t == index.end()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "edge " + std::to_string(from) + "->" + std::to_string(to) +
                      " has an endpoint outside the graph");
    }
    resolved.emplace_back(f->second, t->second);
  }
  std::sort(resolved.begin(), resolved.end());
  resolved.erase(std::unique(resolved.begin(), resolved.end()), resolved.end());
  offsets_.assign(nodes_.size() + 1, 0);
  for (const auto& [from, to] : resolved) ++offsets_[from + 1];
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] += offsets_[i];
  targets_.reserve(resolved.size());
  for (const auto& [from, to] : resolved) targets_.push_back(to);
}

LinkGraph LinkGraph::from_articles(std::span<const Article> articles) {
  std::vector<ArticleId> nodes;
  std::set<ArticleId> known;
  for (const auto& a : articles) {
    if (known.insert(a.id).second) nodes.push_back(a.id);
  }
  std::vector<std::pair<ArticleId, ArticleId>> edges;
  for (const auto& a : articles) {
    for (ArticleId target : a.outlinks) {
      if (known.contains(target)) edges.emplace_back(a.id, target);
    }
  }
  return LinkGraph(std::move(nodes), std::move(edges));
}

PageRankResult pagerank(const LinkGraph& graph, const PageRankConfig& config) {
  const std::size_t n = graph.size();
  if (n == 0) throw Error(ErrorCode::kEmptyGraph, "pagerank of an empty graph");
  if (!(config.damping >= 0.0 && config.damping < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "damping must lie in [0, 1)");
  }
  const double d = config.damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd rank = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), inv_n);
  Eigen::VectorXd next(static_cast<Eigen::Index>(n));

  PageRankResult result;
  for (int it = 1; it <= config.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (graph.out(i).empty()) dangling += rank(static_cast<Eigen::Index>(i));
    }
    next.setConstant((1.0 - d) * inv_n + d * dangling * inv_n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto targets = graph.out(i);
      if (targets.empty()) continue;
      const double share =
          d * rank(static_cast<Eigen::Index>(i)) / static_cast<double>(targets.size());
      for (std::size_t t : targets) next(static_cast<Eigen::Index>(t)) += share;
    }
    result.residual = (next - rank).lpNorm<1>();
    rank.swap(next);
    result.iterations = it;
    if (result.residual < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  rank /= rank.sum();
  for (std::size_t i = 0; i < n; ++i) {
    result.scores.emplace(graph.nodes()[i], rank(static_cast<Eigen::Index>(i)));
  }
  return result;
}

double title_pagerank(std::string_view label,
                      std::span<const TitleLexicon* const> lexicons,
                      const std::map<ArticleId, double>& scores) {
  bool found = false;
  double best = 0.0;
  for (const TitleLexicon* lexicon : lexicons) {
    for (ArticleId id : lexicon->ids(label)) {
      auto it = scores.find(id);
      if (it == scores.end()) continue;
      best = found ? std::max(best, it->second) : it->second;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kUnknownLabel,
                "no PageRank score for label '" + std::string(label) + "'");
  }
  return best;
}

double title_pagerank(std::string_view label, const TitleLexicon& lexicon,
                      const std::map<ArticleId, double>& scores) {
  const TitleLexicon* one[] = {&lexicon};
  return title_pagerank(label, one, scores);
}

int topic_overlap(std::string_view label, const Topic& topic) {
  std::set<std::string> terms;
  for (const auto& t : topic.terms) terms.insert(to_lower_ascii(t));
  std::set<std::string> shared;
  for (const auto& w : label_words(to_lower_ascii(label))) {
    if (terms.contains(w)) shared.insert(w);
  }
  return static_cast<int>(shared.size());
}

int num_words(std::string_view label) {
  const auto words = label_words(label);
  if (words.empty()) throw Error(ErrorCode::kEmptyLabel, "label has no words");
  return static_cast<int>(words.size());
}

std::string_view to_string(Feature feature) {
  switch (feature) {
    case Feature::kLetterTrigram: return "LetterTrigram";
    case Feature::kPageRank: return "PageRank";
    case Feature::kTopicOverlap: return "TopicOverlap";
    case Feature::kNumWords: return "NumWords";
  }
  return "unknown";
}

std::vector<LabelFeatures> compute_features(
    const Topic& topic, std::span<const std::string> labels,
    const std::function<double(std::string_view)>& pagerank_of) {
  std::vector<LabelFeatures> out;
  for (const auto& ranked : unsupervised_rank(labels, topic)) {
    FeatureVector fv;
    fv.letter_trigram_rank = ranked.rank;
    fv.pagerank = pagerank_of(ranked.label);
    fv.topic_overlap = topic_overlap(ranked.label, topic);
    fv.num_words = num_words(ranked.label);
    out.push_back({ranked.label, fv});
  }
  return out;
}

void write_features(std::ostream& out, const std::vector<TopicFeatures>& features) {
  out << "topic_id\tlabel\tletter_trigram_rank\tpagerank\ttopic_overlap\tnum_words\n";
  for (const auto& topic : features) {
    for (const auto& c : topic.candidates) {
      out << topic.topic_id << '\t' << c.label << '\t'
          << c.features.letter_trigram_rank << '\t'
          << format_exact(c.features.pagerank) << '\t' << c.features.topic_overlap
          << '\t' << c.features.num_words << '\n';
    }
  }
}

std::vector<TopicFeatures> read_features(std::istream& in) {
  std::vector<TopicFeatures> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("topic_id\t")) continue;
    const auto f = split_tabs(line);
    const std::string where = "features line " + std::to_string(line_no);
    if (f.size() != 6) throw Error(ErrorCode::kMalformedRecord, where);
    FeatureVector fv;
    fv.letter_trigram_rank = static_cast<int>(parse_int(f[2], where));
    fv.pagerank = parse_double(f[3], where);
    fv.topic_overlap = static_cast<int>(parse_int(f[4], where));
    fv.num_words = static_cast<int>(parse_int(f[5], where));
    if (out.empty() || out.back().topic_id != f[0]) out.push_back({f[0], {}});
    out.back().candidates.push_back({f[1], fv});
  }
  return out;
}

void write_pagerank(std::ostream& out, const std::map<ArticleId, double>& scores) {
  for (const auto& [id, score] : scores) out << id << '\t' << format_exact(score) << '\n';
}

std::map<ArticleId, double> read_pagerank(std::istream& in) {
  std::map<ArticleId, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    const std::string where = "pagerank line " + std::to_string(line_no);
    if (f.size() != 2) throw Error(ErrorCode::kMalformedRecord, where);
    scores[parse_int(f[0], where)] = parse_double(f[1], where);
  }
  return scores;
}

}  // namespace netl
