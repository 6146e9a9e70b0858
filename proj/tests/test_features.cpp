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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "netl/error.hpp"
#include "netl/features.hpp"
#include "test_util.hpp"

namespace netl {
namespace {

Topic topic_of(std::vector<std::string> terms) { return Topic{"t", "d", std::move(terms), {}}; }

// Counts trigrams with plain substr over ASCII words.
double brute_trigram_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto counts = [](const std::vector<std::string>& words) {
    std::map<std::string, double> c;
    double total = 0;
    for (const auto& w : words) {
      for (std::size_t i = 0; i + 3 <= w.size(); ++i) {
        c[w.substr(i, 3)] += 1;
        total += 1;
      }
    }
    for (auto& [k, v] : c) v /= total;
    return c;
  };
  const auto ca = counts(a), cb = counts(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : ca) {
    na += v * v;
    if (auto it = cb.find(k); it != cb.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : cb) nb += v * v;
  return dot / std::sqrt(na * nb);
}

TEST_CASE("trigram distributions") {
  const auto cat = trigram_distribution(std::vector<std::string>{"cat"});
  CHECK(cat.probs == std::map<std::string, double>{{"cat", 1.0}});
  const auto abcd = trigram_distribution(std::vector<std::string>{"abcd"});
  CHECK(abcd.probs == std::map<std::string, double>{{"abc", 0.5}, {"bcd", 0.5}});
  const auto split = trigram_distribution(std::vector<std::string>{"cat", "car"});
  const auto joined = trigram_distribution(std::vector<std::string>{"catcar"});
  CHECK(split.probs != joined.probs);
  CHECK_FALSE(split.probs.contains("tca"));
  CHECK_FALSE(split.probs.contains("atc"));
  CHECK(joined.probs.contains("tca"));
  CHECK_THROWS_AS(trigram_distribution(std::vector<std::string>{"ab", "c"}), Error);
  // codepoints, not bytes
  const auto umlaut = trigram_distribution(std::vector<std::string>{"äbc"});
  CHECK(umlaut.probs.size() == 1);
}

TEST_CASE("letter trigram similarity") {
  CHECK(letter_trigram_similarity("cat", topic_of({"cat", "car"})) ==
        doctest::Approx(0.7071068).epsilon(1e-6));
  CHECK(letter_trigram_similarity("virtualization", topic_of({"virtualization"})) ==
        doctest::Approx(1.0));
  CHECK(letter_trigram_similarity("dog", topic_of({"cat"})) == 0.0);
  CHECK(letter_trigram_similarity("operating_system", topic_of({"operating", "system"})) ==
        doctest::Approx(1.0));
}

TEST_CASE("trigram cosine matches a brute-force counter") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> label, terms;
    const std::size_t nl = 1 + rng.below(3), nt = 1 + rng.below(10);
    for (std::size_t i = 0; i < nl; ++i) label.push_back(testing::random_word(rng, 3, 8, "abc"));
    for (std::size_t i = 0; i < nt; ++i) terms.push_back(testing::random_word(rng, 3, 8, "abc"));
    std::string joined;
    for (const auto& w : label) joined += (joined.empty() ? "" : " ") + w;
    const double got = letter_trigram_similarity(joined, topic_of(terms));
    CHECK(std::abs(got - brute_trigram_cosine(label, terms)) <= 1e-9);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0 + 1e-12);
  }
}

TEST_CASE("unsupervised rank") {
  const Topic topic = topic_of({"virtualization", "server", "desktop"});
  const std::vector<std::string> one = {"server"};
  const auto single = unsupervised_rank(one, topic);
  REQUIRE(single.size() == 1);
  CHECK(single[0].rank == 1);

  const std::vector<std::string> labels = {"cooking", "desktop virtualization", "server",
                                           "tv", "servers"};
  const auto ranked = unsupervised_rank(labels, topic);
  REQUIRE(ranked.size() == 5);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].rank == static_cast<int>(i + 1));
    const std::vector<std::string> words = label_words(ranked[i].label);
    const double expected = ranked[i].label == "tv" ? 0.0 : brute_trigram_cosine(words, topic.terms);
    CHECK(ranked[i].similarity == doctest::Approx(expected).epsilon(1e-12));
    if (i > 0) CHECK(ranked[i - 1].similarity >= ranked[i].similarity);
  }
  CHECK(ranked.back().similarity == 0.0);
}

TEST_CASE("unsupervised rank agrees with a second implementation on 19 candidates") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> terms, labels;
    for (int i = 0; i < 10; ++i) terms.push_back(testing::random_word(rng, 3, 7, "abcd"));
    for (int i = 0; i < 19; ++i) labels.push_back(testing::random_word(rng, 3, 7, "abcd") + "_" + std::to_string(i));
    std::vector<std::pair<double, std::string>> want;
    for (const auto& l : labels) want.emplace_back(-brute_trigram_cosine(label_words(l), terms), l);
    std::sort(want.begin(), want.end());
    const auto got = unsupervised_rank(labels, topic_of(terms));
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].label == want[i].second);
  }
}

std::map<ArticleId, double> run_pagerank(std::vector<ArticleId> nodes,
                                         std::vector<std::pair<ArticleId, ArticleId>> edges) {
  return pagerank(LinkGraph(std::move(nodes), std::move(edges))).scores;
}

TEST_CASE("pagerank examples") {
  const auto cycle = run_pagerank({1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}});
  for (const auto& [id, s] : cycle) CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-10));

  const auto two = run_pagerank({1, 2}, {{1, 2}});
  CHECK(two.at(1) == doctest::Approx(0.5 / 1.425).epsilon(1e-9));
  CHECK(two.at(2) == doctest::Approx(0.925 / 1.425).epsilon(1e-9));
  CHECK(two.at(1) == doctest::Approx(0.350877).epsilon(1e-6));

  std::vector<std::pair<ArticleId, ArticleId>> star;
  for (ArticleId leaf = 2; leaf <= 6; ++leaf) star.emplace_back(leaf, 1);
  const auto s = run_pagerank({1, 2, 3, 4, 5, 6}, star);
  for (ArticleId leaf = 2; leaf <= 6; ++leaf) CHECK(s.at(1) > s.at(leaf));

  CHECK_THROWS_AS(pagerank(LinkGraph({}, {})), Error);
  CHECK_THROWS_AS(LinkGraph({1}, {{1, 2}}), Error);
}

TEST_CASE("pagerank matches a dense linear solve") {
  Rng rng(33);
  const double d = 0.85;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    std::vector<ArticleId> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(100 + 3 * i);
    std::vector<std::pair<ArticleId, ArticleId>> edges;
    const double density = rng.uniform() * 0.2;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (rng.uniform() < density) edges.emplace_back(nodes[i], nodes[j]);
      }
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);  // m(j, i): probability i -> j
    std::vector<int> outdeg(n, 0);
    for (const auto& [a, b] : edges) ++outdeg[(a - 100) / 3];
    for (const auto& [a, b] : edges) m((b - 100) / 3, (a - 100) / 3) += 1.0 / outdeg[(a - 100) / 3];
    for (int i = 0; i < n; ++i) {
      if (outdeg[i] == 0) m.col(i).setConstant(1.0 / n);
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - d * m;
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, (1 - d) / n);
    const Eigen::VectorXd expected = a.partialPivLu().solve(rhs);

    const auto result = pagerank(LinkGraph(nodes, edges));
    CHECK(result.converged);
    double total = 0;
    for (int i = 0; i < n; ++i) {
      const double got = result.scores.at(nodes[i]);
      CHECK(std::abs(got - expected(i)) <= 1e-6);
      CHECK(got > 0);
      total += got;
    }
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }
}

TEST_CASE("link graph from articles drops external links") {
  std::vector<Article> articles = {testing::make_article(1, "A", 40, {2, 99}),
                                   testing::make_article(2, "B", 40, {1, 1})};
  const auto g = LinkGraph::from_articles(articles);
  CHECK(g.size() == 2);
  CHECK(g.out(0).size() == 1);
  CHECK(g.out(1).size() == 1);
}

TEST_CASE("title pagerank takes the maximum over merged articles") {
  TitleLexicon word(TitleVariant::kWordEmbedding, 4);
  word.add("democratic party", 1);
  word.add("democratic party", 2);
  word.add("bank", 3);
  TitleLexicon doc(TitleVariant::kDocEmbedding, 4);
  doc.add("democratic party (australia)", 2);
  const std::map<ArticleId, double> scores = {{1, 0.01}, {2, 0.002}, {3, 0.5}};
  CHECK(title_pagerank("democratic party", word, scores) == 0.01);
  CHECK(title_pagerank("bank", word, scores) == 0.5);
  const TitleLexicon* both[] = {&word, &doc};
  CHECK(title_pagerank("democratic party (australia)", both, scores) == 0.002);
  CHECK_THROWS_AS(title_pagerank("nothing", both, scores), Error);
}

TEST_CASE("topic overlap and word counts") {
  const Topic table1 = topic_of({"vmware", "server", "virtual", "oracle", "update",
                                 "virtualization", "application", "infrastructure",
                                 "management", "microsoft"});
  CHECK(topic_overlap("desktop virtualization", table1) == 1);
  CHECK(topic_overlap("cooking", table1) == 0);
  CHECK(topic_overlap("server server", table1) == 1);
  CHECK(topic_overlap("microsoft_server", table1) == 2);
  CHECK(num_words("operating system") == 2);
  CHECK(num_words("virtualization") == 1);
  CHECK(num_words("microsoft_visual_studio") == 3);
  CHECK_THROWS_AS(num_words("  "), Error);
}

TEST_CASE("compute_features and the features table") {
  const Topic topic = topic_of({"server", "virtual"});
  const std::vector<std::string> labels = {"cooking", "server", "virtual server"};
  const auto features = compute_features(topic, labels, [](std::string_view l) {
    return l == "server" ? 0.25 : 0.125;
  });
  REQUIRE(features.size() == 3);
  CHECK(features[0].features.letter_trigram_rank == 1);
  CHECK(features[2].label == "cooking");
  CHECK(features[2].features.topic_overlap == 0);
  for (const auto& f : features) {
    if (f.label == "virtual server") {
      CHECK(f.features.topic_overlap == 2);
      CHECK(f.features.num_words == 2);
      CHECK(f.features.pagerank == 0.125);
    }
  }
  std::ostringstream out;
  write_features(out, {{"t", features}});
  std::istringstream in(out.str());
  const auto back = read_features(in);
  REQUIRE(back.size() == 1);
  REQUIRE(back[0].candidates.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[0].candidates[i].label == features[i].label);
    CHECK(back[0].candidates[i].features == features[i].features);
  }
}

TEST_CASE("pagerank scores table round trips exactly") {
  const std::map<ArticleId, double> scores = {{1, 0.1 / 3}, {7, 2.0 / 3}, {9, 1e-17}};
  std::ostringstream out;
  write_pagerank(out, scores);
  std::istringstream in(out.str());
  CHECK(read_pagerank(in) == scores);
}

}  // namespace
}  // namespace netl
