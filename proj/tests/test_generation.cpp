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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "netl/corpus.hpp"
#include "netl/error.hpp"
#include "netl/generation.hpp"
#include "test_util.hpp"

namespace netl {
namespace {

using testing::make_table;
using testing::naive_cosine;

Topic topic_of(std::vector<std::string> terms, std::vector<double> probs = {}) {
  return Topic{"t", "d", std::move(terms), std::move(probs)};
}

TEST_CASE("rel_d2v and rel_w2v examples") {
  const auto docs = make_table(TableKind::kDocument, {"title"}, {{0.3f, 0.4f}});
  const auto words = make_table(TableKind::kWordFromDocModel, {"x"}, {{0.3f, 0.4f}});
  CHECK(rel_d2v("title", topic_of({"x"}), docs, words) == doctest::Approx(1.0).epsilon(1e-12));

  const auto w2v = make_table(TableKind::kWordFromWordModel, {"new_york", "y"},
                              {{1.0f, 2.0f}, {1.0f, 2.0f}});
  CHECK(rel_w2v("new york", topic_of({"y"}), w2v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(rel_w2v("boston", topic_of({"y"}), w2v), Error);
  CHECK_THROWS_AS(rel_w2v("new york", topic_of({"absent"}), w2v), Error);
}

TEST_CASE("relevance is the mean of term cosines") {
  // unit title (1,0); terms at cosines 0.2 and 0.6
  const float s2 = std::sqrt(1 - 0.04f), s6 = std::sqrt(1 - 0.36f);
  const auto docs = make_table(TableKind::kDocument, {"a"}, {{1, 0}});
  const auto words =
      make_table(TableKind::kWordFromDocModel, {"p", "q", "r"}, {{0.2f, s2}, {0.6f, s6}, {1, 0}});
  CHECK(rel_d2v("a", topic_of({"p", "q"}), docs, words) == doctest::Approx(0.4).epsilon(1e-6));
  // missing terms are skipped
  CHECK(rel_d2v("a", topic_of({"p", "zzz", "q"}), docs, words) ==
        doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("relevance on random tables equals a brute-force mean") {
  Rng rng(12);
  std::vector<std::string> terms;
  for (int i = 0; i < 10; ++i) terms.push_back("term" + std::to_string(i));
  const auto words = testing::random_table(TableKind::kWordFromDocModel, terms, 16, rng);
  const auto docs = testing::random_table(TableKind::kDocument, {"d0", "d1", "d2"}, 16, rng);
  const Topic topic = topic_of(terms);
  for (const char* d : {"d0", "d1", "d2"}) {
    double sum = 0;
    for (const auto& t : terms) sum += naive_cosine(docs.row(*docs.find(d)), words.row(*words.find(t)));
    const double r = rel_d2v(d, topic, docs, words);
    CHECK(r == doctest::Approx(sum / 10).epsilon(1e-12));
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("weighted relevance") {
  Rng rng(13);
  const std::vector<std::string> terms = {"a", "b", "c", "d"};
  const auto words = testing::random_table(TableKind::kWordFromWordModel, terms, 6, rng);
  const auto titles = testing::random_table(TableKind::kDocument, {"x"}, 6, rng);
  const Topic uniform = topic_of(terms, {0.25, 0.25, 0.25, 0.25});
  CHECK(rel_weighted("x", uniform, titles, words) == rel_d2v("x", uniform, titles, words));

  const Topic single = topic_of({"c"}, {1.0});
  CHECK(rel_weighted("x", single, titles, words) ==
        doctest::Approx(naive_cosine(titles.row(0), words.row(2))).epsilon(1e-12));

  const std::vector<double> probs = {0.4, 0.3, 0.2, 0.1};
  double num = 0, den = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    num += probs[i] * naive_cosine(titles.row(0), words.row(static_cast<Eigen::Index>(i)));
    den += probs[i];
  }
  CHECK(rel_weighted("x", topic_of(terms, probs), titles, words) ==
        doctest::Approx(num / den).epsilon(1e-12));
  CHECK_THROWS_AS(rel_weighted("x", topic_of(terms), titles, words), Error);
}

TEST_CASE("centroid relevance") {
  Rng rng(14);
  const std::vector<std::string> terms = {"a", "b", "c", "d", "e"};
  const auto words = testing::random_table(TableKind::kWordFromWordModel, terms, 6, rng);
  const auto titles = testing::random_table(TableKind::kDocument, {"x"}, 6, rng);
  const Topic single = topic_of({"b"});
  CHECK(rel_centroid("x", single, titles, words) ==
        doctest::Approx(rel_d2v("x", single, titles, words)).epsilon(1e-12));

  Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(6);
  for (Eigen::Index i = 0; i < 5; ++i) centroid += words.row(i).cast<double>();
  centroid /= 5;
  CHECK(rel_centroid("x", topic_of(terms), titles, words) ==
        doctest::Approx(naive_cosine(titles.row(0).cast<double>(), centroid)).epsilon(1e-12));

  const auto opposite =
      make_table(TableKind::kWordFromWordModel, {"up", "down"}, {{1, 2}, {-1, -2}});
  const auto t2 = make_table(TableKind::kDocument, {"x"}, {{1, 0}});
  try {
    rel_centroid("x", topic_of({"up", "down"}), t2, opposite);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateVector);
  }
}

struct OracleSource {
  const EmbeddingTable* titles;
  const EmbeddingTable* terms;
  std::vector<std::string> labels;
};

// Scores every title in every source, keeps the top k of each (descending,
// ties by label), re-scores the union and returns the best out_k.
std::vector<std::pair<std::string, double>> oracle_candidates(
    const Topic& topic, const std::vector<OracleSource>& sources, std::size_t k,
    std::size_t out_k) {
  std::vector<std::map<std::string, double>> rel(sources.size());
  std::set<std::string> pool;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& label : sources[s].labels) {
      const auto row = sources[s].titles->find(title_token(label));
      if (!row) continue;
      double sum = 0;
      int n = 0;
      for (const auto& term : topic.terms) {
        const auto trow = sources[s].terms->find(term);
        if (!trow) continue;
        sum += naive_cosine(sources[s].titles->row(*row), sources[s].terms->row(*trow));
        ++n;
      }
      rel[s][label] = sum / n;
      ranked.emplace_back(-sum / n, label);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) pool.insert(ranked[i].second);
  }
  std::vector<std::pair<double, std::string>> combined;
  for (const auto& label : pool) {
    double total = 0;
    for (const auto& r : rel) {
      if (auto it = r.find(label); it != r.end()) total += it->second;
    }
    combined.emplace_back(-total, label);
  }
  std::sort(combined.begin(), combined.end());
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < std::min(out_k, combined.size()); ++i) {
    out.emplace_back(combined[i].second, -combined[i].first);
  }
  return out;
}

TEST_CASE("generate_candidates matches exhaustive enumeration") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::string> words;
    for (int i = 0; i < 30; ++i) words.push_back("w" + std::to_string(i));
    std::vector<std::string> doc_labels, word_labels;
    for (int i = 0; i < 20; ++i) {
      const std::string label = i % 3 == 0 ? "title " + std::to_string(i) : "t" + std::to_string(i);
      if (rng.below(4) != 0) doc_labels.push_back(label);
      if (rng.below(4) != 0) word_labels.push_back(label);
    }
    std::vector<std::string> doc_tokens, word_vocab = words;
    for (const auto& l : doc_labels) doc_tokens.push_back(title_token(l));
    for (const auto& l : word_labels) word_vocab.push_back(title_token(l));
    const auto docs = testing::random_table(TableKind::kDocument, doc_tokens, 16, rng);
    const auto doc_words = testing::random_table(TableKind::kWordFromDocModel, words, 16, rng);
    const auto w2v = testing::random_table(TableKind::kWordFromWordModel, word_vocab, 16, rng);
    Topic topic = topic_of({});
    for (int i = 0; i < 10; ++i) topic.terms.push_back(words[rng.below(words.size())]);

    GenerationConfig config;
    config.k_per_source = 1 + rng.below(12);
    config.out_k = 1 + rng.below(20);
    config.workers = 1 + static_cast<int>(rng.below(3));
    const auto got = generate_candidates(topic, CandidateSource{&docs, &doc_words, doc_labels},
                                         CandidateSource{&w2v, &w2v, word_labels}, config);
    const auto want = oracle_candidates(
        topic, {{&docs, &doc_words, doc_labels}, {&w2v, &w2v, word_labels}},
        config.k_per_source, config.out_k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].label == want[i].first);
      CHECK(got[i].rel_combined == doctest::Approx(want[i].second).epsilon(1e-12));
      const bool in_doc = docs.contains(title_token(got[i].label));
      const bool in_word = w2v.contains(title_token(got[i].label));
      CHECK(got[i].rel_d2v.has_value() == in_doc);
      CHECK(got[i].rel_w2v.has_value() == in_word);
      CHECK(got[i].rel_combined ==
            doctest::Approx(got[i].rel_d2v.value_or(0) + got[i].rel_w2v.value_or(0)));
    }
    for (std::size_t i = 1; i < got.size(); ++i) {
      CHECK(got[i - 1].rel_combined >= got[i].rel_combined);
    }

    // with k >= lexicon size the union is every title
    config.k_per_source = 1000;
    config.out_k = 1000;
    const auto all = generate_candidates(topic, CandidateSource{&docs, &doc_words, doc_labels},
                                         CandidateSource{&w2v, &w2v, word_labels}, config);
    std::set<std::string> expected(doc_labels.begin(), doc_labels.end());
    expected.insert(word_labels.begin(), word_labels.end());
    CHECK(all.size() == expected.size());
  }
}

TEST_CASE("a single source yields only its relevance") {
  Rng rng(22);
  const std::vector<std::string> words = {"a", "b", "c"};
  const auto w2v = testing::random_table(TableKind::kWordFromWordModel,
                                         {"a", "b", "c", "x_y", "z"}, 8, rng);
  const auto got = generate_candidates(topic_of(words), std::nullopt,
                                       CandidateSource{&w2v, &w2v, {"x y", "z", "missing"}});
  REQUIRE(got.size() == 2);
  for (const auto& c : got) {
    CHECK_FALSE(c.from_doc_model());
    CHECK(c.from_word_model());
    CHECK(c.rel_combined == *c.rel_w2v);
  }
}

TEST_CASE("topics format") {
  std::istringstream in(
      "# comment\n"
      "blogs-1\tblogs\tvmware server virtual oracle\t0.4 0.3 0.2 0.1\n"
      "news-7\tnews\tbank crisis\n");
  const auto topics = read_topics(in);
  REQUIRE(topics.size() == 2);
  CHECK(topics[0].terms.size() == 4);
  CHECK(topics[0].term_probs[3] == 0.1);
  CHECK_FALSE(topics[1].has_probs());
  CHECK(topics[0].truncated(2).terms == std::vector<std::string>{"vmware", "server"});
  CHECK(topics[0].truncated(2).term_probs == std::vector<double>{0.4, 0.3});
  std::ostringstream out;
  write_topics(out, topics);
  std::istringstream back(out.str());
  const auto again = read_topics(back);
  CHECK(again[0].terms == topics[0].terms);
  CHECK(again[0].term_probs == topics[0].term_probs);

  std::istringstream bad("x\ty\ta b\t0.5\n");
  CHECK_THROWS_AS(read_topics(bad), Error);
}

TEST_CASE("candidates format round trips") {
  std::vector<TopicCandidates> all = {
      {"t1", {{"desktop virtualization", 0.5, std::nullopt, 0.5},
              {"software", 0.25, 0.125, 0.375}}},
      {"t2", {}}};
  std::ostringstream out;
  write_candidates(out, all);
  CHECK(out.str().find("NA") != std::string::npos);
  std::istringstream in(out.str());
  const auto back = read_candidates(in);
  REQUIRE(back.size() >= 1);
  CHECK(back[0].topic_id == "t1");
  REQUIRE(back[0].candidates.size() == 2);
  CHECK(back[0].candidates[0].label == "desktop virtualization");
  CHECK_FALSE(back[0].candidates[0].rel_w2v.has_value());
  CHECK(*back[0].candidates[1].rel_w2v == doctest::Approx(0.125));
}

}  // namespace
}  // namespace netl
