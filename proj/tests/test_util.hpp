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

// Helpers shared by the unit tests.

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "netl/corpus.hpp"
#include "netl/embeddings.hpp"
#include "netl/random.hpp"

namespace netl::testing {

inline Article make_article(ArticleId id, std::string title, std::size_t n_tokens,
                            std::vector<ArticleId> outlinks = {}) {
  Article a;
  a.id = id;
  a.title = std::move(title);
  for (std::size_t i = 0; i < n_tokens; ++i) a.body_tokens.push_back("w" + std::to_string(i % 7));
  a.outlinks = std::move(outlinks);
  return a;
}

inline EmbeddingTable make_table(TableKind kind, std::vector<std::string> tokens,
                                 std::vector<std::vector<float>> rows) {
  EmbeddingTable::Matrix m(static_cast<Eigen::Index>(rows.size()),
                           rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return EmbeddingTable(kind, std::move(tokens), std::move(m));
}

inline EmbeddingTable random_table(TableKind kind, std::vector<std::string> tokens, int dim,
                                   Rng& rng) {
  EmbeddingTable::Matrix m(static_cast<Eigen::Index>(tokens.size()), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<float>(rng.normal());
  }
  return EmbeddingTable(kind, std::move(tokens), std::move(m));
}

// Plain loop cosine in double, independent of the library's.
template <typename A, typename B>
double naive_cosine(const A& a, const B& b) {
  double dot = 0, na = 0, nb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += double(a(i)) * double(b(i));
    na += double(a(i)) * double(a(i));
    nb += double(b(i)) * double(b(i));
  }
  return dot / std::sqrt(na * nb);
}

inline std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len,
                               std::string_view alphabet = "abcde") {
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += alphabet[rng.below(alphabet.size())];
  return w;
}

}  // namespace netl::testing
