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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace netl {

using ArticleId = std::int64_t;

struct Article {
  ArticleId id = 0;
  std::string title;                     // original form
  std::vector<std::string> body_tokens;  // lowercase
  std::vector<ArticleId> outlinks;       // sorted, unique
};

// Tokenizer rules, applied in order:
//   1. ASCII letters are lowercased; bytes >= 0x80 pass through untouched.
//   2. Text is split on whitespace into chunks.
//   3. Leading ASCII punctuation is peeled off a chunk one character at a time,
//      each character becoming its own token.
//   4. Trailing ASCII punctuation is peeled the same way, except that a
//      trailing '.' stays attached when the rest of the chunk already holds a
//      '.' (abbreviations such as "u.s.").
//   5. Whatever remains is one token; internal punctuation (periods, hyphens,
//      apostrophes) is kept.
// The tokenizer is idempotent on its own output.
std::vector<std::string> tokenize(std::string_view text);

// Lowercases ASCII letters only.
std::string to_lower_ascii(std::string_view text);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

bool is_disambiguation_title(std::string_view title);

// Drops articles with fewer than `min_body_tokens` body tokens and
// disambiguation pages. Order is preserved.
std::vector<Article> filter_articles(std::span<const Article> articles,
                                     std::size_t min_body_tokens = 40);

enum class TitleVariant { kDocEmbedding, kWordEmbedding };

std::string_view to_string(TitleVariant variant);

// Removes one trailing "( ... )" span (balanced) plus the whitespace before
// it. Internal parenthesised spans are left alone.
std::string strip_trailing_parenthetical(std::string_view title);

// Lowercase title with whitespace runs collapsed to one space. The word
// variant also strips a trailing parenthetical.
std::string normalize_title(std::string_view title, TitleVariant variant);

class TitleLexicon {
 public:
  TitleLexicon() = default;
  TitleLexicon(TitleVariant variant, std::size_t max_title_words)
      : variant_(variant), max_title_words_(max_title_words) {}

  TitleVariant variant() const { return variant_; }
  std::size_t max_title_words() const { return max_title_words_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains(std::string_view title) const;
  // Article ids behind a normalized title; empty span when absent.
  std::span<const ArticleId> ids(std::string_view title) const;
  std::vector<std::string> titles() const;

  // Adds (title, id); keeps ids sorted and unique.
  void add(const std::string& title, ArticleId id);

  const std::map<std::string, std::vector<ArticleId>, std::less<>>& entries()
      const {
    return entries_;
  }

 private:
  TitleVariant variant_ = TitleVariant::kDocEmbedding;
  std::size_t max_title_words_ = 4;
  std::map<std::string, std::vector<ArticleId>, std::less<>> entries_;
};

TitleLexicon build_title_lexicon(std::span<const Article> articles,
                                 TitleVariant variant,
                                 std::size_t max_title_words = 4);

// Joins a multiword title into the single token used by the embedding
// tables ("financial crisis" -> "financial_crisis").
std::string title_token(std::string_view title);
// Inverse of title_token.
std::string token_title(std::string_view token);

// Leftmost-longest greedy replacement of multiword lexicon titles by their
// underscore-joined token. Single-word titles are left as they are.
class TitleCollapser {
 public:
  explicit TitleCollapser(const TitleLexicon& lexicon);

  std::vector<std::string> collapse(std::span<const std::string> tokens) const;

 private:
  std::unordered_set<std::string> multiword_;
  std::size_t max_words_ = 0;
};

std::vector<std::string> collapse_titles(std::span<const std::string> tokens,
                                         const TitleLexicon& lexicon);

// Line-delimited JSON records: {"id": int, "title": str, "body": str,
// "outlinks": [int, ...]}. The body is tokenized on read; on write the
// tokens are joined with single spaces, which re-tokenizes to the same
// sequence.
std::vector<Article> read_articles(std::istream& in);
void write_articles(std::ostream& out, std::span<const Article> articles);

// Two-column text: normalized title TAB comma-separated article ids.
void write_lexicon(std::ostream& out, const TitleLexicon& lexicon);
TitleLexicon read_lexicon(std::istream& in, TitleVariant variant,
                          std::size_t max_title_words = 4);

}  // namespace netl
