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

#include "netl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "netl/error.hpp"

namespace netl {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }

std::string join(std::span<const std::string> parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_punct(chunk[begin])) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  std::vector<std::string> trailing;
  while (end > begin && is_punct(chunk[end - 1])) {
    const char c = chunk[end - 1];
    if (c == '.' &&
        chunk.substr(begin, end - 1 - begin).find('.') != std::string_view::npos) {
      break;
    }
    trailing.emplace_back(1, c);
    --end;
  }
  if (end > begin) out.emplace_back(chunk.substr(begin, end - begin));
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& chunk : split_whitespace(to_lower_ascii(text))) {
    tokenize_chunk(chunk, out);
  }
  return out;
}

bool is_disambiguation_title(std::string_view title) {
  constexpr std::string_view kMarker = "(disambiguation)";
  const std::string lowered = to_lower_ascii(trim(title));
  return lowered.size() >= kMarker.size() &&
         std::string_view(lowered).substr(lowered.size() - kMarker.size()) ==
             kMarker;
}

std::vector<Article> filter_articles(std::span<const Article> articles,
                                     std::size_t min_body_tokens) {
  std::vector<Article> kept;
  for (const auto& article : articles) {
    if (article.body_tokens.size() < min_body_tokens) continue;
    if (is_disambiguation_title(article.title)) continue;
    kept.push_back(article);
  }
  return kept;
}

std::string_view to_string(TitleVariant variant) {
  return variant == TitleVariant::kDocEmbedding ? "doc_embedding"
                                                : "word_embedding";
}

std::string strip_trailing_parenthetical(std::string_view title) {
  std::string_view t = trim(title);
  if (t.empty() || t.back() != ')') return std::string(t);
  int depth = 0;
  for (std::size_t i = t.size(); i-- > 0;) {
    if (t[i] == ')') {
      ++depth;
    } else if (t[i] == '(') {
      if (--depth == 0) return std::string(trim(t.substr(0, i)));
    }
  }
  return std::string(t);  // unbalanced
}

std::string normalize_title(std::string_view title, TitleVariant variant) {
  std::string base = variant == TitleVariant::kWordEmbedding
                         ? strip_trailing_parenthetical(title)
                         : std::string(title);
  return join(split_whitespace(to_lower_ascii(base)), ' ');
}

bool TitleLexicon::contains(std::string_view title) const {
  return entries_.find(title) != entries_.end();
}

std::span<const ArticleId> TitleLexicon::ids(std::string_view title) const {
  auto it = entries_.find(title);
  if (it == entries_.end()) return {};
  return it->second;
}

std::vector<std::string> TitleLexicon::titles() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [title, ids] : entries_) out.push_back(title);
  return out;
}

void TitleLexicon::add(const std::string& title, ArticleId id) {
  auto& ids = entries_[title];
  auto pos = std::lower_bound(ids.begin(), ids.end(), id);
  if (pos == ids.end() || *pos != id) ids.insert(pos, id);
}

TitleLexicon build_title_lexicon(std::span<const Article> articles,
                                 TitleVariant variant,
                                 std::size_t max_title_words) {
  TitleLexicon lexicon(variant, max_title_words);
  for (const auto& article : articles) {
    const std::string title = normalize_title(article.title, variant);
    if (title.empty()) continue;
    if (variant == TitleVariant::kWordEmbedding &&
        title.find_first_of("()") != std::string::npos) {
      continue;
    }
    if (split_whitespace(title).size() > max_title_words) continue;
    lexicon.add(title, article.id);
  }
  return lexicon;
}

std::string title_token(std::string_view title) {
  std::string out(title);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string token_title(std::string_view token) {
  std::string out(token);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

TitleCollapser::TitleCollapser(const TitleLexicon& lexicon) {
  for (const auto& [title, ids] : lexicon.entries()) {
    const std::size_t words = split_whitespace(title).size();
    if (words < 2) continue;
    multiword_.insert(title);
    max_words_ = std::max(max_words_, words);
  }
}

std::vector<std::string> TitleCollapser::collapse(
    std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    const std::size_t longest = std::min(max_words_, tokens.size() - i);
    for (std::size_t len = longest; len >= 2; --len) {
      if (multiword_.contains(join(tokens.subspan(i, len), ' '))) {
        matched = len;
        break;
      }
    }
    if (matched) {
      out.push_back(join(tokens.subspan(i, matched), '_'));
      i += matched;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

std::vector<std::string> collapse_titles(std::span<const std::string> tokens,
                                         const TitleLexicon& lexicon) {
  return TitleCollapser(lexicon).collapse(tokens);
}

std::vector<Article> read_articles(std::istream& in) {
  std::vector<Article> articles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      Article article;
      article.id = record.at("id").get<ArticleId>();
      article.title = record.at("title").get<std::string>();
      article.body_tokens = tokenize(record.at("body").get<std::string>());
      if (record.contains("outlinks")) {
        article.outlinks = record.at("outlinks").get<std::vector<ArticleId>>();
      }
      std::sort(article.outlinks.begin(), article.outlinks.end());
      article.outlinks.erase(
          std::unique(article.outlinks.begin(), article.outlinks.end()),
          article.outlinks.end());
      articles.push_back(std::move(article));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  "article line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return articles;
}

void write_articles(std::ostream& out, std::span<const Article> articles) {
  for (const auto& article : articles) {
    nlohmann::json record;
    record["id"] = article.id;
    record["title"] = article.title;
    record["body"] = join(article.body_tokens, ' ');
    record["outlinks"] = article.outlinks;
    out << record.dump() << '\n';
  }
}

void write_lexicon(std::ostream& out, const TitleLexicon& lexicon) {
  for (const auto& [title, ids] : lexicon.entries()) {
    out << title << '\t';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ',';
      out << ids[i];
    }
    out << '\n';
  }
}

TitleLexicon read_lexicon(std::istream& in, TitleVariant variant,
                          std::size_t max_title_words) {
  TitleLexicon lexicon(variant, max_title_words);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorCode::kMalformedRecord,
                  "lexicon line " + std::to_string(line_no));
    }
    const std::string title = line.substr(0, tab);
    std::stringstream ids(line.substr(tab + 1));
    std::string field;
    bool any = false;
    while (std::getline(ids, field, ',')) {
      try {
        std::size_t used = 0;
        const ArticleId id = std::stoll(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        lexicon.add(title, id);
        any = true;
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kMalformedRecord,
                    "lexicon line " + std::to_string(line_no) +
                        ": bad article id '" + field + "'");
      }
    }
    if (!any) {
      throw Error(ErrorCode::kMalformedRecord,
                  "lexicon line " + std::to_string(line_no) + ": no ids");
    }
  }
  return lexicon;
}

}  // namespace netl
