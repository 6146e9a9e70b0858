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
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netl/error.hpp"

namespace netl {

enum class TableKind {
  kWordFromWordModel,  // skip-gram word vectors (titles collapsed to tokens)
  kWordFromDocModel,   // word vectors learnt jointly with dbow
  kDocument,           // dbow document vectors keyed by title token
};

std::string_view to_string(TableKind kind);

// Dense token -> vector table. Rows are stored contiguously (row-major) so a
// single embedding is a cheap contiguous block.
template <typename Scalar>
class BasicEmbeddingTable {
 public:
  using Matrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  BasicEmbeddingTable() = default;

  // Throws kDuplicateToken, kDimensionMismatch (row count vs tokens) or
  // kDegenerateVector (non-finite component).
  BasicEmbeddingTable(TableKind kind, std::vector<std::string> tokens,
                      Matrix vectors);

  TableKind kind() const { return kind_; }
  Eigen::Index dim() const { return vectors_.cols(); }
  Eigen::Index size() const { return vectors_.rows(); }
  bool empty() const { return vectors_.rows() == 0; }

  std::optional<Eigen::Index> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view token) const { return find(token).has_value(); }

  auto row(Eigen::Index i) const { return vectors_.row(i); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const Matrix& vectors() const { return vectors_; }

  // Table restricted to `keep` (tokens absent from this table are skipped),
  // in the order given.
  BasicEmbeddingTable subset(std::span<const std::string> keep) const;

  template <typename Other>
  BasicEmbeddingTable<Other> cast() const {
    return BasicEmbeddingTable<Other>(kind_, tokens_,
                                      vectors_.template cast<Other>());
  }

 private:
  TableKind kind_ = TableKind::kWordFromWordModel;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Eigen::Index> index_;
  Matrix vectors_;
};

using EmbeddingTable = BasicEmbeddingTable<float>;

// dot(a, b) / (|a| |b|), evaluated in double precision.
template <typename DerivedA, typename DerivedB>
double cosine(const Eigen::MatrixBase<DerivedA>& a,
              const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors of size " +
                                                   std::to_string(a.size()) +
                                                   " and " +
                                                   std::to_string(b.size()));
  }
  const auto ad = a.template cast<double>();
  const auto bd = b.template cast<double>();
  const double na = ad.norm();
  const double nb = bd.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(ErrorCode::kDegenerateVector, "cosine of a zero-norm vector");
  }
  double dot = 0.0;
  for (Eigen::Index i = 0; i < ad.size(); ++i) dot += ad(i) * bd(i);
  const double c = dot / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

struct TrainConfig {
  int dim = 50;
  int window = 5;
  int negative_samples = 5;
  double subsample_threshold = 1e-3;
  int epochs = 50;
  int min_count = 1;
  std::uint64_t seed = 1;
  double alpha_initial = 0.025;
  double alpha_final = 0.0001;
  // Per-center window drawn uniformly from [1, window].
  bool dynamic_window = true;
  // 1 = deterministic; >1 = lock-free shared updates (non-deterministic).
  int workers = 1;

  // Throws kInvalidConfig.
  void validate() const;

  static TrainConfig full_skipgram();
  static TrainConfig full_dbow();
  static TrainConfig desk_skipgram();
  static TrainConfig desk_dbow();
};

// word2vec-style keep probability for one occurrence of a token seen
// `count` times among `total` tokens. Always 1 when threshold == 1.
double keep_probability(std::uint64_t count, std::uint64_t total,
                        double threshold);

struct Vocabulary {
  std::vector<std::string> tokens;     // sorted by count desc, then token
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::int32_t> index;
  std::uint64_t total = 0;             // sum of counts

  std::int32_t id(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  }
};

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sentences,
                            int min_count);

// Skip-gram with negative sampling. Each sentence is one article body with
// titles already collapsed to single tokens.
EmbeddingTable train_skipgram(std::span<const std::vector<std::string>> sentences,
                              const TrainConfig& config);

struct Document {
  std::string key;  // title token
  std::vector<std::string> tokens;
};

struct DbowTables {
  EmbeddingTable documents;
  EmbeddingTable words;
};

// Distributed bag-of-words paragraph vectors: each document vector predicts
// its own words through negative sampling, while word vectors are trained
// jointly by skip-gram against the same output layer.
DbowTables train_dbow(std::span<const Document> documents,
                      const TrainConfig& config);

// Text interchange format: "vocab_size dim" header, then one line per token
// with `dim` space-separated decimals. Floats are written in shortest
// round-trip form, so export followed by import is exact.
template <typename Scalar>
void write_table(std::ostream& out, const BasicEmbeddingTable<Scalar>& table);
template <typename Scalar>
BasicEmbeddingTable<Scalar> read_table(std::istream& in, TableKind kind);

void export_table(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable import_table(const std::filesystem::path& path, TableKind kind);

}  // namespace netl
