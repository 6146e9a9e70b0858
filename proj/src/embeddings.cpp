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

#include "netl/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "netl/negative_sampling.hpp"
#include "netl/random.hpp"

namespace netl {

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::kWordFromWordModel: return "word_from_wordmodel";
    case TableKind::kWordFromDocModel: return "word_from_docmodel";
    case TableKind::kDocument: return "document";
  }
  return "unknown";
}

template <typename Scalar>
BasicEmbeddingTable<Scalar>::BasicEmbeddingTable(TableKind kind,
                                                 std::vector<std::string> tokens,
                                                 Matrix vectors)
    : kind_(kind), tokens_(std::move(tokens)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(tokens_.size()) != vectors_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(tokens_.size()) + " tokens for " +
                    std::to_string(vectors_.rows()) + " rows");
  }
  if (!vectors_.allFinite()) {
    throw Error(ErrorCode::kDegenerateVector, "non-finite embedding component");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<Eigen::Index>(i)).second) {
      throw Error(ErrorCode::kDuplicateToken, "'" + tokens_[i] + "'");
    }
  }
}

template <typename Scalar>
BasicEmbeddingTable<Scalar> BasicEmbeddingTable<Scalar>::subset(
    std::span<const std::string> keep) const {
  std::vector<std::string> tokens;
  std::vector<Eigen::Index> rows;
  for (const auto& token : keep) {
    if (auto i = find(token)) {
      tokens.push_back(token);
      rows.push_back(*i);
    }
  }
  Matrix vectors(static_cast<Eigen::Index>(rows.size()), dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    vectors.row(static_cast<Eigen::Index>(r)) = vectors_.row(rows[r]);
  }
  return BasicEmbeddingTable(kind_, std::move(tokens), std::move(vectors));
}

template class BasicEmbeddingTable<float>;
template class BasicEmbeddingTable<double>;

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (dim < 1) fail("dim must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (negative_samples < 0) fail("negative_samples must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (min_count < 1) fail("min_count must be >= 1");
  if (!(subsample_threshold > 0.0 && subsample_threshold <= 1.0)) {
    fail("subsample_threshold must lie in (0, 1]");
  }
  if (!(alpha_initial > 0.0) || alpha_final < 0.0 ||
      alpha_final > alpha_initial) {
    fail("learning rate schedule must satisfy 0 <= final <= initial, initial > 0");
  }
  if (workers < 1) fail("workers must be >= 1");
}

TrainConfig TrainConfig::full_skipgram() {
  TrainConfig c;
  c.dim = 300;
  c.window = 5;
  c.negative_samples = 5;
  c.subsample_threshold = 1e-5;
  c.epochs = 100;
  c.min_count = 5;
  return c;
}

TrainConfig TrainConfig::full_dbow() {
  TrainConfig c;
  c.dim = 300;
  c.window = 15;
  c.negative_samples = 5;
  c.subsample_threshold = 1e-5;
  c.epochs = 20;
  c.min_count = 5;
  return c;
}

TrainConfig TrainConfig::desk_skipgram() {
  TrainConfig c;
  c.dim = 50;
  c.window = 5;
  c.negative_samples = 5;
  c.subsample_threshold = 1e-3;
  c.epochs = 200;
  c.min_count = 1;
  return c;
}

TrainConfig TrainConfig::desk_dbow() {
  TrainConfig c;
  c.dim = 50;
  c.window = 15;
  c.negative_samples = 5;
  c.subsample_threshold = 1e-3;
  c.epochs = 100;
  c.min_count = 1;
  return c;
}

double keep_probability(std::uint64_t count, std::uint64_t total,
                        double threshold) {
  if (count == 0) return 1.0;
  const double threshold_count = threshold * static_cast<double>(total);
  const double ratio = static_cast<double>(count) / threshold_count;
  return std::min(1.0, (std::sqrt(ratio) + 1.0) / ratio);
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sentences,
                            int min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= static_cast<std::uint64_t>(min_count)) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  Vocabulary vocab;
  for (auto& [token, count] : kept) {
    vocab.index.emplace(token, static_cast<std::int32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(token);
    vocab.counts.push_back(count);
    vocab.total += count;
  }
  return vocab;
}

namespace {

using Matrix = EmbeddingTable::Matrix;
using RowVector = EmbeddingTable::RowVector;

// Unigram counts raised to 0.75.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocabulary& vocab) {
    cumulative_.reserve(vocab.counts.size());
    double acc = 0.0;
    for (auto count : vocab.counts) {
      acc += std::pow(static_cast<double>(count), 0.75);
      cumulative_.push_back(acc);
    }
  }

  std::int32_t sample(Rng& rng) const {
    const double x = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    if (it == cumulative_.end()) --it;
    return static_cast<std::int32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

// Applies one negative-sampling step for an input row against the shared
// output layer.
class PairUpdater {
 public:
  PairUpdater(Matrix& outputs, const NoiseSampler& noise, int negatives)
      : outputs_(outputs),
        noise_(noise),
        negatives_(negatives),
        targets_(static_cast<std::size_t>(negatives) + 1),
        gathered_(negatives + 1, outputs.cols()),
        grad_outputs_(negatives + 1, outputs.cols()),
        grad_input_(outputs.cols()) {}

  template <typename Row>
  void update(Row&& input, std::int32_t target, float alpha, Rng& rng) {
    Eigen::Index rows = 0;
    targets_[rows++] = target;
    for (int k = 0; k < negatives_; ++k) {
      const std::int32_t noise = noise_.sample(rng);
      if (noise != target) targets_[rows++] = noise;
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      gathered_.row(r) = outputs_.row(targets_[r]);
    }
    negative_sampling_gradient(input, gathered_.topRows(rows), grad_input_,
                               grad_outputs_.topRows(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
      outputs_.row(targets_[r]) -= alpha * grad_outputs_.row(r);
    }
    input -= alpha * grad_input_;
  }

 private:
  Matrix& outputs_;
  const NoiseSampler& noise_;
  int negatives_;
  std::vector<std::int32_t> targets_;
  Matrix gathered_;
  Matrix grad_outputs_;
  RowVector grad_input_;
};

void random_init(Matrix& m, Rng& rng) {
  const double scale = 1.0 / static_cast<double>(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = static_cast<float>((rng.uniform() - 0.5) * scale);
    }
  }
}

std::uint64_t worker_seed(std::uint64_t seed, int worker) {
  return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL *
                                            static_cast<std::uint64_t>(worker + 1);
}

// Shared state of one training run.
struct TrainingRun {
  const TrainConfig& config;
  const Vocabulary& vocab;
  NoiseSampler noise;
  Matrix words;
  Matrix outputs;
  std::vector<double> keep;
  std::uint64_t total_work = 1;
  std::atomic<std::uint64_t> progress{0};

  TrainingRun(const TrainConfig& c, const Vocabulary& v)
      : config(c), vocab(v), noise(v) {
    const auto n = static_cast<Eigen::Index>(v.tokens.size());
    words.resize(n, c.dim);
    outputs = Matrix::Zero(n, c.dim);
    Rng init(c.seed);
    random_init(words, init);
    keep.reserve(v.counts.size());
    for (auto count : v.counts) {
      keep.push_back(keep_probability(count, v.total, c.subsample_threshold));
    }
    total_work = std::max<std::uint64_t>(
        1, v.total * static_cast<std::uint64_t>(c.epochs));
  }

  float alpha_at(std::uint64_t done) const {
    const double frac = std::min(1.0, static_cast<double>(done) /
                                          static_cast<double>(total_work));
    const double a = config.alpha_initial -
                     (config.alpha_initial - config.alpha_final) * frac;
    return static_cast<float>(std::max(a, config.alpha_final));
  }

  // Maps tokens to ids and applies sub-sampling. `seen` receives the number of
  // in-vocabulary occurrences before sub-sampling.
  std::vector<std::int32_t> sample_sentence(std::span<const std::string> tokens,
                                            Rng& rng, std::uint64_t& seen) const {
    std::vector<std::int32_t> ids;
    ids.reserve(tokens.size());
    seen = 0;
    for (const auto& token : tokens) {
      const std::int32_t id = vocab.id(token);
      if (id < 0) continue;
      ++seen;
      const double p = keep[static_cast<std::size_t>(id)];
      if (p < 1.0 && rng.uniform() >= p) continue;
      ids.push_back(id);
    }
    return ids;
  }

  void skipgram_pairs(std::span<const std::int32_t> ids, std::size_t center,
                      float alpha, PairUpdater& updater, Rng& rng) {
    const int reach =
        config.dynamic_window
            ? 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.window)))
            : config.window;
    const std::size_t lo = center >= static_cast<std::size_t>(reach)
                               ? center - static_cast<std::size_t>(reach)
                               : 0;
    const std::size_t hi =
        std::min(ids.size(), center + static_cast<std::size_t>(reach) + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (j == center) continue;
      updater.update(words.row(ids[center]), ids[j], alpha, rng);
    }
  }
};

template <typename Body>
void run_workers(int workers, std::size_t items, Body&& body) {
  if (workers <= 1 || items < 2) {
    body(0, std::size_t{0}, items);
    return;
  }
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), items);
  std::vector<std::jthread> threads;
  threads.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t begin = items * w / n;
    const std::size_t end = items * (w + 1) / n;
    threads.emplace_back([&body, w, begin, end] {
      body(static_cast<int>(w), begin, end);
    });
  }
}

void require_tokens(std::span<const std::vector<std::string>> sentences) {
  for (const auto& s : sentences) {
    if (!s.empty()) return;
  }
  throw Error(ErrorCode::kEmptyCorpus, "no tokens to train on");
}

}  // namespace

EmbeddingTable train_skipgram(std::span<const std::vector<std::string>> sentences,
                              const TrainConfig& config) {
  config.validate();
  require_tokens(sentences);
  const Vocabulary vocab = build_vocabulary(sentences, config.min_count);
  if (vocab.tokens.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no token reaches min_count=" + std::to_string(config.min_count));
  }
  TrainingRun run(config, vocab);

  // With several workers, rows are updated without synchronisation
  // (Hogwild); only the single-worker mode is reproducible.
  run_workers(config.workers, sentences.size(),
              [&](int worker, std::size_t begin, std::size_t end) {
                Rng rng(worker_seed(config.seed, worker));
                PairUpdater updater(run.outputs, run.noise,
                                    config.negative_samples);
                for (int epoch = 0; epoch < config.epochs; ++epoch) {
                  for (std::size_t s = begin; s < end; ++s) {
                    std::uint64_t seen = 0;
                    const auto ids = run.sample_sentence(sentences[s], rng, seen);
                    const std::uint64_t base = run.progress.fetch_add(
                        seen, std::memory_order_relaxed);
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                      const float alpha = run.alpha_at(base + i);
                      run.skipgram_pairs(ids, i, alpha, updater, rng);
                    }
                  }
                }
              });

  return EmbeddingTable(TableKind::kWordFromWordModel, vocab.tokens,
                        std::move(run.words));
}

DbowTables train_dbow(std::span<const Document> documents,
                      const TrainConfig& config) {
  config.validate();
  std::vector<std::vector<std::string>> bodies;
  bodies.reserve(documents.size());
  for (const auto& doc : documents) bodies.push_back(doc.tokens);
  require_tokens(bodies);
  const Vocabulary vocab = build_vocabulary(bodies, config.min_count);
  if (vocab.tokens.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no token reaches min_count=" + std::to_string(config.min_count));
  }
  TrainingRun run(config, vocab);

  std::vector<std::string> keys;
  keys.reserve(documents.size());
  for (const auto& doc : documents) keys.push_back(doc.key);
  Matrix docs(static_cast<Eigen::Index>(documents.size()), config.dim);
  Rng init(config.seed ^ 0xD0C5D0C5D0C5D0C5ULL);
  random_init(docs, init);

  run_workers(config.workers, documents.size(),
              [&](int worker, std::size_t begin, std::size_t end) {
                Rng rng(worker_seed(config.seed, worker));
                PairUpdater updater(run.outputs, run.noise,
                                    config.negative_samples);
                for (int epoch = 0; epoch < config.epochs; ++epoch) {
                  for (std::size_t d = begin; d < end; ++d) {
                    std::uint64_t seen = 0;
                    const auto ids = run.sample_sentence(bodies[d], rng, seen);
                    const std::uint64_t base = run.progress.fetch_add(
                        seen, std::memory_order_relaxed);
                    auto doc_row = docs.row(static_cast<Eigen::Index>(d));
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                      const float alpha = run.alpha_at(base + i);
                      updater.update(doc_row, ids[i], alpha, rng);
                      run.skipgram_pairs(ids, i, alpha, updater, rng);
                    }
                  }
                }
              });

  return DbowTables{
      EmbeddingTable(TableKind::kDocument, std::move(keys), std::move(docs)),
      EmbeddingTable(TableKind::kWordFromDocModel, vocab.tokens,
                     std::move(run.words))};
}

template <typename Scalar>
void write_table(std::ostream& out, const BasicEmbeddingTable<Scalar>& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buffer[64];
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    const auto& token = table.tokens()[static_cast<std::size_t>(i)];
    if (token.empty() ||
        token.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorCode::kMalformedRecord,
                  "token '" + token + "' cannot be written (whitespace)");
    }
    out << token;
    for (Eigen::Index j = 0; j < table.dim(); ++j) {
      auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer,
                                     table.vectors()(i, j));
      out << ' ' << std::string_view(buffer, static_cast<std::size_t>(end - buffer));
    }
    out << '\n';
  }
}

template <typename Scalar>
BasicEmbeddingTable<Scalar> read_table(std::istream& in, TableKind kind) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedHeader, "missing header line");
  }
  long long rows = -1;
  long long dim = -1;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> rows >> dim) || (header >> extra) || rows < 0 || dim < 1) {
      throw Error(ErrorCode::kMalformedHeader, "expected 'vocab_size dim', got '" +
                                                   line + "'");
    }
  }
  using Matrix = typename BasicEmbeddingTable<Scalar>::Matrix;
  Matrix vectors(rows, dim);
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(rows));
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (static_cast<long long>(tokens.size()) == rows) {
      throw Error(ErrorCode::kMalformedHeader,
                  "more rows than the header's " + std::to_string(rows));
    }
    const std::string_view text(line);
    std::size_t pos = text.find(' ');
    if (pos == std::string_view::npos || pos == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + " has no values");
    }
    tokens.emplace_back(text.substr(0, pos));
    const auto r = static_cast<Eigen::Index>(tokens.size() - 1);
    long long col = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\r')) ++pos;
      if (pos >= text.size()) break;
      std::size_t end = text.find(' ', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view field = text.substr(pos, end - pos);
      if (!field.empty() && field.back() == '\r') field.remove_suffix(1);
      if (col >= dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "line " + std::to_string(line_no) + " has more than " +
                        std::to_string(dim) + " values");
      }
      Scalar value{};
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::kMalformedRecord,
                    "line " + std::to_string(line_no) + ": bad number '" +
                        std::string(field) + "'");
      }
      vectors(r, static_cast<Eigen::Index>(col++)) = value;
      pos = end;
    }
    if (col != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(col) + " values, header says " +
                      std::to_string(dim));
    }
  }
  if (static_cast<long long>(tokens.size()) != rows) {
    throw Error(ErrorCode::kMalformedHeader,
                "header says " + std::to_string(rows) + " rows, found " +
                    std::to_string(tokens.size()));
  }
  return BasicEmbeddingTable<Scalar>(kind, std::move(tokens), std::move(vectors));
}

template void write_table(std::ostream&, const BasicEmbeddingTable<float>&);
template void write_table(std::ostream&, const BasicEmbeddingTable<double>&);
template BasicEmbeddingTable<float> read_table(std::istream&, TableKind);
template BasicEmbeddingTable<double> read_table(std::istream&, TableKind);

void export_table(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_table(out, table);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

EmbeddingTable import_table(const std::filesystem::path& path, TableKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return read_table<float>(in, kind);
}

}  // namespace netl
