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

#include "netl/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "netl/random.hpp"
#include "netl/tabular.hpp"

namespace netl {

GoldStandard::GoldStandard(std::span<const GoldRating> ratings) {
  for (const auto& r : ratings) add(r);
}

void GoldStandard::add(const GoldRating& rating) {
  if (!(rating.mean_rating >= 0.0 && rating.mean_rating <= 3.0)) {
    throw Error(ErrorCode::kMalformedRecord,
                "rating " + format_exact(rating.mean_rating) + " for (" +
                    rating.topic_id + ", " + rating.label + ") is outside [0, 3]");
  }
  if (rating.n_annotations < 1) {
    throw Error(ErrorCode::kMalformedRecord,
                "(" + rating.topic_id + ", " + rating.label + ") has no annotations");
  }
  if (!by_topic_[rating.topic_id].emplace(rating.label, rating.mean_rating).second) {
    throw Error(ErrorCode::kMalformedRecord,
                "duplicate gold pair (" + rating.topic_id + ", " + rating.label + ")");
  }
}

std::optional<double> GoldStandard::rating(std::string_view topic_id,
                                           std::string_view label) const {
  auto t = by_topic_.find(topic_id);
  if (t == by_topic_.end()) return std::nullopt;
  auto l = t->second.find(label);
  if (l == t->second.end()) return std::nullopt;
  return l->second;
}

double GoldStandard::require(std::string_view topic_id, std::string_view label) const {
  if (auto r = rating(topic_id, label)) return *r;
  throw Error(ErrorCode::kMissingGold,
              "(" + std::string(topic_id) + ", " + std::string(label) + ")");
}

const std::map<std::string, double, std::less<>>& GoldStandard::topic(
    std::string_view topic_id) const {
  static const std::map<std::string, double, std::less<>> kEmpty;
  auto t = by_topic_.find(topic_id);
  return t == by_topic_.end() ? kEmpty : t->second;
}

std::vector<std::string> GoldStandard::topic_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, labels] : by_topic_) ids.push_back(id);
  return ids;
}

std::vector<GoldRating> read_gold(std::istream& in) {
  std::vector<GoldRating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("topic_id\t")) continue;
    const auto f = split_tabs(line);
    const std::string where = "gold line " + std::to_string(line_no);
    if (f.size() != 4) throw Error(ErrorCode::kMalformedRecord, where);
    out.push_back({f[0], f[1], parse_double(f[2], where),
                   static_cast<int>(parse_int(f[3], where))});
  }
  return out;
}

void write_gold(std::ostream& out, std::span<const GoldRating> ratings) {
  out << "topic_id\tlabel\tmean_rating\tn_annotations\n";
  for (const auto& r : ratings) {
    out << r.topic_id << '\t' << r.label << '\t' << format_exact(r.mean_rating)
        << '\t' << r.n_annotations << '\n';
  }
}

RegressionModel fit(std::span<const TrainingPair> pairs, const SvrConfig& config) {
  if (pairs.size() < 2) {
    throw Error(ErrorCode::kDegenerateTrainingSet,
                "need at least 2 training pairs, got " + std::to_string(pairs.size()));
  }
  if (!(config.c > 0.0) || config.epsilon < 0.0 || config.epochs < 1) {
    throw Error(ErrorCode::kInvalidConfig, "SVR needs C > 0, epsilon >= 0, epochs >= 1");
  }
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::Matrix<double, Eigen::Dynamic, 4> raw(n, 4);
  Eigen::VectorXd targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    raw.row(i) = pairs[static_cast<std::size_t>(i)].features.values().transpose();
    targets(i) = pairs[static_cast<std::size_t>(i)].target;
  }

  RegressionModel model;
  model.config = config;
  model.feature_means = raw.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double var =
        (raw.col(j).array() - model.feature_means(j)).square().mean();
    const double sd = std::sqrt(var);
    model.feature_stds(j) = sd > 0.0 ? sd : 1.0;
  }

  // Standardized inputs plus a constant column for the bias; disabled
  // features are zeroed so their weight never moves.
  Eigen::Matrix<double, Eigen::Dynamic, 5> x(n, 5);
  for (Eigen::Index j = 0; j < 4; ++j) {
    if (config.features[static_cast<std::size_t>(j)]) {
      x.col(j) = (raw.col(j).array() - model.feature_means(j)) / model.feature_stds(j);
    } else {
      x.col(j).setZero();
    }
  }
  x.col(4).setOnes();
  const double target_center = targets.mean();
  const Eigen::VectorXd centred = targets.array() - target_center;

  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  const std::uint64_t total_steps =
      static_cast<std::uint64_t>(config.epochs) * static_cast<std::uint64_t>(n);
  const std::uint64_t average_from = total_steps / 2 + 1;

  Eigen::Matrix<double, 1, 5> w = Eigen::Matrix<double, 1, 5>::Zero();
  Eigen::Matrix<double, 1, 5> w_sum = Eigen::Matrix<double, 1, 5>::Zero();
  std::uint64_t averaged = 0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(config.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    for (Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double residual = x.row(i).dot(w) - centred(i);
      double g = 0.0;
      if (residual > config.epsilon) g = 1.0;
      if (residual < -config.epsilon) g = -1.0;
      w *= 1.0 - eta * lambda;
      if (g != 0.0) w -= (eta * g) * x.row(i);
      if (t >= average_from) {
        w_sum += w;
        ++averaged;
      }
    }
  }
  const Eigen::Matrix<double, 1, 5> w_avg = w_sum / static_cast<double>(averaged);
  model.weights = w_avg.head<4>().transpose();
  model.bias = w_avg(4) + target_center;
  model.fitted = true;
  return model;
}

double predict(const RegressionModel& model, const FeatureVector& fv) {
  if (!model.fitted) throw Error(ErrorCode::kUnfittedModel, "predict before fit");
  return model.weights.dot(model.standardize(fv)) + model.bias;
}

void sort_reranked(std::vector<RerankedLabel>& labels) {
  std::sort(labels.begin(), labels.end(),
            [](const RerankedLabel& a, const RerankedLabel& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.features.letter_trigram_rank != b.features.letter_trigram_rank) {
                return a.features.letter_trigram_rank < b.features.letter_trigram_rank;
              }
              return a.label < b.label;
            });
}

std::vector<RerankedLabel> rerank(const RegressionModel& model,
                                  std::span<const LabelFeatures> candidates) {
  std::vector<RerankedLabel> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back({c.label, predict(model, c.features), c.features});
  }
  sort_reranked(out);
  return out;
}

std::vector<RerankedLabel> rerank(const RegressionModel& model,
                                  std::span<const std::string> labels,
                                  const std::map<std::string, FeatureVector>& features) {
  std::vector<LabelFeatures> candidates;
  candidates.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = features.find(label);
    if (it == features.end()) {
      throw Error(ErrorCode::kMissingFeatures, "label '" + label + "'");
    }
    candidates.push_back({label, it->second});
  }
  return rerank(model, candidates);
}

void write_model(std::ostream& out, const RegressionModel& model) {
  if (!model.fitted) throw Error(ErrorCode::kUnfittedModel, "cannot save");
  auto vec = [](const Eigen::Vector4d& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::ordered_json j;
  j["features"] = {"letter_trigram_rank", "pagerank", "topic_overlap", "num_words"};
  j["weights"] = vec(model.weights);
  j["bias"] = model.bias;
  j["feature_means"] = vec(model.feature_means);
  j["feature_stds"] = vec(model.feature_stds);
  j["config"] = {{"c", model.config.c},
                 {"epsilon", model.config.epsilon},
                 {"epochs", model.config.epochs},
                 {"seed", model.config.seed},
                 {"feature_mask", model.config.features}};
  out << j.dump(2) << '\n';
}

RegressionModel read_model(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    auto vec = [](const nlohmann::json& v) {
      const auto values = v.get<std::vector<double>>();
      if (values.size() != kNumFeatures) {
        throw Error(ErrorCode::kMalformedRecord, "model vector needs 4 entries");
      }
      return Eigen::Vector4d(values[0], values[1], values[2], values[3]);
    };
    RegressionModel model;
    model.weights = vec(j.at("weights"));
    model.bias = j.at("bias").get<double>();
    model.feature_means = vec(j.at("feature_means"));
    model.feature_stds = vec(j.at("feature_stds"));
    if ((model.feature_stds.array() <= 0.0).any()) {
      throw Error(ErrorCode::kMalformedRecord, "feature_stds must be positive");
    }
    const auto& c = j.at("config");
    model.config.c = c.at("c").get<double>();
    model.config.epsilon = c.at("epsilon").get<double>();
    model.config.epochs = c.at("epochs").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.features = c.at("feature_mask").get<FeatureMask>();
    model.fitted = true;
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("model file: ") + e.what());
  }
}

}  // namespace netl
