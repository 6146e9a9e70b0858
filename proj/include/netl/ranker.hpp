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
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netl/features.hpp"

namespace netl {

struct GoldRating {
  std::string topic_id;
  std::string label;
  double mean_rating = 0.0;  // in [0, 3]
  int n_annotations = 1;
};

// Gold mean ratings indexed by (topic id, label).
class GoldStandard {
 public:
  GoldStandard() = default;
  explicit GoldStandard(std::span<const GoldRating> ratings);

  // Throws kMalformedRecord for an out-of-range rating or duplicate pair.
  void add(const GoldRating& rating);
  std::optional<double> rating(std::string_view topic_id, std::string_view label) const;
  // Throws kMissingGold naming the pair.
  double require(std::string_view topic_id, std::string_view label) const;
  // label -> rating for one topic.
  const std::map<std::string, double, std::less<>>& topic(std::string_view topic_id) const;
  std::vector<std::string> topic_ids() const;
  bool empty() const { return by_topic_.empty(); }

 private:
  std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> by_topic_;
};

// Tab separated with header: topic_id, label, mean_rating, n_annotations.
std::vector<GoldRating> read_gold(std::istream& in);
void write_gold(std::ostream& out, std::span<const GoldRating> ratings);

using FeatureMask = std::array<bool, kNumFeatures>;
inline constexpr FeatureMask kAllFeaturesOn = {true, true, true, true};

struct SvrConfig {
  double c = 1.0;
  double epsilon = 0.1;
  int epochs = 5000;
  std::uint64_t seed = 1;
  FeatureMask features = kAllFeaturesOn;  // disabled features keep weight 0
};

// Linear epsilon-insensitive support vector regressor over z-scored
// features.
struct RegressionModel {
  bool fitted = false;
  Eigen::Vector4d weights = Eigen::Vector4d::Zero();
  double bias = 0.0;
  Eigen::Vector4d feature_means = Eigen::Vector4d::Zero();
  Eigen::Vector4d feature_stds = Eigen::Vector4d::Ones();
  SvrConfig config;

  Eigen::Vector4d standardize(const FeatureVector& fv) const {
    return ((fv.values() - feature_means).array() / feature_stds.array()).matrix();
  }
};

struct TrainingPair {
  FeatureVector features;
  double target = 0.0;
};

// Minimises 1/2 |w|^2 + C sum max(0, |w.x + b - y| - eps) by seeded stochastic
// subgradient descent with step 1/(lambda t), lambda = 1/(C n), returning the
// average of the iterates over the second half of training. Targets are
// centred first; the bias is learnt as the weight of a constant input.
// Throws kDegenerateTrainingSet with fewer than two pairs.
RegressionModel fit(std::span<const TrainingPair> pairs, const SvrConfig& config = {});

// Throws kUnfittedModel.
double predict(const RegressionModel& model, const FeatureVector& fv);

struct RerankedLabel {
  std::string label;
  double score = 0.0;
  FeatureVector features;
};

// Descending predicted score; ties by trigram rank, then label.
std::vector<RerankedLabel> rerank(const RegressionModel& model,
                                  std::span<const LabelFeatures> candidates);
// Throws kMissingFeatures when a label has no entry in `features`.
std::vector<RerankedLabel> rerank(const RegressionModel& model,
                                  std::span<const std::string> labels,
                                  const std::map<std::string, FeatureVector>& features);

// Orders already-scored candidates with the rerank tie-break chain.
void sort_reranked(std::vector<RerankedLabel>& labels);

void write_model(std::ostream& out, const RegressionModel& model);
RegressionModel read_model(std::istream& in);

}  // namespace netl
