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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netl/features.hpp"
#include "netl/ranker.hpp"

namespace netl {

struct LabelledCandidate {
  std::string label;
  FeatureVector features;
  double rating = 0.0;  // gold mean rating
};

struct LabelledTopic {
  std::string topic_id;
  std::string domain;
  std::vector<LabelledCandidate> candidates;
};

using Dataset = std::vector<LabelledTopic>;

// Joins per-topic features with gold ratings and topic domains. Every
// candidate must be rated (kMissingGold otherwise).
Dataset build_dataset(const std::vector<TopicFeatures>& features,
                      const GoldStandard& gold,
                      const std::map<std::string, std::string>& topic_domains);

std::vector<std::string> domains(const Dataset& dataset);
Dataset select_domains(const Dataset& dataset, std::span<const std::string> keep);

enum class DcgVariant {
  kLinear,       // gain = rating; rank 1 undiscounted, then 1/log2(rank)
  kExponential,  // gain = 2^rating - 1, same discount
};

// DCG of the first k gains (fewer if the list is shorter).
double dcg_at_k(std::span<const double> gains, std::size_t k,
                DcgVariant variant = DcgVariant::kLinear);

// DCG of the system ranking over the DCG of the gold-descending ordering of
// the candidate set in `gold`; 1 when the ideal DCG is 0. Throws kMissingGold
// for a ranked label that has no rating.
double ndcg_at_k(std::span<const std::string> ranking,
                 const std::map<std::string, double, std::less<>>& gold,
                 std::size_t k, DcgVariant variant = DcgVariant::kLinear);

struct TopicRanking {
  std::string topic_id;
  std::vector<std::string> labels;  // system order
};

// Mean gold rating of each topic's rank-1 label. Throws kMissingGold.
double top1_average(std::span<const TopicRanking> rankings, const GoldStandard& gold);

struct Metrics {
  double top1_avg = 0.0;
  double ndcg_1 = 0.0;
  double ndcg_3 = 0.0;
  double ndcg_5 = 0.0;
  std::size_t n_topics = 0;
};

// Metrics of given rankings of dataset topics (matched by topic id).
Metrics evaluate_rankings(const Dataset& topics, std::span<const TopicRanking> rankings,
                          DcgVariant variant = DcgVariant::kLinear);

// Rankings produced by the trigram baseline (letter_trigram_rank ascending).
std::vector<TopicRanking> baseline_rankings(const Dataset& topics);
// Rankings produced by a fitted model.
std::vector<TopicRanking> model_rankings(const Dataset& topics, const RegressionModel& model);

std::vector<TrainingPair> training_pairs(const Dataset& topics);

Metrics baseline(const Dataset& topics, DcgVariant variant = DcgVariant::kLinear);

// Perfect ordering of the rated candidates: top-1 is the mean of per-topic
// maxima and every nDCG is 1.
Metrics upper_bound(const Dataset& topics);
// Same from gold ratings alone; topics restricted to `topic_ids` if nonempty.
Metrics upper_bound(const GoldStandard& gold, std::span<const std::string> topic_ids = {});

struct CvConfig {
  int folds = 10;
  int runs = 10;
  std::uint64_t seed = 1;
  SvrConfig svr;
  DcgVariant variant = DcgVariant::kLinear;
};

// Topic indices of each test fold for one run; every index appears in
// exactly one fold.
std::vector<std::vector<std::size_t>> topic_folds(std::size_t n_topics, int folds,
                                                  std::uint64_t seed);

// In-domain protocol: folds partition topics, the ranker is trained on the
// other folds, metrics are averaged over folds and then runs (fold
// partitioning reseeded per run). Throws kTooFewTopics.
Metrics cross_validate(const Dataset& topics, const CvConfig& config);

// Trains on every pair of the train domains, evaluates every test-domain
// topic. Throws kOverlappingDomain.
Metrics cross_domain(const Dataset& dataset, std::span<const std::string> train_domains,
                     const std::string& test_domain, const SvrConfig& svr,
                     DcgVariant variant = DcgVariant::kLinear);

enum class ConditionKind { kBaseline, kInDomain, kCrossDomain, kUpperBound, kAblation };

struct ReportRow {
  std::string test_domain;
  ConditionKind condition = ConditionKind::kBaseline;
  // Cross-domain: '+'-joined training domains ("all" style rows list them
  // all). Ablation: the removed feature.
  std::string detail;
  Metrics metrics;
  std::optional<double> top1_delta;  // ablation rows: vs all features

  std::string condition_name() const;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
};

// Baseline, in-domain, cross-domain (each other domain and all others
// together) and upper bound for every domain.
EvaluationReport evaluate(const Dataset& dataset, const CvConfig& config);

// In-domain protocol with each feature removed in turn, per domain.
EvaluationReport ablation(const Dataset& dataset, const CvConfig& config);

struct TopicRatingStats {
  std::string topic_id;
  std::string domain;
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
};

struct DomainRatingStats {
  std::string domain;
  std::size_t n_topics = 0;
  double mean_of_means = 0.0;
  double mean_of_maxima = 0.0;
  double mean_of_minima = 0.0;
};

struct CandidateQuality {
  std::vector<TopicRatingStats> topics;
  std::vector<DomainRatingStats> domains;
};

CandidateQuality candidate_quality_stats(const Dataset& dataset);

struct PairedTTest {
  double t = 0.0;
  std::size_t df = 0;
  double p_greater = 1.0;  // one-sided: mean(a - b) > 0
};

// One-sided paired t-test over matched samples (e.g. per-topic maxima of two
// systems).
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

// Machine-readable rows: test_domain, condition, detail, top1_avg, ndcg_1,
// ndcg_3, ndcg_5, n_topics, top1_delta.
void write_report_tsv(std::ostream& out, const EvaluationReport& report);
// Aligned table grouped by test domain.
void write_report_table(std::ostream& out, const EvaluationReport& report);
void write_quality_tsv(std::ostream& out, const CandidateQuality& quality);

}  // namespace netl
