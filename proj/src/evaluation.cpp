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

#include "netl/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "netl/random.hpp"
#include "netl/tabular.hpp"

namespace netl {
namespace {

std::map<std::string, double, std::less<>> gold_of(const LabelledTopic& topic) {
  std::map<std::string, double, std::less<>> gold;
  for (const auto& c : topic.candidates) gold.emplace(c.label, c.rating);
  return gold;
}

Metrics mean_of(std::span<const Metrics> parts) {
  Metrics m;
  if (parts.empty()) return m;
  for (const auto& p : parts) {
    m.top1_avg += p.top1_avg;
    m.ndcg_1 += p.ndcg_1;
    m.ndcg_3 += p.ndcg_3;
    m.ndcg_5 += p.ndcg_5;
  }
  const double n = static_cast<double>(parts.size());
  m.top1_avg /= n;
  m.ndcg_1 /= n;
  m.ndcg_3 /= n;
  m.ndcg_5 /= n;
  return m;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

Dataset build_dataset(const std::vector<TopicFeatures>& features,
                      const GoldStandard& gold,
                      const std::map<std::string, std::string>& topic_domains) {
  Dataset dataset;
  for (const auto& topic : features) {
    LabelledTopic lt;
    lt.topic_id = topic.topic_id;
    auto d = topic_domains.find(topic.topic_id);
    if (d == topic_domains.end()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "topic '" + topic.topic_id + "' has no domain");
    }
    lt.domain = d->second;
    for (const auto& c : topic.candidates) {
      lt.candidates.push_back({c.label, c.features, gold.require(topic.topic_id, c.label)});
    }
    if (!lt.candidates.empty()) dataset.push_back(std::move(lt));
  }
  return dataset;
}

std::vector<std::string> domains(const Dataset& dataset) {
  std::set<std::string> seen;
  for (const auto& t : dataset) seen.insert(t.domain);
  return {seen.begin(), seen.end()};
}

Dataset select_domains(const Dataset& dataset, std::span<const std::string> keep) {
  const std::set<std::string> wanted(keep.begin(), keep.end());
  Dataset out;
  for (const auto& t : dataset) {
    if (wanted.contains(t.domain)) out.push_back(t);
  }
  return out;
}

double dcg_at_k(std::span<const double> gains, std::size_t k, DcgVariant variant) {
  double dcg = 0.0;
  const std::size_t n = std::min(k, gains.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double gain =
        variant == DcgVariant::kExponential ? std::exp2(gains[i]) - 1.0 : gains[i];
    const std::size_t rank = i + 1;
    dcg += rank == 1 ? gain : gain / std::log2(static_cast<double>(rank));
  }
  return dcg;
}

double ndcg_at_k(std::span<const std::string> ranking,
                 const std::map<std::string, double, std::less<>>& gold,
                 std::size_t k, DcgVariant variant) {
  std::vector<double> gains;
  gains.reserve(ranking.size());
  for (const auto& label : ranking) {
    auto it = gold.find(label);
    if (it == gold.end()) {
      throw Error(ErrorCode::kMissingGold, "no rating for ranked label '" + label + "'");
    }
    gains.push_back(it->second);
  }
  std::vector<double> ideal;
  ideal.reserve(gold.size());
  for (const auto& [label, rating] : gold) ideal.push_back(rating);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double ideal_dcg = dcg_at_k(ideal, k, variant);
  if (ideal_dcg == 0.0) return 1.0;
  return dcg_at_k(gains, k, variant) / ideal_dcg;
}

double top1_average(std::span<const TopicRanking> rankings, const GoldStandard& gold) {
  if (rankings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rankings) {
    if (r.labels.empty()) {
      throw Error(ErrorCode::kMissingGold, "topic '" + r.topic_id + "' has no ranked label");
    }
    sum += gold.require(r.topic_id, r.labels.front());
  }
  return sum / static_cast<double>(rankings.size());
}

Metrics evaluate_rankings(const Dataset& topics, std::span<const TopicRanking> rankings,
                          DcgVariant variant) {
  std::unordered_map<std::string, const LabelledTopic*> by_id;
  for (const auto& t : topics) by_id.emplace(t.topic_id, &t);
  std::vector<Metrics> per_topic;
  per_topic.reserve(rankings.size());
  for (const auto& r : rankings) {
    auto it = by_id.find(r.topic_id);
    if (it == by_id.end() || r.labels.empty()) {
      throw Error(ErrorCode::kMissingGold, "no gold for topic '" + r.topic_id + "'");
    }
    const auto gold = gold_of(*it->second);
    Metrics m;
    auto top = gold.find(r.labels.front());
    if (top == gold.end()) {
      throw Error(ErrorCode::kMissingGold,
                  "(" + r.topic_id + ", " + r.labels.front() + ")");
    }
    m.top1_avg = top->second;
    m.ndcg_1 = ndcg_at_k(r.labels, gold, 1, variant);
    m.ndcg_3 = ndcg_at_k(r.labels, gold, 3, variant);
    m.ndcg_5 = ndcg_at_k(r.labels, gold, 5, variant);
    per_topic.push_back(m);
  }
  Metrics out = mean_of(per_topic);
  out.n_topics = rankings.size();
  return out;
}

std::vector<TopicRanking> baseline_rankings(const Dataset& topics) {
  std::vector<TopicRanking> out;
  for (const auto& t : topics) {
    std::vector<const LabelledCandidate*> order;
    for (const auto& c : t.candidates) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
      if (a->features.letter_trigram_rank != b->features.letter_trigram_rank) {
        return a->features.letter_trigram_rank < b->features.letter_trigram_rank;
      }
      return a->label < b->label;
    });
    TopicRanking r{t.topic_id, {}};
    for (const auto* c : order) r.labels.push_back(c->label);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TopicRanking> model_rankings(const Dataset& topics,
                                         const RegressionModel& model) {
  std::vector<TopicRanking> out;
  for (const auto& t : topics) {
    std::vector<LabelFeatures> candidates;
    for (const auto& c : t.candidates) candidates.push_back({c.label, c.features});
    TopicRanking r{t.topic_id, {}};
    for (const auto& c : rerank(model, candidates)) r.labels.push_back(c.label);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrainingPair> training_pairs(const Dataset& topics) {
  std::vector<TrainingPair> pairs;
  for (const auto& t : topics) {
    for (const auto& c : t.candidates) pairs.push_back({c.features, c.rating});
  }
  return pairs;
}

Metrics baseline(const Dataset& topics, DcgVariant variant) {
  return evaluate_rankings(topics, baseline_rankings(topics), variant);
}

Metrics upper_bound(const Dataset& topics) {
  Metrics m;
  for (const auto& t : topics) {
    double best = 0.0;
    for (const auto& c : t.candidates) best = std::max(best, c.rating);
    m.top1_avg += best;
  }
  m.n_topics = topics.size();
  if (!topics.empty()) m.top1_avg /= static_cast<double>(topics.size());
  m.ndcg_1 = m.ndcg_3 = m.ndcg_5 = 1.0;
  return m;
}

Metrics upper_bound(const GoldStandard& gold, std::span<const std::string> topic_ids) {
  const std::vector<std::string> ids =
      topic_ids.empty() ? gold.topic_ids()
                        : std::vector<std::string>(topic_ids.begin(), topic_ids.end());
  Metrics m;
  std::size_t counted = 0;
  for (const auto& id : ids) {
    const auto& ratings = gold.topic(id);
    if (ratings.empty()) continue;
    double best = 0.0;
    for (const auto& [label, r] : ratings) best = std::max(best, r);
    m.top1_avg += best;
    ++counted;
  }
  m.n_topics = counted;
  if (counted) m.top1_avg /= static_cast<double>(counted);
  m.ndcg_1 = m.ndcg_3 = m.ndcg_5 = 1.0;
  return m;
}

std::vector<std::vector<std::size_t>> topic_folds(std::size_t n_topics, int folds,
                                                  std::uint64_t seed) {
  std::vector<std::size_t> order(n_topics);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[i % static_cast<std::size_t>(folds)].push_back(order[i]);
  }
  return out;
}

Metrics cross_validate(const Dataset& topics, const CvConfig& config) {
  if (config.folds < 2 || config.runs < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need folds >= 2 and runs >= 1");
  }
  if (topics.size() < static_cast<std::size_t>(config.folds)) {
    throw Error(ErrorCode::kTooFewTopics,
                std::to_string(topics.size()) + " topics for " +
                    std::to_string(config.folds) + " folds");
  }
  std::vector<Metrics> per_run;
  for (int run = 0; run < config.runs; ++run) {
    const auto folds = topic_folds(topics.size(), config.folds,
                                   config.seed + static_cast<std::uint64_t>(run));
    std::vector<Metrics> per_fold;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<bool> is_test(topics.size(), false);
      for (std::size_t i : folds[f]) is_test[i] = true;
      Dataset train, test;
      for (std::size_t i = 0; i < topics.size(); ++i) {
        (is_test[i] ? test : train).push_back(topics[i]);
      }
      const RegressionModel model = fit(training_pairs(train), config.svr);
      per_fold.push_back(evaluate_rankings(test, model_rankings(test, model), config.variant));
    }
    per_run.push_back(mean_of(per_fold));
  }
  Metrics out = mean_of(per_run);
  out.n_topics = topics.size();
  return out;
}

Metrics cross_domain(const Dataset& dataset, std::span<const std::string> train_domains,
                     const std::string& test_domain, const SvrConfig& svr,
                     DcgVariant variant) {
  if (std::find(train_domains.begin(), train_domains.end(), test_domain) !=
      train_domains.end()) {
    throw Error(ErrorCode::kOverlappingDomain,
                "test domain '" + test_domain + "' is also a training domain");
  }
  const Dataset train = select_domains(dataset, train_domains);
  const std::string test_only[] = {test_domain};
  const Dataset test = select_domains(dataset, test_only);
  const RegressionModel model = fit(training_pairs(train), svr);
  return evaluate_rankings(test, model_rankings(test, model), variant);
}

std::string ReportRow::condition_name() const {
  switch (condition) {
    case ConditionKind::kBaseline: return "baseline";
    case ConditionKind::kInDomain: return "in_domain";
    case ConditionKind::kCrossDomain: return "cross_domain(" + detail + ")";
    case ConditionKind::kUpperBound: return "upper_bound";
    case ConditionKind::kAblation: return "ablation(-" + detail + ")";
  }
  return "unknown";
}

EvaluationReport evaluate(const Dataset& dataset, const CvConfig& config) {
  EvaluationReport report;
  const auto all = domains(dataset);
  for (const auto& domain : all) {
    const std::string only[] = {domain};
    const Dataset topics = select_domains(dataset, only);
    report.rows.push_back({domain, ConditionKind::kBaseline, "",
                           baseline(topics, config.variant), std::nullopt});
    report.rows.push_back({domain, ConditionKind::kInDomain, "",
                           cross_validate(topics, config), std::nullopt});
    std::vector<std::string> others;
    for (const auto& d : all) {
      if (d != domain) others.push_back(d);
    }
    for (const auto& other : others) {
      const std::string train[] = {other};
      report.rows.push_back(
          {domain, ConditionKind::kCrossDomain, other,
           cross_domain(dataset, train, domain, config.svr, config.variant), std::nullopt});
    }
    if (others.size() > 1) {
      report.rows.push_back(
          {domain, ConditionKind::kCrossDomain, join(others, "+"),
           cross_domain(dataset, others, domain, config.svr, config.variant), std::nullopt});
    }
    report.rows.push_back(
        {domain, ConditionKind::kUpperBound, "", upper_bound(topics), std::nullopt});
  }
  return report;
}

EvaluationReport ablation(const Dataset& dataset, const CvConfig& config) {
  std::size_t enabled = 0;
  for (bool on : config.svr.features) enabled += on ? 1 : 0;
  if (enabled < 2) {
    throw Error(ErrorCode::kInvalidConfig, "ablation needs at least two features");
  }
  EvaluationReport report;
  for (const auto& domain : domains(dataset)) {
    const std::string only[] = {domain};
    const Dataset topics = select_domains(dataset, only);
    const Metrics full = cross_validate(topics, config);
    report.rows.push_back({domain, ConditionKind::kInDomain, "", full, std::nullopt});
    for (Feature feature : kAllFeatures) {
      const auto index = static_cast<std::size_t>(feature);
      if (!config.svr.features[index]) continue;
      CvConfig reduced = config;
      reduced.svr.features[index] = false;
      const Metrics m = cross_validate(topics, reduced);
      report.rows.push_back({domain, ConditionKind::kAblation, std::string(to_string(feature)),
                             m, m.top1_avg - full.top1_avg});
    }
  }
  return report;
}

CandidateQuality candidate_quality_stats(const Dataset& dataset) {
  CandidateQuality q;
  std::map<std::string, DomainRatingStats> by_domain;
  for (const auto& t : dataset) {
    if (t.candidates.empty()) continue;
    TopicRatingStats s{t.topic_id, t.domain, 0.0, t.candidates.front().rating,
                       t.candidates.front().rating};
    for (const auto& c : t.candidates) {
      s.mean += c.rating;
      s.max = std::max(s.max, c.rating);
      s.min = std::min(s.min, c.rating);
    }
    s.mean /= static_cast<double>(t.candidates.size());
    auto& d = by_domain[t.domain];
    d.domain = t.domain;
    ++d.n_topics;
    d.mean_of_means += s.mean;
    d.mean_of_maxima += s.max;
    d.mean_of_minima += s.min;
    q.topics.push_back(std::move(s));
  }
  for (auto& [name, d] : by_domain) {
    const double n = static_cast<double>(d.n_topics);
    d.mean_of_means /= n;
    d.mean_of_maxima /= n;
    d.mean_of_minima /= n;
    q.domains.push_back(d);
  }
  return q;
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "paired t-test needs two equal samples of size >= 2");
  }
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  PairedTTest out;
  out.df = n - 1;
  if (sd == 0.0) {
    out.t = mean == 0.0 ? 0.0
                        : std::copysign(std::numeric_limits<double>::infinity(), mean);
    out.p_greater = mean > 0.0 ? 0.0 : (mean < 0.0 ? 1.0 : 0.5);
    return out;
  }
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(out.df));
  out.p_greater = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

void write_report_tsv(std::ostream& out, const EvaluationReport& report) {
  out << "test_domain\tcondition\tdetail\ttop1_avg\tndcg_1\tndcg_3\tndcg_5\tn_topics\t"
         "top1_delta\n";
  for (const auto& r : report.rows) {
    out << r.test_domain << '\t' << r.condition_name() << '\t'
        << (r.detail.empty() ? "-" : r.detail) << '\t' << format_fixed(r.metrics.top1_avg, 4)
        << '\t' << format_fixed(r.metrics.ndcg_1, 4) << '\t'
        << format_fixed(r.metrics.ndcg_3, 4) << '\t' << format_fixed(r.metrics.ndcg_5, 4)
        << '\t' << r.metrics.n_topics << '\t'
        << (r.top1_delta ? format_fixed(*r.top1_delta, 4) : std::string("-")) << '\n';
  }
}

void write_report_table(std::ostream& out, const EvaluationReport& report) {
  std::size_t width = 12;
  for (const auto& r : report.rows) width = std::max(width, r.condition_name().size());
  const auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  std::string current;
  for (const auto& r : report.rows) {
    if (r.test_domain != current) {
      current = r.test_domain;
      out << "\n[" << current << "]\n"
          << pad("condition", width) << "  top1   ndcg1  ndcg3  ndcg5  topics\n";
    }
    out << pad(r.condition_name(), width) << "  " << format_fixed(r.metrics.top1_avg, 2)
        << "   " << format_fixed(r.metrics.ndcg_1, 2) << "   "
        << format_fixed(r.metrics.ndcg_3, 2) << "   " << format_fixed(r.metrics.ndcg_5, 2)
        << "   " << r.metrics.n_topics;
    if (r.top1_delta) out << "  (" << (*r.top1_delta >= 0 ? "+" : "") << format_fixed(*r.top1_delta, 2) << ")";
    out << '\n';
  }
}

void write_quality_tsv(std::ostream& out, const CandidateQuality& quality) {
  out << "scope\tid\tdomain\tn_topics\tmean\tmax\tmin\n";
  for (const auto& t : quality.topics) {
    out << "topic\t" << t.topic_id << '\t' << t.domain << "\t1\t" << format_fixed(t.mean, 4)
        << '\t' << format_fixed(t.max, 4) << '\t' << format_fixed(t.min, 4) << '\n';
  }
  for (const auto& d : quality.domains) {
    out << "domain\t" << d.domain << '\t' << d.domain << '\t' << d.n_topics << '\t'
        << format_fixed(d.mean_of_means, 4) << '\t' << format_fixed(d.mean_of_maxima, 4)
        << '\t' << format_fixed(d.mean_of_minima, 4) << '\n';
  }
}

}  // namespace netl
