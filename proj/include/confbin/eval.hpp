/*
 * Copyright 2026 The confbin Authors.
 *
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

// Metrics for set-valued binary predictions: validity, efficiency, the
// four-way region decomposition, both-as-correct / both-as-error scoring,
// classical confusion-matrix rates, rank-based AUROC, the calibration-set
// report and the quality of singleton predictions.
//
// Every rate is count / n for an integer count, so identities such as
// validity = frac_both + frac_correct_single hold exactly on the counts
// (RegionCounts) and up to one rounding step on the doubles.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confbin/core.hpp"

namespace confbin {

namespace detail {

inline void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
  if (a == 0) throw ValidationError(std::string(what) + ": empty input");
}

inline double ratio(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

inline std::optional<double> ratio_or_absent(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return ratio(num, den);
}

}  // namespace detail

struct RegionCounts {
  std::size_t correct_single = 0;
  std::size_t false_single = 0;
  std::size_t both = 0;
  std::size_t empty = 0;

  std::size_t total() const noexcept { return correct_single + false_single + both + empty; }
  std::size_t valid() const noexcept { return both + correct_single; }
  std::size_t singletons() const noexcept { return correct_single + false_single; }

  friend bool operator==(const RegionCounts&, const RegionCounts&) = default;
};

inline RegionCounts count_regions(std::span<const PredictionRegion> regions,
                                  std::span<const Label> truths) {
  detail::check_lengths(regions.size(), truths.size(), "region counts");
  RegionCounts c;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    switch (regions[i].kind()) {
      case RegionKind::Both: ++c.both; break;
      case RegionKind::Empty: ++c.empty; break;
      default:
        (regions[i].contains(truths[i]) ? c.correct_single : c.false_single) += 1;
        break;
    }
  }
  return c;
}

struct RegionDistribution {
  double frac_correct_single = 0.0;
  double frac_false_single = 0.0;
  double frac_both = 0.0;
  double frac_empty = 0.0;

  friend bool operator==(const RegionDistribution&, const RegionDistribution&) = default;
};

inline RegionDistribution to_distribution(const RegionCounts& c) {
  const std::size_t n = c.total();
  if (n == 0) throw ValidationError("region distribution: empty input");
  return {detail::ratio(c.correct_single, n), detail::ratio(c.false_single, n),
          detail::ratio(c.both, n), detail::ratio(c.empty, n)};
}

inline RegionDistribution region_distribution(std::span<const PredictionRegion> regions,
                                              std::span<const Label> truths) {
  return to_distribution(count_regions(regions, truths));
}

// Fraction of regions containing the true label; Both always does.
inline double validity(std::span<const PredictionRegion> regions, std::span<const Label> truths) {
  const auto c = count_regions(regions, truths);
  return detail::ratio(c.valid(), c.total());
}

// Fraction of singleton regions.
inline double efficiency(std::span<const PredictionRegion> regions) {
  if (regions.empty()) throw ValidationError("efficiency: empty input");
  const auto singles = std::count_if(regions.begin(), regions.end(),
                                     [](PredictionRegion r) { return r.is_singleton(); });
  return detail::ratio(static_cast<std::size_t>(singles), regions.size());
}

enum class BothScoring : std::uint8_t { AsCorrect, AsError };

// Empty is always an error. AsCorrect counts Both as a hit.
inline double scored_accuracy(BothScoring mode, std::span<const PredictionRegion> regions,
                              std::span<const Label> truths) {
  const auto c = count_regions(regions, truths);
  const std::size_t hits = mode == BothScoring::AsCorrect ? c.correct_single + c.both : c.correct_single;
  return detail::ratio(hits, c.total());
}

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct BinaryMetrics {
  ConfusionCounts counts;
  double accuracy = 0.0;
  double misclassification_error = 0.0;
  std::optional<double> sensitivity;  // absent without true positives + false negatives
  std::optional<double> specificity;  // absent without true negatives + false positives
};

inline BinaryMetrics metrics_from_counts(const ConfusionCounts& c) {
  const std::size_t n = c.total();
  if (n == 0) throw ValidationError("binary metrics: empty input");
  BinaryMetrics m;
  m.counts = c;
  m.accuracy = detail::ratio(c.tp + c.tn, n);
  m.misclassification_error = detail::ratio(c.fp + c.fn, n);
  m.sensitivity = detail::ratio_or_absent(c.tp, c.tp + c.fn);
  m.specificity = detail::ratio_or_absent(c.tn, c.tn + c.fp);
  return m;
}

inline ConfusionCounts confusion(std::span<const Label> predicted, std::span<const Label> truths) {
  detail::check_lengths(predicted.size(), truths.size(), "confusion matrix");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred_pos = predicted[i] == Label::Positive;
    const bool true_pos = truths[i] == Label::Positive;
    if (pred_pos && true_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (true_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

// Predicted Positive iff s_pos >= threshold.
inline BinaryMetrics binary_metrics(std::span<const ScorePair> scores, std::span<const Label> truths,
                                    double threshold = 0.5) {
  detail::check_lengths(scores.size(), truths.size(), "binary metrics");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ValidationError("threshold must lie in [0,1]");
  }
  std::vector<Label> predicted;
  predicted.reserve(scores.size());
  for (const auto& s : scores) {
    if (s.kind != ScoreKind::Probability) {
      throw ValidationError("binary metrics require probability-type scores");
    }
    predicted.push_back(s.s_pos >= threshold ? Label::Positive : Label::Negative);
  }
  return metrics_from_counts(confusion(predicted, truths));
}

// Mann-Whitney AUROC: (wins + 0.5 ties) / (n_pos * n_neg), from mid-ranks.
inline double auroc(std::span<const double> ranking_scores, std::span<const Label> truths) {
  detail::check_lengths(ranking_scores.size(), truths.size(), "auroc");
  const std::size_t n = ranking_scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ranking_scores[a] < ranking_scores[b]; });

  // Doubled ranks keep mid-ranks integral.
  std::size_t n_pos = 0;
  std::size_t twice_rank_sum_pos = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && ranking_scores[order[end]] == ranking_scores[order[start]]) ++end;
    const std::size_t twice_mid_rank = start + 1 + end;  // (start+1) + end
    for (std::size_t i = start; i < end; ++i) {
      if (truths[order[i]] == Label::Positive) {
        ++n_pos;
        twice_rank_sum_pos += twice_mid_rank;
      }
    }
    start = end;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("auroc requires at least one positive and one negative sample");
  }
  // 2U = 2R - n_pos (n_pos + 1) = 2 wins + ties.
  const std::size_t twice_u = twice_rank_sum_pos - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double auroc(std::span<const ScorePair> scores, std::span<const Label> truths) {
  std::vector<double> s_pos;
  s_pos.reserve(scores.size());
  for (const auto& s : scores) s_pos.push_back(s.s_pos);
  return auroc(s_pos, truths);
}

// Ranking score used for threshold-free metrics: s_pos for probability
// pairs, s_pos - s_neg for conformity pairs. The two agree in ordering on
// probability pairs since s_pos - s_neg = 2 s_pos - 1.
inline double decision_score(const ScorePair& s) noexcept {
  return s.kind == ScoreKind::Probability ? s.s_pos : s.s_pos - s.s_neg;
}

// Point prediction from a score pair: s_pos >= 0.5 for probabilities, the
// larger conformity score otherwise (ties to Positive).
inline Label point_prediction(const ScorePair& s) noexcept {
  if (s.kind == ScoreKind::Probability) return s.s_pos >= 0.5 ? Label::Positive : Label::Negative;
  return s.s_pos >= s.s_neg ? Label::Positive : Label::Negative;
}

struct BinaryPanel {
  double accuracy = 0.0;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> auroc;  // absent for single-class input
};

// Point-prediction quality of a score set at the 0.5 threshold.
inline BinaryPanel binary_panel(std::span<const ScorePair> scores, std::span<const Label> truths) {
  detail::check_lengths(scores.size(), truths.size(), "binary panel");
  std::vector<Label> predicted;
  std::vector<double> ranking;
  predicted.reserve(scores.size());
  ranking.reserve(scores.size());
  for (const auto& s : scores) {
    predicted.push_back(point_prediction(s));
    ranking.push_back(decision_score(s));
  }
  const auto m = metrics_from_counts(confusion(predicted, truths));
  BinaryPanel panel{m.accuracy, m.sensitivity, m.specificity, std::nullopt};
  if (m.sensitivity && m.specificity) panel.auroc = auroc(ranking, truths);
  return panel;
}

struct CalibrationReport {
  std::optional<double> auroc;
  double accuracy = 0.0;
  std::size_t n = 0;
};

// AUROC and 0.5-threshold accuracy of the scores on the calibration set.
inline CalibrationReport calibration_report(const Dataset& calibration) {
  if (calibration.empty()) throw ValidationError("calibration report: empty calibration set");
  std::vector<ScorePair> scores;
  std::vector<Label> truths;
  for (const auto& s : calibration.samples) {
    if (!s.scores) throw ValidationError("calibration sample '" + s.id + "' has no scores");
    if (!s.true_label) throw ValidationError("calibration sample '" + s.id + "' has no label");
    scores.push_back(*s.scores);
    truths.push_back(*s.true_label);
  }
  const auto panel = binary_panel(scores, truths);
  return {panel.auroc, panel.accuracy, calibration.size()};
}

struct SingletonConditional {
  std::size_t n_singleton = 0;
  std::size_t false_positives_in_singletons = 0;
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> auroc;
};

// Metrics restricted to samples whose region is a singleton; the singleton
// is the predicted label. Rates are absent when undefined.
inline SingletonConditional conditional_singleton_metrics(std::span<const PredictionRegion> regions,
                                                          std::span<const ScorePair> scores,
                                                          std::span<const Label> truths) {
  if (regions.size() != scores.size() || regions.size() != truths.size()) {
    throw ValidationError("singleton metrics: length mismatch");
  }
  SingletonConditional out;
  std::vector<Label> predicted, truth_subset;
  std::vector<double> ranking;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!regions[i].is_singleton()) continue;
    const Label pred = regions[i].singleton_label();
    predicted.push_back(pred);
    truth_subset.push_back(truths[i]);
    ranking.push_back(decision_score(scores[i]));
    if (pred == Label::Positive && truths[i] == Label::Negative) ++out.false_positives_in_singletons;
  }
  out.n_singleton = predicted.size();
  if (out.n_singleton == 0) return out;
  const auto m = metrics_from_counts(confusion(predicted, truth_subset));
  out.accuracy = m.accuracy;
  out.sensitivity = m.sensitivity;
  out.specificity = m.specificity;
  if (m.sensitivity && m.specificity) out.auroc = auroc(ranking, truth_subset);
  return out;
}

struct EvaluationReport {
  double epsilon = 0.0;
  double confidence = 100.0;
  std::size_t n = 0;
  double validity = 0.0;
  double efficiency = 0.0;
  RegionCounts counts;
  RegionDistribution distribution;
  double scored_accuracy_both_correct = 0.0;
  double scored_accuracy_both_wrong = 0.0;
  BinaryPanel binary;
  SingletonConditional singleton_conditional;
};

inline EvaluationReport evaluate(std::span<const PredictionRegion> regions,
                                 std::span<const ScorePair> scores, std::span<const Label> truths,
                                 SignificanceLevel eps) {
  if (regions.size() != scores.size()) throw ValidationError("evaluate: length mismatch");
  EvaluationReport r;
  r.epsilon = eps.epsilon();
  r.confidence = eps.confidence_percent();
  r.counts = count_regions(regions, truths);
  r.n = r.counts.total();
  r.distribution = to_distribution(r.counts);
  r.validity = validity(regions, truths);
  r.efficiency = efficiency(regions);
  r.scored_accuracy_both_correct = scored_accuracy(BothScoring::AsCorrect, regions, truths);
  r.scored_accuracy_both_wrong = scored_accuracy(BothScoring::AsError, regions, truths);
  r.binary = binary_panel(scores, truths);
  r.singleton_conditional = conditional_singleton_metrics(regions, scores, truths);
  return r;
}

}  // namespace confbin
