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

// Inductive and Mondrian conformal prediction: proper/calibration split,
// calibration tables, p-values and four-outcome prediction regions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "confbin/core.hpp"
#include "confbin/random.hpp"

namespace confbin {

struct SplitConfig {
  double proper_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct SplitResult {
  Dataset proper;
  Dataset calibration;
};

namespace detail {

inline std::size_t rounded_share(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

inline Dataset subset(const Dataset& data, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Dataset out;
  out.feature_dim = data.feature_dim;
  out.samples.reserve(indices.size());
  for (auto i : indices) out.samples.push_back(data.samples[i]);
  return out;
}

}  // namespace detail

// Random partition into proper-training and calibration parts.
// |proper| = floor(fraction * N + 0.5), nudged by one when a part would be
// empty. Stratified mode applies the same rounding per class. Each part keeps
// the input's relative order.
inline SplitResult split_dataset(const Dataset& data, const SplitConfig& config) {
  if (!(config.proper_fraction > 0.0 && config.proper_fraction < 1.0)) {
    throw ValidationError("proper fraction must lie in (0,1)");
  }
  if (data.size() < 2) throw ValidationError("dataset too small to split (need at least 2 samples)");
  require_labels(data, "split");

  Rng rng(config.seed);
  std::vector<std::size_t> proper;
  std::vector<std::size_t> calibration;

  auto take = [&](std::vector<std::size_t> pool, std::size_t n_proper) {
    rng.shuffle(std::span<std::size_t>(pool));
    proper.insert(proper.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_proper));
    calibration.insert(calibration.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_proper),
                       pool.end());
  };

  if (!config.stratified) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::size_t n_proper = detail::rounded_share(config.proper_fraction, data.size());
    n_proper = std::clamp<std::size_t>(n_proper, 1, data.size() - 1);
    take(std::move(all), n_proper);
  } else {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (*data.samples[i].true_label == Label::Positive ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
      throw ValidationError("stratified split requires both classes to be present");
    }
    std::size_t p_pos = detail::rounded_share(config.proper_fraction, pos.size());
    std::size_t p_neg = detail::rounded_share(config.proper_fraction, neg.size());
    // Keep both parts nonempty; move one sample from whichever class has room.
    if (p_pos + p_neg == 0) {
      (pos.size() >= neg.size() ? p_pos : p_neg) = 1;
    } else if (p_pos + p_neg == data.size()) {
      (pos.size() >= neg.size() ? p_pos : p_neg) -= 1;
    }
    take(std::move(pos), p_pos);
    take(std::move(neg), p_neg);
  }
  return {detail::subset(data, std::move(proper)), detail::subset(data, std::move(calibration))};
}

// Per-class sorted conformity scores. In pooled (non-Mondrian) mode both
// lists hold the same merged scores.
class CalibrationTable {
 public:
  CalibrationTable(std::vector<double> pos_scores, std::vector<double> neg_scores, bool mondrian)
      : pos_(std::move(pos_scores)), neg_(std::move(neg_scores)), mondrian_(mondrian) {
    std::sort(pos_.begin(), pos_.end());
    std::sort(neg_.begin(), neg_.end());
    if (mondrian_ && (pos_.empty() || neg_.empty())) {
      throw ValidationError("Mondrian calibration requires at least one sample of each class");
    }
    if (!mondrian_ && pos_.empty()) {
      throw ValidationError("calibration set must not be empty");
    }
    for (double v : pos_) check_score(v);
    for (double v : neg_) check_score(v);
  }

  std::span<const double> scores(Label label) const noexcept {
    return label == Label::Positive ? std::span<const double>(pos_) : std::span<const double>(neg_);
  }
  std::span<const double> pos_scores() const noexcept { return pos_; }
  std::span<const double> neg_scores() const noexcept { return neg_; }
  bool mondrian() const noexcept { return mondrian_; }

  friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;

 private:
  static void check_score(double v) {
    if (std::isnan(v) || v == HUGE_VAL) {
      throw ValidationError("calibration scores must not be NaN or +inf");
    }
  }

  std::vector<double> pos_;
  std::vector<double> neg_;
  bool mondrian_;
};

// Mondrian: each class list holds the conformity score of its own true label.
// Pooled: every sample contributes the score of its true label to one list.
inline CalibrationTable build_calibration_table(const Dataset& calibration, bool mondrian = true) {
  std::vector<double> pos, neg;
  for (const auto& s : calibration.samples) {
    if (!s.true_label) throw ValidationError("calibration sample '" + s.id + "' has no label");
    if (!s.scores) throw ValidationError("calibration sample '" + s.id + "' has no scores");
    const double score = s.scores->for_label(*s.true_label);
    (*s.true_label == Label::Positive ? pos : neg).push_back(score);
  }
  if (mondrian) return CalibrationTable(std::move(pos), std::move(neg), true);
  std::vector<double> pooled = std::move(pos);
  pooled.insert(pooled.end(), neg.begin(), neg.end());
  return CalibrationTable(pooled, pooled, false);
}

struct PValuePair {
  double p_pos = 1.0;
  double p_neg = 1.0;

  double for_label(Label label) const noexcept { return label == Label::Positive ? p_pos : p_neg; }
  friend bool operator==(const PValuePair&, const PValuePair&) = default;
};

// p_y = (#{c in class-y scores : c <= s_y} + 1) / (n_y + 1).
inline double p_value(std::span<const double> sorted_scores, double score) noexcept {
  const auto at_most = static_cast<double>(
      std::upper_bound(sorted_scores.begin(), sorted_scores.end(), score) - sorted_scores.begin());
  return (at_most + 1.0) / (static_cast<double>(sorted_scores.size()) + 1.0);
}

inline PValuePair p_values(const CalibrationTable& table, const ScorePair& scores) noexcept {
  return {p_value(table.pos_scores(), scores.s_pos), p_value(table.neg_scores(), scores.s_neg)};
}

// Smoothed variant: ties with the test score (including the test sample
// itself) receive a uniform random share, p = (#{c < s} + U * (#{c == s} + 1)) / (n + 1).
inline double smoothed_p_value(std::span<const double> sorted_scores, double score, Rng& rng) {
  const auto lo = std::lower_bound(sorted_scores.begin(), sorted_scores.end(), score);
  const auto hi = std::upper_bound(lo, sorted_scores.end(), score);
  const auto below = static_cast<double>(lo - sorted_scores.begin());
  const auto ties = static_cast<double>(hi - lo);
  return (below + rng.uniform_open() * (ties + 1.0)) /
         (static_cast<double>(sorted_scores.size()) + 1.0);
}

inline PValuePair smoothed_p_values(const CalibrationTable& table, const ScorePair& scores, Rng& rng) {
  const double p_pos = smoothed_p_value(table.pos_scores(), scores.s_pos, rng);
  const double p_neg = smoothed_p_value(table.neg_scores(), scores.s_neg, rng);
  return {p_pos, p_neg};
}

// A label enters the region iff its p-value strictly exceeds epsilon.
inline PredictionRegion region(const PValuePair& p, SignificanceLevel eps) noexcept {
  return PredictionRegion::from_inclusion(p.p_pos > eps.epsilon(), p.p_neg > eps.epsilon());
}

struct Prediction {
  std::string id;
  PValuePair p;
  PredictionRegion region;
};

struct PredictOptions {
  bool smoothed = false;
  std::uint64_t smoothing_seed = 0;
};

inline std::vector<Prediction> predict_set(const CalibrationTable& table, const Dataset& tests,
                                           SignificanceLevel eps, const PredictOptions& options = {}) {
  std::vector<Prediction> out;
  out.reserve(tests.size());
  Rng rng(options.smoothing_seed);
  for (const auto& s : tests.samples) {
    if (!s.scores) throw ValidationError("test sample '" + s.id + "' has no scores");
    const PValuePair p =
        options.smoothed ? smoothed_p_values(table, *s.scores, rng) : p_values(table, *s.scores);
    out.push_back({s.id, p, region(p, eps)});
  }
  return out;
}

}  // namespace confbin
