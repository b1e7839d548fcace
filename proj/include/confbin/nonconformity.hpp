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

// Score producers. Two families: the nearest-neighbour distance ratio
// (same-label distance over other-label distance, negated into a conformity
// score) and probability conformity (the model's probability for the
// hypothesized class, e.g. a forest vote fraction).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "confbin/core.hpp"

namespace confbin {

enum class Metric : std::uint8_t { Euclidean };

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

// Labelled feature vectors stored row-major.
class TrainingBag {
 public:
  TrainingBag() = default;
  explicit TrainingBag(std::size_t dim, Metric metric = Metric::Euclidean)
      : dim_(dim), metric_(metric) {}

  TrainingBag(const std::vector<std::pair<FeatureVector, Label>>& samples,
              Metric metric = Metric::Euclidean)
      : metric_(metric) {
    if (samples.empty()) throw ValidationError("training bag must not be empty");
    dim_ = samples.front().first.size();
    for (const auto& [x, y] : samples) add(x, y);
  }

  // Every sample must carry features and a label.
  static TrainingBag from_dataset(const Dataset& data) {
    if (data.empty()) throw ValidationError("training bag must not be empty");
    if (!data.feature_dim) throw ValidationError("training data has no features");
    TrainingBag bag(*data.feature_dim);
    for (const auto& s : data.samples) {
      if (!s.features) throw ValidationError("training sample '" + s.id + "' has no features");
      if (!s.true_label) throw ValidationError("training sample '" + s.id + "' has no label");
      bag.add(*s.features, *s.true_label);
    }
    return bag;
  }

  void add(std::span<const double> point, Label label) {
    if (point.size() != dim_) {
      throw ValidationError("dimension mismatch: bag has " + std::to_string(dim_) +
                            ", point has " + std::to_string(point.size()));
    }
    for (double v : point) {
      if (!std::isfinite(v)) throw ValidationError("feature values must be finite");
    }
    coords_.insert(coords_.end(), point.begin(), point.end());
    labels_.push_back(label);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  Metric metric() const noexcept { return metric_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const noexcept { return labels_[i]; }

  double distance(std::size_t i, std::span<const double> x) const noexcept {
    return euclidean_distance(point(i), x);
  }

  TrainingBag with_labels_flipped() const {
    TrainingBag out = *this;
    for (auto& y : out.labels_) y = flip(y);
    return out;
  }

 private:
  std::size_t dim_ = 0;
  Metric metric_ = Metric::Euclidean;
  std::vector<double> coords_;
  std::vector<Label> labels_;
};

// The k smallest values seen so far, kept sorted ascending.
class KSmallest {
 public:
  explicit KSmallest(std::size_t k) : k_(k) { values_.reserve(k); }

  void insert(double v) {
    if (k_ == 0 || (values_.size() == k_ && !(v < values_.back()))) return;
    if (values_.size() == k_) values_.pop_back();
    values_.insert(std::upper_bound(values_.begin(), values_.end(), v), v);
  }

  bool empty() const noexcept { return values_.empty(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  // Mean of the retained values, summed in ascending order.
  std::optional<double> mean() const noexcept {
    if (values_.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
  }

  // Mean after a hypothetical insertion of `extra`, without mutating.
  std::optional<double> mean_with(double extra) const noexcept {
    double sum = 0.0;
    std::size_t used = 0;
    bool placed = false;
    for (double v : values_) {
      if (used == k_) break;
      if (!placed && extra < v) {
        sum += extra;
        ++used;
        placed = true;
        if (used == k_) break;
      }
      sum += v;
      ++used;
    }
    if (!placed && used < k_) {
      sum += extra;
      ++used;
    }
    return sum / static_cast<double>(used);
  }

 private:
  std::size_t k_;
  std::vector<double> values_;
};

// Nonconformity alpha >= 0, +inf allowed. Degenerate cases follow the
// monotone limits of the ratio:
//   same = 0, other > 0   -> 0
//   other = 0, same > 0   -> +inf
//   same = other = 0      -> 1
//   no same-label member  -> +inf
//   no other-label member -> 0
inline double ratio_from_distances(std::optional<double> same, std::optional<double> other) noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!same) return inf;
  if (!other) return 0.0;
  if (*same == 0.0 && *other == 0.0) return 1.0;
  if (*other == 0.0) return inf;
  return *same / *other;
}

struct NeighbourSummary {
  KSmallest same;
  KSmallest other;
};

// Collects the k smallest same-label and other-label distances from `point`
// to the bag, skipping index `exclude` when given.
inline NeighbourSummary summarize_neighbours(const TrainingBag& bag, std::span<const double> point,
                                             Label hypothesized, std::size_t k,
                                             std::optional<std::size_t> exclude = std::nullopt) {
  NeighbourSummary out{KSmallest(k), KSmallest(k)};
  for (std::size_t i = 0; i < bag.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const double d = bag.distance(i, point);
    (bag.label(i) == hypothesized ? out.same : out.other).insert(d);
  }
  return out;
}

// alpha = mean of the k nearest same-label distances divided by the mean of
// the k nearest other-label distances (fewer than k available: mean of what
// exists). k = 1 is the plain nearest-neighbour ratio.
inline double knn_distance_ratio(const TrainingBag& bag, std::span<const double> point,
                                 Label hypothesized, std::size_t k = 1,
                                 std::optional<std::size_t> exclude = std::nullopt) {
  if (bag.empty()) throw ValidationError("training bag must not be empty");
  if (k == 0) throw ValidationError("k must be positive");
  if (point.size() != bag.dim()) {
    throw ValidationError("dimension mismatch: bag has " + std::to_string(bag.dim()) +
                          ", point has " + std::to_string(point.size()));
  }
  const auto nb = summarize_neighbours(bag, point, hypothesized, k, exclude);
  return ratio_from_distances(nb.same.mean(), nb.other.mean());
}

constexpr double conformity_from_ratio(double alpha) noexcept { return -alpha; }

inline double probability_conformity(const ScorePair& scores, Label hypothesized) {
  if (scores.kind != ScoreKind::Probability) {
    throw ValidationError("probability conformity requires probability-type scores");
  }
  return scores.for_label(hypothesized);
}

// Fraction of Positive labels among the k nearest bag members. Distance ties
// resolve by ascending bag index.
inline ScorePair knn_probability_scores(const TrainingBag& bag, std::span<const double> point,
                                        std::size_t k) {
  if (k == 0 || k > bag.size()) {
    throw ValidationError("k must lie in [1, " + std::to_string(bag.size()) + "], got " +
                          std::to_string(k));
  }
  if (point.size() != bag.dim()) {
    throw ValidationError("dimension mismatch: bag has " + std::to_string(bag.dim()) +
                          ", point has " + std::to_string(point.size()));
  }
  std::vector<std::pair<double, std::size_t>> order(bag.size());
  for (std::size_t i = 0; i < bag.size(); ++i) order[i] = {bag.distance(i, point), i};
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < k; ++i) {
    positives += bag.label(order[i].second) == Label::Positive ? 1 : 0;
  }
  const double s_pos = static_cast<double>(positives) / static_cast<double>(k);
  return {s_pos, 1.0 - s_pos, ScoreKind::Probability};
}

struct KnnRatioMeasure {
  std::size_t k = 1;
  friend bool operator==(const KnnRatioMeasure&, const KnnRatioMeasure&) = default;
};
struct KnnProbabilityMeasure {
  std::size_t k = 5;
  friend bool operator==(const KnnProbabilityMeasure&, const KnnProbabilityMeasure&) = default;
};
struct PassthroughMeasure {
  friend bool operator==(const PassthroughMeasure&, const PassthroughMeasure&) = default;
};

using Measure = std::variant<KnnRatioMeasure, KnnProbabilityMeasure, PassthroughMeasure>;

inline std::string describe(const Measure& measure) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KnnRatioMeasure>) {
          return "knn_ratio(k=" + std::to_string(m.k) + ")";
        } else if constexpr (std::is_same_v<M, KnnProbabilityMeasure>) {
          return "knn_prob(k=" + std::to_string(m.k) + ")";
        } else {
          return "passthrough";
        }
      },
      measure);
}

inline bool is_feature_based(const Measure& measure) noexcept {
  return !std::holds_alternative<PassthroughMeasure>(measure);
}

// Returns a copy of `data` in which every sample carries a ScorePair under
// `measure`. The bag is only consulted by feature-based measures.
inline Dataset score_dataset(const Measure& measure, const TrainingBag* bag, const Dataset& data) {
  Dataset out = data;
  if (is_feature_based(measure) && !data.empty() && (bag == nullptr || bag->empty())) {
    throw ValidationError("feature-based measure " + describe(measure) +
                          " requires a nonempty training bag");
  }
  for (auto& s : out.samples) {
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PassthroughMeasure>) {
            if (!s.scores) {
              throw ValidationError("passthrough measure: sample '" + s.id + "' has no scores");
            }
          } else {
            if (!s.features) {
              throw ValidationError(describe(measure) + ": sample '" + s.id + "' has no features");
            }
            if constexpr (std::is_same_v<M, KnnRatioMeasure>) {
              const double a_pos = knn_distance_ratio(*bag, *s.features, Label::Positive, m.k);
              const double a_neg = knn_distance_ratio(*bag, *s.features, Label::Negative, m.k);
              s.scores = ScorePair{conformity_from_ratio(a_pos), conformity_from_ratio(a_neg),
                                   ScoreKind::Conformity};
            } else {
              s.scores = knn_probability_scores(*bag, *s.features, m.k);
            }
          }
        },
        measure);
  }
  return out;
}

}  // namespace confbin
