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

// Domain types shared by the conformal engine, the scorers and the metric
// suite. Everything here is a plain value type.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace confbin {

// Raised when an input violates a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

constexpr Label flip(Label label) noexcept {
  return label == Label::Positive ? Label::Negative : Label::Positive;
}

constexpr std::string_view to_string(Label label) noexcept {
  return label == Label::Positive ? "positive" : "negative";
}

using FeatureVector = std::vector<double>;

// Probability scores come from a fitted model (class probabilities or forest
// vote fractions); conformity scores are any other "higher is more typical"
// quantity, e.g. a negated distance ratio.
enum class ScoreKind : std::uint8_t { Probability, Conformity };

inline constexpr double kProbabilitySumTolerance = 1e-9;

struct ScorePair {
  double s_pos = 0.0;
  double s_neg = 0.0;
  ScoreKind kind = ScoreKind::Conformity;

  double for_label(Label label) const noexcept {
    return label == Label::Positive ? s_pos : s_neg;
  }

  ScorePair swapped() const noexcept { return {s_neg, s_pos, kind}; }

  friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

inline ScorePair make_probability_pair(double s_pos, double s_neg) {
  if (!std::isfinite(s_pos) || !std::isfinite(s_neg) || s_pos < 0.0 ||
      s_pos > 1.0 || s_neg < 0.0 || s_neg > 1.0 ||
      std::abs(s_pos + s_neg - 1.0) > kProbabilitySumTolerance) {
    throw ValidationError("probability scores must lie in [0,1] and sum to 1 (got s_pos=" +
                          std::to_string(s_pos) + ", s_neg=" + std::to_string(s_neg) + ")");
  }
  return {s_pos, s_neg, ScoreKind::Probability};
}

// Conformity scores may be -inf (maximally nonconforming) but never NaN.
inline ScorePair make_conformity_pair(double s_pos, double s_neg) {
  if (std::isnan(s_pos) || std::isnan(s_neg) || s_pos == HUGE_VAL || s_neg == HUGE_VAL) {
    throw ValidationError("conformity scores must not be NaN or +inf");
  }
  return {s_pos, s_neg, ScoreKind::Conformity};
}

// Significance level epsilon in [0,1]. The engine works in epsilon; the
// "N% confidence" rendering is 100 * (1 - epsilon).
class SignificanceLevel {
 public:
  explicit SignificanceLevel(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw ValidationError("significance level must lie in [0,1], got " + std::to_string(epsilon));
    }
  }

  double epsilon() const noexcept { return epsilon_; }

  // Percent confidence. Values representable with at most six decimal
  // digits of epsilon are rendered exactly (nearest double to the decimal).
  double confidence_percent() const noexcept {
    const double scaled = epsilon_ * 1e6;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) < 1e-6) {
      return (1e6 - rounded) / 1e4;
    }
    return 100.0 * (1.0 - epsilon_);
  }

  friend bool operator==(const SignificanceLevel&, const SignificanceLevel&) = default;

 private:
  double epsilon_;
};

// 95 -> 0.05, 86 -> 0.14. Inputs with up to four decimal digits map to the
// double nearest the decimal complement, so 86 gives exactly the literal 0.14.
inline SignificanceLevel confidence_to_epsilon(double confidence_percent) {
  if (!(confidence_percent >= 0.0 && confidence_percent <= 100.0)) {
    throw ValidationError("confidence must lie in [0,100], got " +
                          std::to_string(confidence_percent));
  }
  const double scaled = confidence_percent * 1e4;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) < 1e-6) {
    return SignificanceLevel((1e6 - rounded) / 1e6);
  }
  return SignificanceLevel(1.0 - confidence_percent / 100.0);
}

enum class RegionKind : std::uint8_t { SinglePositive, SingleNegative, Both, Empty };

class PredictionRegion {
 public:
  constexpr PredictionRegion() = default;
  constexpr explicit PredictionRegion(RegionKind kind) : kind_(kind) {}

  static constexpr PredictionRegion from_inclusion(bool has_pos, bool has_neg) {
    if (has_pos && has_neg) return PredictionRegion(RegionKind::Both);
    if (has_pos) return PredictionRegion(RegionKind::SinglePositive);
    if (has_neg) return PredictionRegion(RegionKind::SingleNegative);
    return PredictionRegion(RegionKind::Empty);
  }

  static constexpr PredictionRegion single(Label label) {
    return PredictionRegion(label == Label::Positive ? RegionKind::SinglePositive
                                                     : RegionKind::SingleNegative);
  }

  constexpr RegionKind kind() const noexcept { return kind_; }

  constexpr bool contains(Label label) const noexcept {
    switch (kind_) {
      case RegionKind::Both: return true;
      case RegionKind::Empty: return false;
      case RegionKind::SinglePositive: return label == Label::Positive;
      case RegionKind::SingleNegative: return label == Label::Negative;
    }
    return false;
  }

  constexpr bool is_singleton() const noexcept {
    return kind_ == RegionKind::SinglePositive || kind_ == RegionKind::SingleNegative;
  }

  // Only meaningful for singletons.
  constexpr Label singleton_label() const noexcept {
    return kind_ == RegionKind::SinglePositive ? Label::Positive : Label::Negative;
  }

  // Set inclusion: this ⊆ other.
  constexpr bool subset_of(PredictionRegion other) const noexcept {
    return (!contains(Label::Positive) || other.contains(Label::Positive)) &&
           (!contains(Label::Negative) || other.contains(Label::Negative));
  }

  friend constexpr bool operator==(PredictionRegion, PredictionRegion) = default;

 private:
  RegionKind kind_ = RegionKind::Empty;
};

constexpr bool region_contains(PredictionRegion region, Label label) noexcept {
  return region.contains(label);
}

constexpr std::string_view to_string(RegionKind kind) noexcept {
  switch (kind) {
    case RegionKind::SinglePositive: return "positive";
    case RegionKind::SingleNegative: return "negative";
    case RegionKind::Both: return "both";
    case RegionKind::Empty: return "empty";
  }
  return "empty";
}

inline std::optional<RegionKind> region_kind_from_string(std::string_view text) {
  if (text == "positive") return RegionKind::SinglePositive;
  if (text == "negative") return RegionKind::SingleNegative;
  if (text == "both") return RegionKind::Both;
  if (text == "empty") return RegionKind::Empty;
  return std::nullopt;
}

struct Sample {
  std::string id;
  std::optional<FeatureVector> features;
  std::optional<ScorePair> scores;
  std::optional<Label> true_label;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::optional<std::size_t> feature_dim;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  std::size_t count(Label label) const noexcept {
    std::size_t n = 0;
    for (const auto& s : samples) n += (s.true_label == label) ? 1 : 0;
    return n;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Checks the dataset invariants: unique ids, at least one of features and
// scores per sample, finite features of the declared dimension.
inline void validate(const Dataset& data) {
  std::unordered_set<std::string> ids;
  ids.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    if (!ids.insert(s.id).second) {
      throw ValidationError("duplicate sample id '" + s.id + "'");
    }
    if (!s.features && !s.scores) {
      throw ValidationError("sample '" + s.id + "' has neither features nor scores");
    }
    if (s.features) {
      if (!data.feature_dim || s.features->size() != *data.feature_dim) {
        throw ValidationError("sample '" + s.id + "' has feature dimension " +
                              std::to_string(s.features->size()) +
                              " inconsistent with the dataset");
      }
      for (double v : *s.features) {
        if (!std::isfinite(v)) {
          throw ValidationError("sample '" + s.id + "' has a non-finite feature value");
        }
      }
    }
  }
}

inline void require_labels(const Dataset& data, std::string_view what) {
  for (const auto& s : data.samples) {
    if (!s.true_label) {
      throw ValidationError(std::string(what) + ": sample '" + s.id + "' has no label");
    }
  }
}

}  // namespace confbin
