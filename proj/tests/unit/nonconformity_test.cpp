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

#include "confbin/nonconformity.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "confbin/random.hpp"
#include "support/oracles.hpp"

namespace confbin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TrainingBag bag_1d(const std::vector<std::pair<double, Label>>& points) {
  std::vector<std::pair<FeatureVector, Label>> rows;
  for (const auto& [x, y] : points) rows.push_back({FeatureVector{x}, y});
  return TrainingBag(rows);
}

double ratio_at(const TrainingBag& bag, double x, Label y, std::size_t k = 1) {
  const FeatureVector p{x};
  return knn_distance_ratio(bag, p, y, k);
}

TEST(KnnDistanceRatio, Examples) {
  const auto two = bag_1d({{0.0, Label::Negative}, {2.0, Label::Positive}});
  EXPECT_EQ(ratio_at(two, 1.0, Label::Negative), 1.0);
  EXPECT_EQ(ratio_at(two, 0.0, Label::Negative), 0.0);

  // Same-label (Positive at 10) is 6 away, other-label (Negative at 1) is 3.
  const auto three = bag_1d({{0.0, Label::Negative}, {1.0, Label::Negative}, {10.0, Label::Positive}});
  EXPECT_EQ(ratio_at(three, 4.0, Label::Positive), 2.0);
  EXPECT_EQ(ratio_at(three, 4.0, Label::Negative), 0.5);
}

TEST(KnnDistanceRatio, DegenerateCases) {
  const auto two = bag_1d({{0.0, Label::Negative}, {2.0, Label::Positive}});
  // Sitting on an other-label point with the same label further away.
  EXPECT_EQ(ratio_at(two, 2.0, Label::Negative), kInf);
  // Same and other label both at distance zero.
  const auto stacked = bag_1d({{1.0, Label::Negative}, {1.0, Label::Positive}});
  EXPECT_EQ(ratio_at(stacked, 1.0, Label::Negative), 1.0);
  // Missing classes.
  const auto only_neg = bag_1d({{0.0, Label::Negative}, {3.0, Label::Negative}});
  EXPECT_EQ(ratio_at(only_neg, 1.0, Label::Positive), kInf);
  EXPECT_EQ(ratio_at(only_neg, 1.0, Label::Negative), 0.0);
}

TEST(KnnDistanceRatio, Errors) {
  const auto two = bag_1d({{0.0, Label::Negative}, {2.0, Label::Positive}});
  const FeatureVector p2{1.0, 1.0};
  EXPECT_THROW(knn_distance_ratio(two, p2, Label::Negative), ValidationError);
  const TrainingBag empty(1);
  const FeatureVector p1{1.0};
  EXPECT_THROW(knn_distance_ratio(empty, p1, Label::Negative), ValidationError);
  EXPECT_THROW(TrainingBag(std::vector<std::pair<FeatureVector, Label>>{}), ValidationError);
}

TEST(KnnDistanceRatio, MeanOfKNearest) {
  // Negatives at 0, 1, 2; positives at 10, 14; point 4.
  const auto bag = bag_1d({{0.0, Label::Negative},
                           {1.0, Label::Negative},
                           {2.0, Label::Negative},
                           {10.0, Label::Positive},
                           {14.0, Label::Positive}});
  // k=2, hypothesized Negative: same (2+3)/2 = 2.5, other (6+10)/2 = 8.
  EXPECT_DOUBLE_EQ(ratio_at(bag, 4.0, Label::Negative, 2), 2.5 / 8.0);
  // k=3 with only two positives available: the mean uses what exists.
  EXPECT_DOUBLE_EQ(ratio_at(bag, 4.0, Label::Positive, 3), 8.0 / 3.0);
}

TEST(KnnDistanceRatio, MatchesDirectScanOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, Label>> pts;
    const std::size_t n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid to force exact ties and zero distances.
      pts.push_back({static_cast<double>(rng.below(7)), rng.below(2) ? Label::Positive : Label::Negative});
    }
    const auto bag = bag_1d(pts);
    const double x = static_cast<double>(rng.below(7));
    for (Label y : {Label::Positive, Label::Negative}) {
      EXPECT_EQ(ratio_at(bag, x, y), oracle::ratio_1d(pts, x, y));
    }
  }
}

TEST(KnnDistanceRatio, ScaleAndTranslationInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<FeatureVector, Label>> rows, scaled, shifted;
    const double c = 0.25 + 8.0 * rng.uniform();
    const double shift = 16.0 * rng.uniform() - 8.0;
    for (int i = 0; i < 12; ++i) {
      FeatureVector x{rng.normal(), rng.normal()};
      const Label y = i % 3 == 0 ? Label::Positive : Label::Negative;
      rows.push_back({x, y});
      scaled.push_back({{c * x[0], c * x[1]}, y});
      shifted.push_back({{x[0] + shift, x[1] + shift}, y});
    }
    const TrainingBag a(rows), b(scaled), t(shifted);
    const FeatureVector q{rng.normal(), rng.normal()};
    const FeatureVector qs{c * q[0], c * q[1]};
    const FeatureVector qt{q[0] + shift, q[1] + shift};
    for (Label y : {Label::Positive, Label::Negative}) {
      const double base = knn_distance_ratio(a, q, y);
      EXPECT_NEAR(knn_distance_ratio(b, qs, y), base, 1e-9 * (1.0 + base));
      EXPECT_NEAR(knn_distance_ratio(t, qt, y), base, 1e-9 * (1.0 + base));
    }
  }
}

TEST(KnnDistanceRatio, SwappingBagLabelsSwapsAlphas) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<FeatureVector, Label>> rows;
    for (int i = 0; i < 8; ++i) {
      rows.push_back({{rng.normal(), rng.normal(), rng.normal()},
                      rng.below(2) ? Label::Positive : Label::Negative});
    }
    const TrainingBag bag(rows);
    const auto flipped = bag.with_labels_flipped();
    const FeatureVector q{rng.normal(), rng.normal(), rng.normal()};
    for (std::size_t k : {1u, 2u, 3u}) {
      EXPECT_EQ(knn_distance_ratio(bag, q, Label::Positive, k),
                knn_distance_ratio(flipped, q, Label::Negative, k));
      EXPECT_EQ(knn_distance_ratio(bag, q, Label::Negative, k),
                knn_distance_ratio(flipped, q, Label::Positive, k));
    }
  }
}

TEST(ConformityFromRatio, Examples) {
  EXPECT_EQ(conformity_from_ratio(0.0), 0.0);
  EXPECT_EQ(conformity_from_ratio(2.0), -2.0);
  EXPECT_EQ(conformity_from_ratio(kInf), -kInf);
  EXPECT_LT(conformity_from_ratio(3.0), conformity_from_ratio(2.5));
}

TEST(ProbabilityConformity, Examples) {
  const auto s = make_probability_pair(0.80, 0.20);
  EXPECT_EQ(probability_conformity(s, Label::Positive), 0.80);
  EXPECT_EQ(probability_conformity(s, Label::Negative), 0.20);
  EXPECT_EQ(probability_conformity(make_probability_pair(0.48, 0.52), Label::Negative), 0.52);
  EXPECT_THROW(probability_conformity(make_conformity_pair(-1.0, -2.0), Label::Positive), ValidationError);
}

TEST(ProbabilityConformity, LabelSymmetry) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform();
    const auto s = make_probability_pair(p, 1.0 - p);
    for (Label y : {Label::Positive, Label::Negative}) {
      EXPECT_EQ(probability_conformity(s.swapped(), flip(y)), probability_conformity(s, y));
    }
  }
}

TEST(KnnProbabilityScores, Examples) {
  const FeatureVector half{0.5};
  const auto a = bag_1d({{0.0, Label::Positive}, {1.0, Label::Positive}, {10.0, Label::Negative}});
  EXPECT_EQ(knn_probability_scores(a, half, 2), (ScorePair{1.0, 0.0, ScoreKind::Probability}));
  const auto b = bag_1d({{0.0, Label::Positive}, {1.0, Label::Negative}});
  EXPECT_EQ(knn_probability_scores(b, half, 2), (ScorePair{0.5, 0.5, ScoreKind::Probability}));
  const auto c = bag_1d({{0.0, Label::Negative}});
  const FeatureVector five{5.0};
  EXPECT_EQ(knn_probability_scores(c, five, 1), (ScorePair{0.0, 1.0, ScoreKind::Probability}));
}

TEST(KnnProbabilityScores, TiesBreakByIndex) {
  // Both neighbours are 1 away; the lower index (Negative) wins for k=1.
  const auto bag = bag_1d({{0.0, Label::Negative}, {2.0, Label::Positive}});
  const FeatureVector mid{1.0};
  EXPECT_EQ(knn_probability_scores(bag, mid, 1).s_pos, 0.0);
  const auto rev = bag_1d({{2.0, Label::Positive}, {0.0, Label::Negative}});
  EXPECT_EQ(knn_probability_scores(rev, mid, 1).s_pos, 1.0);
}

TEST(KnnProbabilityScores, KOutOfRange) {
  const auto bag = bag_1d({{0.0, Label::Negative}});
  const FeatureVector p{1.0};
  EXPECT_THROW(knn_probability_scores(bag, p, 0), ValidationError);
  EXPECT_THROW(knn_probability_scores(bag, p, 2), ValidationError);
}

Dataset features_dataset(const std::vector<double>& xs) {
  Dataset d;
  d.feature_dim = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d.samples.push_back({"q" + std::to_string(i), FeatureVector{xs[i]}, std::nullopt, std::nullopt});
  }
  return d;
}

TEST(ScoreDataset, KnnRatioNegatesBothAlphas) {
  const auto bag = bag_1d({{0.0, Label::Negative}, {1.0, Label::Negative}, {10.0, Label::Positive}});
  const auto input = features_dataset({4.0});
  const auto out = score_dataset(KnnRatioMeasure{1}, &bag, input);
  ASSERT_TRUE(out.samples[0].scores);
  EXPECT_EQ(out.samples[0].scores->s_pos, -2.0);
  EXPECT_EQ(out.samples[0].scores->s_neg, -0.5);
  EXPECT_EQ(out.samples[0].scores->kind, ScoreKind::Conformity);
}

TEST(ScoreDataset, PassthroughIsIdentity) {
  Dataset d;
  d.samples.push_back({"a", std::nullopt, make_probability_pair(0.48, 0.52), Label::Negative});
  d.samples.push_back({"b", std::nullopt, make_probability_pair(0.95, 0.05), Label::Positive});
  EXPECT_EQ(score_dataset(PassthroughMeasure{}, nullptr, d), d);
}

TEST(ScoreDataset, EmptyDatasetAndErrors) {
  const auto bag = bag_1d({{0.0, Label::Negative}, {2.0, Label::Positive}});
  EXPECT_TRUE(score_dataset(KnnRatioMeasure{1}, &bag, Dataset{}).empty());

  Dataset no_scores = features_dataset({1.0});
  EXPECT_THROW(score_dataset(PassthroughMeasure{}, nullptr, no_scores), ValidationError);

  Dataset no_features;
  no_features.samples.push_back({"a", std::nullopt, make_probability_pair(0.5, 0.5), std::nullopt});
  EXPECT_THROW(score_dataset(KnnProbabilityMeasure{1}, &bag, no_features), ValidationError);
  EXPECT_THROW(score_dataset(KnnRatioMeasure{1}, nullptr, features_dataset({1.0})), ValidationError);
}

TEST(ScoreDataset, DoesNotMutateInput) {
  const auto bag = bag_1d({{0.0, Label::Negative}, {1.0, Label::Negative}, {10.0, Label::Positive}});
  const auto input = features_dataset({4.0, -1.0, 12.0});
  const auto before = input;
  const auto out = score_dataset(KnnProbabilityMeasure{2}, &bag, input);
  EXPECT_EQ(input, before);
  EXPECT_NE(out, input);
}

TEST(KSmallest, MeanWithMatchesInsertThenMean) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng.below(4);
    KSmallest ks(k);
    const std::size_t n = rng.below(7);
    for (std::size_t i = 0; i < n; ++i) ks.insert(static_cast<double>(rng.below(5)) * 0.1);
    const double extra = static_cast<double>(rng.below(5)) * 0.1;
    auto copy = ks;
    copy.insert(extra);
    EXPECT_EQ(ks.mean_with(extra), copy.mean());
  }
}

}  // namespace
}  // namespace confbin
