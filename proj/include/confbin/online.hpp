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

// On-line (transductive) conformal prediction with the nearest-neighbour
// distance ratio: predict one sample, reveal its label, absorb it, repeat.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "confbin/core.hpp"
#include "confbin/nonconformity.hpp"

namespace confbin {

// Full-CP p-value of `candidate_label` for `candidate`: the candidate joins
// the bag, every member of the augmented bag is scored against the others
// (leave-one-out), and p = #{i : alpha_i >= alpha_candidate} / (n + 1) with
// the candidate counted. Quadratic in the bag size.
inline double full_cp_pvalue(const TrainingBag& bag, std::size_t k, std::span<const double> candidate,
                             Label candidate_label) {
  if (bag.empty()) throw ValidationError("training bag must not be empty");
  if (candidate.size() != bag.dim()) {
    throw ValidationError("dimension mismatch: bag has " + std::to_string(bag.dim()) +
                          ", candidate has " + std::to_string(candidate.size()));
  }
  TrainingBag augmented = bag;
  augmented.add(candidate, candidate_label);
  const std::size_t c = augmented.size() - 1;
  const double alpha_c = knn_distance_ratio(augmented, candidate, candidate_label, k, c);
  std::size_t at_least = 1;
  for (std::size_t i = 0; i < c; ++i) {
    const double alpha_i = knn_distance_ratio(augmented, augmented.point(i), augmented.label(i), k, i);
    at_least += alpha_i >= alpha_c ? 1 : 0;
  }
  return static_cast<double>(at_least) / static_cast<double>(augmented.size());
}

struct OnlineRecord {
  PredictionRegion region;
  Label true_label = Label::Negative;
  double p_pos = 1.0;
  double p_neg = 1.0;
};

// Accumulating state of the on-line protocol. Each bag member caches its k
// nearest same-label and other-label distances, so a round costs O(n k)
// instead of the O(n^2) of full_cp_pvalue, with identical p-values.
class OnlineState {
 public:
  OnlineState(TrainingBag initial, std::size_t k) : bag_(std::move(initial)), k_(k) {
    if (bag_.empty()) throw ValidationError("initial training bag must not be empty");
    if (k_ == 0) throw ValidationError("k must be positive");
    initial_size_ = bag_.size();
    cache_.reserve(bag_.size());
    for (std::size_t i = 0; i < bag_.size(); ++i) {
      auto nb = summarize_neighbours(bag_, bag_.point(i), bag_.label(i), k_, i);
      cache_.push_back(std::move(nb));
    }
  }

  const TrainingBag& bag() const noexcept { return bag_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t round() const noexcept { return history_.size(); }
  std::size_t errors_so_far() const noexcept { return errors_; }
  std::size_t initial_size() const noexcept { return initial_size_; }
  const std::vector<OnlineRecord>& history() const noexcept { return history_; }

  double cumulative_error_rate() const noexcept {
    return history_.empty() ? 0.0
                            : static_cast<double>(errors_) / static_cast<double>(history_.size());
  }

  // Equals full_cp_pvalue(bag(), k(), x, y).
  double p_value(std::span<const double> x, Label y) const {
    if (x.size() != bag_.dim()) {
      throw ValidationError("dimension mismatch: bag has " + std::to_string(bag_.dim()) +
                            ", candidate has " + std::to_string(x.size()));
    }
    const auto own = summarize_neighbours(bag_, x, y, k_);
    const double alpha_c = ratio_from_distances(own.same.mean(), own.other.mean());
    std::size_t at_least = 1;
    for (std::size_t i = 0; i < bag_.size(); ++i) {
      const double d = bag_.distance(i, x);
      const auto& nb = cache_[i];
      const double alpha_i = bag_.label(i) == y
                                 ? ratio_from_distances(nb.same.mean_with(d), nb.other.mean())
                                 : ratio_from_distances(nb.same.mean(), nb.other.mean_with(d));
      at_least += alpha_i >= alpha_c ? 1 : 0;
    }
    return static_cast<double>(at_least) / static_cast<double>(bag_.size() + 1);
  }

  // Predicts x at significance eps, then reveals `truth` and absorbs the
  // sample. Returns the region that was predicted.
  PredictionRegion step(std::span<const double> x, Label truth, SignificanceLevel eps) {
    const double p_pos = p_value(x, Label::Positive);
    const double p_neg = p_value(x, Label::Negative);
    const auto region =
        PredictionRegion::from_inclusion(p_pos > eps.epsilon(), p_neg > eps.epsilon());
    if (!region.contains(truth)) ++errors_;
    history_.push_back({region, truth, p_pos, p_neg});
    absorb(x, truth);
    return region;
  }

 private:
  void absorb(std::span<const double> x, Label truth) {
    auto own = summarize_neighbours(bag_, x, truth, k_);
    for (std::size_t i = 0; i < bag_.size(); ++i) {
      const double d = bag_.distance(i, x);
      (bag_.label(i) == truth ? cache_[i].same : cache_[i].other).insert(d);
    }
    bag_.add(x, truth);
    cache_.push_back(std::move(own));
  }

  TrainingBag bag_;
  std::size_t k_;
  std::size_t initial_size_ = 0;
  std::size_t errors_ = 0;
  std::vector<NeighbourSummary> cache_;
  std::vector<OnlineRecord> history_;
};

// Functional form of one protocol round: the input state is left untouched.
inline std::pair<PredictionRegion, OnlineState> online_round(const OnlineState& state,
                                                             std::span<const double> x, Label truth,
                                                             SignificanceLevel eps) {
  OnlineState next = state;
  const auto region = next.step(x, truth, eps);
  return {region, std::move(next)};
}

struct TrajectoryPoint {
  std::size_t round = 0;
  PredictionRegion region;
  Label true_label = Label::Negative;
  double p_pos = 1.0;
  double p_neg = 1.0;
  double cumulative_error_rate = 0.0;
};

inline std::vector<TrajectoryPoint> run_online(const TrainingBag& initial,
                                               std::span<const std::pair<FeatureVector, Label>> stream,
                                               SignificanceLevel eps, std::size_t k = 1) {
  if (stream.empty()) throw ValidationError("on-line stream must not be empty");
  OnlineState state(initial, k);
  std::vector<TrajectoryPoint> out;
  out.reserve(stream.size());
  for (const auto& [x, y] : stream) {
    state.step(x, y, eps);
    const auto& rec = state.history().back();
    out.push_back({state.round(), rec.region, rec.true_label, rec.p_pos, rec.p_neg,
                   state.cumulative_error_rate()});
  }
  return out;
}

}  // namespace confbin
