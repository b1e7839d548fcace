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

// End-to-end runs: split -> score -> calibrate -> predict at each epsilon ->
// evaluate. The calibration-set report is always part of the output.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "confbin/core.hpp"
#include "confbin/eval.hpp"
#include "confbin/icp.hpp"
#include "confbin/io.hpp"
#include "confbin/nonconformity.hpp"
#include "confbin/online.hpp"
#include "confbin/report.hpp"

namespace confbin {

// Thrown with the failing stage prefixed to the message.
class StageError : public ValidationError {
 public:
  StageError(const std::string& stage, const std::string& message)
      : ValidationError(stage + ": " + message), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineInputs {
  // Either `train` (split into proper + calibration) or `calibration`
  // (optionally with `proper` for feature-based measures).
  std::optional<Dataset> train;
  std::optional<Dataset> proper;
  std::optional<Dataset> calibration;
  // Without a test set the calibration samples are evaluated.
  std::optional<Dataset> test;
};

struct PipelineOptions {
  Measure measure = PassthroughMeasure{};
  bool mondrian = true;
  SplitConfig split;
  std::vector<SignificanceLevel> epsilons{SignificanceLevel(0.2)};
  PredictOptions predict;
  std::string positive_class;
};

struct RegionRow {
  std::string id;
  double epsilon = 0.0;
  PValuePair p;
  PredictionRegion region;
  std::optional<Label> true_label;
};

struct PipelineResult {
  PipelineReport report;
  std::vector<RegionRow> regions;  // grouped by epsilon, input order within
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace detail

inline PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineOptions& options) {
  if (options.epsilons.empty()) throw StageError("config", "at least one epsilon is required");

  Dataset proper;
  Dataset calibration;
  ReportConfig echo;
  echo.measure = describe(options.measure);
  echo.mondrian = options.mondrian;
  echo.smoothed = options.predict.smoothed;
  echo.positive_class = options.positive_class;

  if (inputs.train) {
    if (inputs.calibration) {
      throw StageError("config", "give either a training set to split or a calibration set, not both");
    }
    auto parts = detail::stage("split", [&] { return split_dataset(*inputs.train, options.split); });
    proper = std::move(parts.proper);
    calibration = std::move(parts.calibration);
    echo.proper_fraction = options.split.proper_fraction;
    echo.seed = options.split.seed;
    echo.stratified = options.split.stratified;
  } else if (inputs.calibration) {
    calibration = *inputs.calibration;
    if (inputs.proper) proper = *inputs.proper;
  } else {
    throw StageError("config", "a training or calibration set is required");
  }

  std::optional<TrainingBag> bag;
  if (is_feature_based(options.measure)) {
    bag = detail::stage("fit", [&] { return TrainingBag::from_dataset(proper); });
  }
  const TrainingBag* bag_ptr = bag ? &*bag : nullptr;

  const Dataset scored_cal =
      detail::stage("score", [&] { return score_dataset(options.measure, bag_ptr, calibration); });
  const Dataset scored_test = detail::stage("score", [&] {
    return inputs.test ? score_dataset(options.measure, bag_ptr, *inputs.test) : scored_cal;
  });
  echo.test_source = inputs.test ? "test" : "calibration";

  const CalibrationTable table =
      detail::stage("calibrate", [&] { return build_calibration_table(scored_cal, options.mondrian); });

  PipelineResult result;
  result.report.config = echo;
  result.report.calibration = detail::stage("calibration report", [&] { return calibration_report(scored_cal); });

  bool labelled = !scored_test.empty();
  std::vector<ScorePair> scores;
  std::vector<Label> truths;
  for (const auto& s : scored_test.samples) {
    scores.push_back(*s.scores);
    labelled = labelled && s.true_label.has_value();
    if (s.true_label) truths.push_back(*s.true_label);
  }

  for (const auto eps : options.epsilons) {
    const auto predictions =
        detail::stage("predict", [&] { return predict_set(table, scored_test, eps, options.predict); });
    std::vector<PredictionRegion> regions;
    regions.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      regions.push_back(predictions[i].region);
      result.regions.push_back({predictions[i].id, eps.epsilon(), predictions[i].p, predictions[i].region,
                                scored_test.samples[i].true_label});
    }
    if (labelled) {
      result.report.results.push_back(
          detail::stage("evaluate", [&] { return evaluate(regions, scores, truths, eps); }));
    }
  }
  return result;
}

inline constexpr std::string_view kRegionCsvHeader = "id,epsilon,p_pos,p_neg,region,true_label";

inline std::string emit_regions_csv(const std::vector<RegionRow>& rows, const std::string& positive_name,
                                    const std::string& negative_name) {
  std::ostringstream out;
  out << kRegionCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.id << ',' << format_double(r.epsilon) << ',' << format_double(r.p.p_pos) << ','
        << format_double(r.p.p_neg) << ',' << to_string(r.region.kind()) << ',';
    if (r.true_label) out << (*r.true_label == Label::Positive ? positive_name : negative_name);
    out << '\n';
  }
  return out.str();
}

struct OnlineSimulation {
  std::size_t initial = 10;
  std::size_t rounds = 500;
  std::size_t k = 1;
  SignificanceLevel eps{0.2};
  SyntheticSpec synthetic;  // n_per_class is derived from initial + rounds
};

// Draws initial + rounds exchangeable samples; the first `initial` seed the
// bag and the rest form the stream.
inline std::vector<TrajectoryPoint> simulate_online(const OnlineSimulation& sim) {
  if (sim.initial == 0) throw ValidationError("on-line simulation needs a nonempty initial bag");
  if (sim.rounds == 0) throw ValidationError("on-line simulation needs at least one round");
  SyntheticSpec spec = sim.synthetic;
  spec.n_per_class = (sim.initial + sim.rounds + 1) / 2;
  const Dataset data = generate_synthetic(spec);
  TrainingBag bag(spec.dim);
  std::vector<std::pair<FeatureVector, Label>> stream;
  stream.reserve(sim.rounds);
  for (std::size_t i = 0; i < sim.initial + sim.rounds; ++i) {
    const auto& s = data.samples[i];
    if (i < sim.initial) {
      bag.add(*s.features, *s.true_label);
    } else {
      stream.emplace_back(*s.features, *s.true_label);
    }
  }
  return run_online(bag, stream, sim.eps, sim.k);
}

inline constexpr std::string_view kTrajectoryCsvHeader = "round,region,true_label,cumulative_error_rate";

inline std::string emit_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::ostringstream out;
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& t : trajectory) {
    out << t.round << ',' << to_string(t.region.kind()) << ',' << to_string(t.true_label) << ','
        << format_double(t.cumulative_error_rate) << '\n';
  }
  return out.str();
}

}  // namespace confbin
