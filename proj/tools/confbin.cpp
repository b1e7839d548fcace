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

// Command-line front end: synth, predict, evaluate, simulate-online, report.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "confbin/core.hpp"
#include "confbin/io.hpp"
#include "confbin/pipeline.hpp"
#include "confbin/report.hpp"

namespace {

using namespace confbin;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct SignificanceArgs {
  std::vector<double> epsilons;
  std::vector<double> confidences;

  void attach(CLI::App* cmd, bool multiple) {
    auto* e = cmd->add_option("--epsilon", epsilons, "significance level(s) in [0,1]");
    auto* c = cmd->add_option("--confidence", confidences, "confidence level(s) in percent, e.g. 80");
    if (!multiple) {
      e->expected(1);
      c->expected(1);
    }
    e->delimiter(',');
    c->delimiter(',');
  }

  std::vector<SignificanceLevel> resolve(double fallback) const {
    std::vector<SignificanceLevel> out;
    for (double e : epsilons) out.emplace_back(e);
    for (double c : confidences) out.push_back(confidence_to_epsilon(c));
    if (out.empty()) out.emplace_back(fallback);
    return out;
  }
};

struct PipelineArgs {
  std::string train_path, proper_path, calibration_path, test_path;
  std::string positive_class, negative_class;
  std::string measure = "passthrough";
  std::optional<std::size_t> k;
  bool pooled = false;
  double fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = false;
  bool smoothed = false;
  std::uint64_t smooth_seed = 0;
  SignificanceArgs significance;

  void attach(CLI::App* cmd, bool test_required) {
    cmd->add_option("--train", train_path, "labelled data split into proper training and calibration parts");
    cmd->add_option("--proper", proper_path, "proper training set (with --calibration)");
    cmd->add_option("--calibration", calibration_path, "labelled calibration set");
    auto* test = cmd->add_option("--test", test_path, "test set");
    if (test_required) test->required();
    cmd->add_option("--positive-class", positive_class, "class name mapped to Positive")->required();
    cmd->add_option("--negative-class", negative_class, "class name mapped to Negative (default: inferred)");
    cmd->add_option("--measure", measure, "passthrough | knn_ratio | knn_prob")
        ->check(CLI::IsMember({"passthrough", "knn_ratio", "knn_prob"}));
    cmd->add_option("--k", k, "neighbours for the kNN measures");
    cmd->add_flag("--pooled", pooled, "pool calibration scores across classes (non-Mondrian)");
    cmd->add_option("--fraction", fraction, "proper-training fraction for --train");
    cmd->add_option("--seed", seed, "split seed");
    cmd->add_flag("--stratified", stratified, "stratify the split by class");
    cmd->add_flag("--smoothed", smoothed, "randomized tie-breaking in p-values");
    cmd->add_option("--smooth-seed", smooth_seed, "seed for --smoothed");
    significance.attach(cmd, true);
  }

  ClassNames names() const {
    ClassNames n{positive_class, std::nullopt};
    if (!negative_class.empty()) n.negative = negative_class;
    return n;
  }

  Measure build_measure() const {
    if (k && *k == 0) throw ValidationError("--k must be positive");
    if (measure == "knn_ratio") return KnnRatioMeasure{k.value_or(1)};
    if (measure == "knn_prob") return KnnProbabilityMeasure{k.value_or(5)};
    return PassthroughMeasure{};
  }

  // Filled in by run() when the negative class name is inferred.
  ClassNames resolved;

  std::string negative_name() const { return resolved.negative.value_or("negative"); }

  PipelineResult run() {
    if (train_path.empty() == calibration_path.empty()) {
      throw ValidationError("give exactly one of --train or --calibration");
    }
    auto& cls = resolved;
    cls = names();
    PipelineInputs inputs;
    if (!train_path.empty()) inputs.train = load_dataset(train_path, cls);
    if (!calibration_path.empty()) inputs.calibration = load_dataset(calibration_path, cls);
    if (!proper_path.empty()) inputs.proper = load_dataset(proper_path, cls);
    if (!test_path.empty()) inputs.test = load_dataset(test_path, cls);

    PipelineOptions options;
    options.measure = build_measure();
    options.mondrian = !pooled;
    options.split = {fraction, seed, stratified};
    options.epsilons = significance.resolve(0.2);
    options.predict = {smoothed, smooth_seed};
    options.positive_class = positive_class;
    return run_pipeline(inputs, options);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal prediction for binary classification: inductive, Mondrian and on-line "
               "predictors with a set-prediction metric suite"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a two-class Gaussian dataset (features CSV)");
  SyntheticSpec synth_spec;
  std::string synth_out, synth_pos = "pos", synth_neg = "neg";
  synth->add_option("--n-per-class", synth_spec.n_per_class, "samples per class")->required();
  synth->add_option("--dim", synth_spec.dim, "feature dimension");
  synth->add_option("--separation", synth_spec.separation, "class-mean separation on the first axis");
  synth->add_option("--noise", synth_spec.noise, "per-coordinate standard deviation");
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--positive-name", synth_pos, "label written for Positive");
  synth->add_option("--negative-name", synth_neg, "label written for Negative");
  synth->add_option("--out", synth_out, "output path (default stdout)");

  // predict
  auto* predict = app.add_subcommand("predict", "write per-sample p-values and prediction regions");
  PipelineArgs predict_args;
  std::string predict_out;
  predict_args.attach(predict, true);
  predict->add_option("--out", predict_out, "region CSV path (default stdout)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "run the full pipeline and report metrics");
  PipelineArgs eval_args;
  std::string eval_out, eval_regions_out, eval_format = "json";
  eval_args.attach(evaluate_cmd, false);
  evaluate_cmd->add_option("--format", eval_format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  evaluate_cmd->add_option("--out", eval_out, "report path (default stdout)");
  evaluate_cmd->add_option("--regions-out", eval_regions_out, "also write the region CSV here");

  // simulate-online
  auto* online = app.add_subcommand("simulate-online", "run the on-line protocol and write the trajectory CSV");
  OnlineSimulation sim;
  SignificanceArgs online_sig;
  std::string online_out, online_data, online_pos;
  online_sig.attach(online, false);
  online->add_option("--k", sim.k, "neighbours in the distance ratio");
  online->add_option("--initial", sim.initial, "initial bag size");
  online->add_option("--rounds", sim.rounds, "number of on-line rounds");
  online->add_option("--dim", sim.synthetic.dim, "synthetic feature dimension");
  online->add_option("--separation", sim.synthetic.separation, "synthetic class separation");
  online->add_option("--noise", sim.synthetic.noise, "synthetic noise scale");
  online->add_option("--seed", sim.synthetic.seed, "synthetic stream seed");
  online->add_option("--data", online_data, "labelled features CSV used as the stream instead");
  online->add_option("--positive-class", online_pos, "positive class name for --data");
  online->add_option("--out", online_out, "trajectory CSV path (default stdout)");

  // report
  auto* report_cmd = app.add_subcommand("report", "re-emit a JSON report as json, csv or text");
  std::string report_in, report_out, report_format = "text";
  report_cmd->add_option("--in", report_in, "JSON report from 'evaluate'")->required();
  report_cmd->add_option("--format", report_format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  report_cmd->add_option("--out", report_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*synth) {
      const Dataset data = generate_synthetic(synth_spec);
      std::ostringstream out;
      write_dataset(out, data, synth_pos, synth_neg);
      write_output(synth_out, out.str());
    } else if (*predict) {
      const auto result = predict_args.run();
      write_output(predict_out, emit_regions_csv(result.regions, predict_args.positive_class,
                                                 predict_args.negative_name()));
    } else if (*evaluate_cmd) {
      const auto result = eval_args.run();
      write_output(eval_out, emit_report(result.report, *report_format_from_string(eval_format)));
      if (!eval_regions_out.empty()) {
        write_output(eval_regions_out, emit_regions_csv(result.regions, eval_args.positive_class,
                                                        eval_args.negative_name()));
      }
    } else if (*online) {
      const auto levels = online_sig.resolve(0.2);
      sim.eps = levels.front();
      std::vector<TrajectoryPoint> trajectory;
      if (online_data.empty()) {
        trajectory = simulate_online(sim);
      } else {
        if (online_pos.empty()) throw ValidationError("--data requires --positive-class");
        const Dataset data = load_dataset(online_data, ClassNames{online_pos, std::nullopt}, CsvSchema::Features);
        require_labels(data, "on-line stream");
        if (sim.initial == 0 || sim.initial >= data.size()) {
          throw ValidationError("--initial must leave at least one stream sample");
        }
        TrainingBag bag(*data.feature_dim);
        std::vector<std::pair<FeatureVector, Label>> stream;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const auto& s = data.samples[i];
          if (i < sim.initial) bag.add(*s.features, *s.true_label);
          else stream.emplace_back(*s.features, *s.true_label);
        }
        trajectory = run_online(bag, stream, sim.eps, sim.k);
      }
      write_output(online_out, emit_trajectory_csv(trajectory));
    } else if (*report_cmd) {
      std::ifstream in(report_in, std::ios::binary);
      if (!in) throw IoError("cannot open '" + report_in + "'");
      PipelineReport report;
      try {
        report = pipeline_report_from_json(nlohmann::json::parse(in));
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(report_in + ": not a valid report: " + e.what());
      }
      write_output(report_out, emit_report(report, *report_format_from_string(report_format)));
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
