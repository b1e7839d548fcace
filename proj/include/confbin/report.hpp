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

// Serialization of evaluation reports. JSON uses sorted (canonical) key
// order; CSV has one flat row per significance level; text is a
// human-readable table. Absent values render as null / empty field / "—".

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "confbin/core.hpp"
#include "confbin/eval.hpp"
#include "confbin/io.hpp"

namespace confbin {

// Echo of the run configuration carried in every report.
struct ReportConfig {
  std::string measure = "passthrough";
  bool mondrian = true;
  bool smoothed = false;
  std::string positive_class;
  std::string test_source = "test";  // "test" or "calibration"
  std::optional<double> proper_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<bool> stratified;
};

struct PipelineReport {
  ReportConfig config;
  CalibrationReport calibration;
  std::vector<EvaluationReport> results;
};

enum class ReportFormat : std::uint8_t { Json, Csv, Text };

inline std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "text") return ReportFormat::Text;
  return std::nullopt;
}

namespace detail {

using nlohmann::json;

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const EvaluationReport& r) {
  using detail::optional_json;
  nlohmann::json j;
  j["epsilon"] = r.epsilon;
  j["confidence"] = r.confidence;
  j["n"] = r.n;
  j["validity"] = r.validity;
  j["efficiency"] = r.efficiency;
  j["distribution"] = {{"frac_correct_single", r.distribution.frac_correct_single},
                       {"frac_false_single", r.distribution.frac_false_single},
                       {"frac_both", r.distribution.frac_both},
                       {"frac_empty", r.distribution.frac_empty}};
  j["counts"] = {{"correct_single", r.counts.correct_single},
                 {"false_single", r.counts.false_single},
                 {"both", r.counts.both},
                 {"empty", r.counts.empty}};
  j["scored_accuracy_both_correct"] = r.scored_accuracy_both_correct;
  j["scored_accuracy_both_wrong"] = r.scored_accuracy_both_wrong;
  j["binary"] = {{"accuracy", r.binary.accuracy},
                 {"sensitivity", optional_json(r.binary.sensitivity)},
                 {"specificity", optional_json(r.binary.specificity)},
                 {"auroc", optional_json(r.binary.auroc)}};
  const auto& sc = r.singleton_conditional;
  j["singleton_conditional"] = {{"n_singleton", sc.n_singleton},
                                {"false_positives_in_singletons", sc.false_positives_in_singletons},
                                {"accuracy", optional_json(sc.accuracy)},
                                {"sensitivity", optional_json(sc.sensitivity)},
                                {"specificity", optional_json(sc.specificity)},
                                {"auroc", optional_json(sc.auroc)}};
  return j;
}

inline EvaluationReport evaluation_from_json(const nlohmann::json& j) {
  using detail::optional_from;
  EvaluationReport r;
  r.epsilon = j.at("epsilon").get<double>();
  r.confidence = j.at("confidence").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.validity = j.at("validity").get<double>();
  r.efficiency = j.at("efficiency").get<double>();
  const auto& d = j.at("distribution");
  r.distribution = {d.at("frac_correct_single").get<double>(), d.at("frac_false_single").get<double>(),
                    d.at("frac_both").get<double>(), d.at("frac_empty").get<double>()};
  const auto& c = j.at("counts");
  r.counts = {c.at("correct_single").get<std::size_t>(), c.at("false_single").get<std::size_t>(),
              c.at("both").get<std::size_t>(), c.at("empty").get<std::size_t>()};
  r.scored_accuracy_both_correct = j.at("scored_accuracy_both_correct").get<double>();
  r.scored_accuracy_both_wrong = j.at("scored_accuracy_both_wrong").get<double>();
  const auto& b = j.at("binary");
  r.binary = {b.at("accuracy").get<double>(), optional_from<double>(b, "sensitivity"),
              optional_from<double>(b, "specificity"), optional_from<double>(b, "auroc")};
  const auto& s = j.at("singleton_conditional");
  r.singleton_conditional = {s.at("n_singleton").get<std::size_t>(),
                             s.at("false_positives_in_singletons").get<std::size_t>(),
                             optional_from<double>(s, "accuracy"),
                             optional_from<double>(s, "sensitivity"),
                             optional_from<double>(s, "specificity"),
                             optional_from<double>(s, "auroc")};
  return r;
}

inline nlohmann::json to_json(const PipelineReport& report) {
  using detail::optional_json;
  nlohmann::json j;
  const auto& c = report.config;
  j["config"] = {{"measure", c.measure},
                 {"mondrian", c.mondrian},
                 {"smoothed", c.smoothed},
                 {"positive_class", c.positive_class},
                 {"test_source", c.test_source},
                 {"proper_fraction", optional_json(c.proper_fraction)},
                 {"seed", optional_json(c.seed)},
                 {"stratified", optional_json(c.stratified)}};
  j["calibration"] = {{"auroc", optional_json(report.calibration.auroc)},
                      {"accuracy", report.calibration.accuracy},
                      {"n", report.calibration.n}};
  j["results"] = nlohmann::json::array();
  for (const auto& r : report.results) j["results"].push_back(to_json(r));
  return j;
}

inline PipelineReport pipeline_report_from_json(const nlohmann::json& j) {
  using detail::optional_from;
  PipelineReport report;
  const auto& c = j.at("config");
  report.config.measure = c.at("measure").get<std::string>();
  report.config.mondrian = c.at("mondrian").get<bool>();
  report.config.smoothed = c.at("smoothed").get<bool>();
  report.config.positive_class = c.at("positive_class").get<std::string>();
  report.config.test_source = c.at("test_source").get<std::string>();
  report.config.proper_fraction = optional_from<double>(c, "proper_fraction");
  report.config.seed = optional_from<std::uint64_t>(c, "seed");
  report.config.stratified = optional_from<bool>(c, "stratified");
  const auto& cal = j.at("calibration");
  report.calibration = {optional_from<double>(cal, "auroc"), cal.at("accuracy").get<double>(),
                        cal.at("n").get<std::size_t>()};
  for (const auto& r : j.at("results")) report.results.push_back(evaluation_from_json(r));
  return report;
}

inline std::string emit_json(const PipelineReport& report) { return to_json(report).dump(2) + "\n"; }

inline constexpr std::string_view kReportCsvHeader =
    "epsilon,confidence,n,validity,efficiency,frac_correct_single,frac_false_single,frac_both,"
    "frac_empty,scored_accuracy_both_correct,scored_accuracy_both_wrong,accuracy,sensitivity,"
    "specificity,auroc,n_singleton,false_positives_in_singletons,singleton_accuracy,"
    "singleton_sensitivity,singleton_specificity,singleton_auroc,calibration_auroc,"
    "calibration_accuracy,calibration_n";

inline std::string emit_csv(const PipelineReport& report) {
  auto num = [](double v) { return format_double(v); };
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  for (const auto& r : report.results) {
    const auto& d = r.distribution;
    const auto& sc = r.singleton_conditional;
    out << num(r.epsilon) << ',' << num(r.confidence) << ',' << r.n << ',' << num(r.validity) << ','
        << num(r.efficiency) << ',' << num(d.frac_correct_single) << ',' << num(d.frac_false_single)
        << ',' << num(d.frac_both) << ',' << num(d.frac_empty) << ','
        << num(r.scored_accuracy_both_correct) << ',' << num(r.scored_accuracy_both_wrong) << ','
        << num(r.binary.accuracy) << ',' << opt(r.binary.sensitivity) << ','
        << opt(r.binary.specificity) << ',' << opt(r.binary.auroc) << ',' << sc.n_singleton << ','
        << sc.false_positives_in_singletons << ',' << opt(sc.accuracy) << ',' << opt(sc.sensitivity)
        << ',' << opt(sc.specificity) << ',' << opt(sc.auroc) << ',' << opt(report.calibration.auroc)
        << ',' << num(report.calibration.accuracy) << ',' << report.calibration.n << '\n';
  }
  return out.str();
}

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string fixed4(const std::optional<double>& v) { return v ? fixed4(*v) : "—"; }

}  // namespace detail

inline std::string emit_text(const PipelineReport& report) {
  using detail::fixed4;
  std::ostringstream out;
  const auto& c = report.config;
  out << "measure: " << c.measure << (c.mondrian ? " (Mondrian)" : " (pooled)")
      << (c.smoothed ? ", smoothed p-values" : "") << '\n';
  out << "positive class: " << c.positive_class << "; evaluated on: " << c.test_source << '\n';
  out << "calibration set: n=" << report.calibration.n
      << "  auroc=" << fixed4(report.calibration.auroc)
      << "  accuracy@0.5=" << fixed4(report.calibration.accuracy) << "\n\n";
  if (report.results.empty()) {
    out << "no labelled test samples; region metrics not computed\n";
    return out.str();
  }
  const auto& first = report.results.front().binary;
  out << "test point predictions: accuracy=" << fixed4(first.accuracy)
      << "  sensitivity=" << fixed4(first.sensitivity) << "  specificity=" << fixed4(first.specificity)
      << "  auroc=" << fixed4(first.auroc) << "\n\n";
  out << "epsilon  conf%    n      validity efficiency correct  false    both     empty    "
         "acc(both+) acc(both-) singles  FP(single) acc|single\n";
  for (const auto& r : report.results) {
    char line[512];
    std::snprintf(line, sizeof(line),
                  "%-8s %-8s %-6zu %-8s %-10s %-8s %-8s %-8s %-8s %-10s %-10s %-8zu %-10zu %s\n",
                  fixed4(r.epsilon).c_str(), detail::fixed4(r.confidence).substr(0, 7).c_str(), r.n,
                  fixed4(r.validity).c_str(), fixed4(r.efficiency).c_str(),
                  fixed4(r.distribution.frac_correct_single).c_str(),
                  fixed4(r.distribution.frac_false_single).c_str(),
                  fixed4(r.distribution.frac_both).c_str(), fixed4(r.distribution.frac_empty).c_str(),
                  fixed4(r.scored_accuracy_both_correct).c_str(),
                  fixed4(r.scored_accuracy_both_wrong).c_str(), r.singleton_conditional.n_singleton,
                  r.singleton_conditional.false_positives_in_singletons,
                  fixed4(r.singleton_conditional.accuracy).c_str());
    out << line;
  }
  return out.str();
}

inline std::string emit_report(const PipelineReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return emit_json(report);
    case ReportFormat::Csv: return emit_csv(report);
    case ReportFormat::Text: return emit_text(report);
  }
  return emit_json(report);
}

}  // namespace confbin
