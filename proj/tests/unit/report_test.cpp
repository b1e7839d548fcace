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

#include "confbin/report.hpp"

#include <string>

#include <gtest/gtest.h>

namespace confbin {
namespace {

EvaluationReport second_case_report() {
  std::vector<PredictionRegion> r;
  std::vector<ScorePair> s;
  std::vector<Label> t;
  auto add = [&](RegionKind k, Label y, int n, double p) {
    for (int i = 0; i < n; ++i) {
      r.emplace_back(k);
      t.push_back(y);
      s.push_back(make_probability_pair(p, 1.0 - p));
    }
  };
  add(RegionKind::Both, Label::Positive, 50, 0.55);
  add(RegionKind::SinglePositive, Label::Positive, 20, 0.8);
  add(RegionKind::SingleNegative, Label::Negative, 16, 0.1);
  add(RegionKind::SinglePositive, Label::Negative, 10, 0.6);
  add(RegionKind::Empty, Label::Negative, 4, 0.4);
  return evaluate(r, s, t, confidence_to_epsilon(86));
}

PipelineReport sample_report() {
  PipelineReport rep;
  rep.config.measure = "passthrough";
  rep.config.positive_class = "B";
  rep.calibration = {58.0 / 110.0, 11.0 / 21.0, 21};
  rep.results.push_back(second_case_report());
  return rep;
}

TEST(EmitReport, JsonIsStableAndRoundTrips) {
  const auto rep = sample_report();
  const auto a = emit_json(rep);
  EXPECT_EQ(a, emit_json(rep));
  const auto reparsed = pipeline_report_from_json(nlohmann::json::parse(a));
  EXPECT_EQ(emit_json(reparsed), a);
  // Keys are emitted in sorted order.
  EXPECT_LT(a.find("\"calibration\""), a.find("\"config\""));
  EXPECT_LT(a.find("\"config\""), a.find("\"results\""));
}

TEST(EmitReport, CsvRowForSecondCase) {
  const auto csv = emit_csv(sample_report());
  const auto header_end = csv.find('\n');
  EXPECT_EQ(csv.substr(0, header_end), kReportCsvHeader);
  const auto row = csv.substr(header_end + 1);
  EXPECT_EQ(row.rfind("0.14,86,100,0.86,0.46,0.36,0.1,0.5,0.04,0.86,0.36,", 0), 0u) << row;
}

TEST(EmitReport, AbsentValuesRender) {
  auto rep = sample_report();
  rep.results[0].singleton_conditional = SingletonConditional{};
  rep.calibration.auroc.reset();
  const auto json = nlohmann::json::parse(emit_json(rep));
  EXPECT_TRUE(json["results"][0]["singleton_conditional"]["accuracy"].is_null());
  EXPECT_EQ(json["results"][0]["singleton_conditional"]["n_singleton"], 0);
  EXPECT_TRUE(json["calibration"]["auroc"].is_null());

  const auto csv = emit_csv(rep);
  EXPECT_NE(csv.find(",0,0,,,,,,"), std::string::npos) << csv;

  const auto text = emit_text(rep);
  EXPECT_NE(text.find("—"), std::string::npos);
  EXPECT_NE(text.find("calibration set: n=21"), std::string::npos);
}

TEST(EmitReport, FormatNames) {
  EXPECT_EQ(report_format_from_string("json"), ReportFormat::Json);
  EXPECT_EQ(report_format_from_string("csv"), ReportFormat::Csv);
  EXPECT_EQ(report_format_from_string("text"), ReportFormat::Text);
  EXPECT_FALSE(report_format_from_string("xml"));
}

}  // namespace
}  // namespace confbin
