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

#include "confbin/io.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "confbin/eval.hpp"
#include "confbin/report.hpp"

namespace confbin {
namespace {

Dataset parse(const std::string& text, ClassNames names = {"B", std::nullopt}) {
  std::istringstream in(text);
  return read_dataset(in, names);
}

TEST(LoadDataset, FigureOneFixture) {
  ClassNames names{"B", std::nullopt};
  const auto d = load_dataset(CONFBIN_DATA_DIR "/figure1.csv", names, CsvSchema::Scores);
  EXPECT_EQ(d.size(), 21u);
  EXPECT_EQ(d.count(Label::Positive), 11u);
  EXPECT_EQ(d.count(Label::Negative), 10u);
  EXPECT_EQ(names.negative, "A");
  EXPECT_EQ(d.samples.front().id, "a01");
  EXPECT_EQ(d.samples.front().scores->s_neg, 0.002);
  EXPECT_EQ(d.samples.back().scores->s_pos, 0.95);
}

TEST(LoadDataset, HeaderOnlyIsEmpty) {
  try {
    parse("id,label,s_pos,s_neg\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("empty dataset"), std::string::npos);
  }
  EXPECT_THROW(parse(""), ValidationError);
}

TEST(LoadDataset, ProbabilityViolationNamesTheRow) {
  try {
    parse("id,label,s_pos,s_neg\nok,B,0.5,0.5\nbad7,A,0.3,0.8\n");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bad7"), std::string::npos) << msg;
  }
}

TEST(LoadDataset, MalformedInputs) {
  EXPECT_THROW(parse("label,id,s_pos,s_neg\na,B,0.5,0.5\n"), ValidationError);
  EXPECT_THROW(parse("id,label,x1,x3\na,B,1,2\n"), ValidationError);
  EXPECT_THROW(parse("id,label,x1\na,B,1,2\n"), ValidationError);
  EXPECT_THROW(parse("id,label,x1\na,B,abc\n"), ValidationError);
  EXPECT_THROW(parse("id,label,x1\na,B,inf\n"), ValidationError);
  EXPECT_THROW(parse("id,label,x1\na,B,1\nb,A,2\nc,C,3\n"), ValidationError);  // third class
  EXPECT_THROW(parse("id,label,x1\na,B,1\na,A,2\n"), ValidationError);         // duplicate id
  EXPECT_THROW(parse("id,label\na,B\n"), ValidationError);
  EXPECT_THROW(load_dataset("/nonexistent/file.csv", ClassNames{"B", std::nullopt}), IoError);
}

TEST(LoadDataset, ExplicitNegativeClassAndUnlabelledRows) {
  const auto d = parse("id,label,x1,x2,s_pos,s_neg\r\na,,1,2,0.4,0.6\r\nb,no,3,4,0.9,0.1\r\n",
                       ClassNames{"yes", "no"});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_FALSE(d.samples[0].true_label);
  EXPECT_EQ(d.samples[1].true_label, Label::Negative);
  EXPECT_EQ(d.feature_dim, 2u);
  EXPECT_EQ(*d.samples[1].features, (FeatureVector{3.0, 4.0}));
  EXPECT_THROW(parse("id,label,x1\na,maybe,1\n", ClassNames{"yes", "no"}), ValidationError);
}

TEST(LoadDataset, SchemaEnforcement) {
  std::istringstream in("id,label,x1\na,B,1\n");
  EXPECT_THROW(read_dataset(in, ClassNames{"B", std::nullopt}, CsvSchema::Scores), ValidationError);
}

TEST(Synthetic, DeterministicAndShaped) {
  const SyntheticSpec spec{50, 3, 2.0, 1.0, 7};
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  EXPECT_EQ(a, b);
  std::ostringstream sa, sb;
  write_dataset(sa, a, "pos", "neg");
  write_dataset(sb, b, "pos", "neg");
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.size(), 100u);
  EXPECT_EQ(a.count(Label::Positive), 50u);
  EXPECT_EQ(a.feature_dim, 3u);
  EXPECT_NE(generate_synthetic({50, 3, 2.0, 1.0, 8}), a);
}

TEST(Synthetic, InvalidSpecs) {
  EXPECT_THROW(generate_synthetic({0, 2, 1.0, 1.0, 0}), ValidationError);
  EXPECT_THROW(generate_synthetic({5, 0, 1.0, 1.0, 0}), ValidationError);
  EXPECT_THROW(generate_synthetic({5, 2, -1.0, 1.0, 0}), ValidationError);
  EXPECT_THROW(generate_synthetic({5, 2, 1.0, 0.0, 0}), ValidationError);
}

double synthetic_auroc(const SyntheticSpec& spec) {
  const auto d = generate_synthetic(spec);
  std::vector<double> first_axis;
  std::vector<Label> truths;
  for (const auto& s : d.samples) {
    first_axis.push_back((*s.features)[0]);
    truths.push_back(*s.true_label);
  }
  return auroc(first_axis, truths);
}

TEST(Synthetic, SeparationControlsDifficulty) {
  EXPECT_GT(synthetic_auroc({500, 2, 10.0, 1.0, 3}), 0.99);
  // No separation: the mean over 200 seeds lies within 3 sd of 0.5, where the
  // per-seed sd of the rank statistic is sqrt((2n + 1) / (12 n^2)).
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) sum += synthetic_auroc({500, 2, 0.0, 1.0, seed});
  const double band = 3.0 * std::sqrt(1001.0 / (12.0 * 500.0 * 500.0)) / std::sqrt(200.0);
  EXPECT_NEAR(sum / 200.0, 0.5, band);
}

// load(write(d)) == d for generated data.
TEST(WriteDataset, RoundTripsGeneratedData) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = generate_synthetic({20 + seed, 1 + seed % 4, 1.5, 0.7 + 0.1 * static_cast<double>(seed), seed});
    std::ostringstream out;
    write_dataset(out, d, "pos", "neg");
    std::istringstream in(out.str());
    EXPECT_EQ(read_dataset(in, ClassNames{"pos", "neg"}), d);
  }
}

TEST(WriteDataset, RoundTripsScores) {
  ClassNames names{"B", std::nullopt};
  const auto d = load_dataset(CONFBIN_DATA_DIR "/figure1.csv", names);
  std::ostringstream out;
  write_dataset(out, d, "B", "A");
  std::istringstream in(out.str());
  EXPECT_EQ(read_dataset(in, ClassNames{"B", "A"}), d);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.36), "0.36");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
}

}  // namespace
}  // namespace confbin
