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

// Dataset CSV contract and the synthetic Gaussian generator.
//
//   header:  id,label[,x1,...,xm][,s_pos,s_neg]
//   rows:    comma separated, '.' decimal point, no quoting
//
// An empty label field marks an unlabelled sample. Score columns carry a
// probability pair (s_pos + s_neg = 1).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "confbin/core.hpp"
#include "confbin/random.hpp"

namespace confbin {

enum class CsvSchema : std::uint8_t { Auto, Features, Scores, Both };

struct ClassNames {
  std::string positive;
  std::optional<std::string> negative;  // inferred from the data when absent
};

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

inline std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return v;
}

struct CsvLayout {
  std::size_t n_features = 0;
  bool has_scores = false;
};

inline CsvLayout parse_header(std::string_view header, CsvSchema schema) {
  const auto cols = split_fields(header);
  if (cols.size() < 2 || cols[0] != "id" || cols[1] != "label") {
    throw ValidationError("line 1: header must start with 'id,label'");
  }
  CsvLayout layout;
  std::size_t i = 2;
  while (i < cols.size() && cols[i] == "x" + std::to_string(layout.n_features + 1)) {
    ++layout.n_features;
    ++i;
  }
  if (i + 2 == cols.size() && cols[i] == "s_pos" && cols[i + 1] == "s_neg") {
    layout.has_scores = true;
    i += 2;
  }
  if (i != cols.size()) {
    throw ValidationError("line 1: unexpected column '" + std::string(cols[i]) +
                          "' (expected id,label[,x1..xm][,s_pos,s_neg])");
  }
  const bool has_features = layout.n_features > 0;
  switch (schema) {
    case CsvSchema::Features:
      if (!has_features || layout.has_scores) throw ValidationError("line 1: expected features-only schema");
      break;
    case CsvSchema::Scores:
      if (has_features || !layout.has_scores) throw ValidationError("line 1: expected scores-only schema");
      break;
    case CsvSchema::Both:
      if (!has_features || !layout.has_scores) throw ValidationError("line 1: expected features and scores");
      break;
    case CsvSchema::Auto:
      if (!has_features && !layout.has_scores) {
        throw ValidationError("line 1: header has neither feature nor score columns");
      }
      break;
  }
  return layout;
}

}  // namespace detail

// Parses a dataset. Labels equal to names.positive map to Positive; the one
// other class name (names.negative, or the first other name seen) maps to
// Negative, and an inferred name is stored back into `names`. Row order is
// preserved.
inline Dataset read_dataset(std::istream& in, ClassNames& names, CsvSchema schema = CsvSchema::Auto) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty dataset");
  const auto layout = detail::parse_header(detail::trim_eol(line), schema);
  const std::size_t expected = 2 + layout.n_features + (layout.has_scores ? 2 : 0);

  auto& negative = names.negative;
  Dataset data;
  if (layout.n_features > 0) data.feature_dim = layout.n_features;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim_eol(line);
    if (text.empty()) continue;
    const auto fields = detail::split_fields(text);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != expected) {
      throw ValidationError(where + "expected " + std::to_string(expected) + " fields, got " +
                            std::to_string(fields.size()));
    }
    Sample s;
    s.id = std::string(fields[0]);
    if (s.id.empty()) throw ValidationError(where + "empty id");
    if (!fields[1].empty()) {
      if (fields[1] == names.positive) {
        s.true_label = Label::Positive;
      } else if (!negative) {
        negative = std::string(fields[1]);
        s.true_label = Label::Negative;
      } else if (fields[1] == *negative) {
        s.true_label = Label::Negative;
      } else {
        throw ValidationError(where + "unknown class name '" + std::string(fields[1]) + "'");
      }
    }
    if (layout.n_features > 0) {
      FeatureVector x;
      x.reserve(layout.n_features);
      for (std::size_t j = 0; j < layout.n_features; ++j) {
        const auto v = detail::parse_double(fields[2 + j]);
        if (!v || !std::isfinite(*v)) {
          throw ValidationError(where + "invalid value '" + std::string(fields[2 + j]) + "' in column x" +
                                std::to_string(j + 1));
        }
        x.push_back(*v);
      }
      s.features = std::move(x);
    }
    if (layout.has_scores) {
      const auto sp = detail::parse_double(fields[expected - 2]);
      const auto sn = detail::parse_double(fields[expected - 1]);
      if (!sp || !sn) throw ValidationError(where + "invalid score value");
      try {
        s.scores = make_probability_pair(*sp, *sn);
      } catch (const ValidationError& e) {
        throw ValidationError(where + "row '" + s.id + "': " + e.what());
      }
    }
    data.samples.push_back(std::move(s));
  }
  if (data.empty()) throw ValidationError("empty dataset");
  validate(data);
  return data;
}

inline Dataset read_dataset(std::istream& in, const ClassNames& names, CsvSchema schema = CsvSchema::Auto) {
  ClassNames local = names;
  return read_dataset(in, local, schema);
}

inline Dataset load_dataset(const std::string& path, ClassNames& names, CsvSchema schema = CsvSchema::Auto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return read_dataset(in, names, schema);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline Dataset load_dataset(const std::string& path, const ClassNames& names,
                            CsvSchema schema = CsvSchema::Auto) {
  ClassNames local = names;
  return load_dataset(path, local, schema);
}

// Writes the columns present in the data: features when feature_dim is set,
// scores when every sample has them.
inline void write_dataset(std::ostream& out, const Dataset& data, const std::string& positive_name,
                          const std::string& negative_name) {
  const std::size_t dim = data.feature_dim.value_or(0);
  bool has_scores = !data.empty();
  for (const auto& s : data.samples) has_scores = has_scores && s.scores.has_value();
  out << "id,label";
  for (std::size_t j = 0; j < dim; ++j) out << ",x" << (j + 1);
  if (has_scores) out << ",s_pos,s_neg";
  out << '\n';
  for (const auto& s : data.samples) {
    out << s.id << ',';
    if (s.true_label) out << (*s.true_label == Label::Positive ? positive_name : negative_name);
    if (dim > 0) {
      if (!s.features) throw ValidationError("sample '" + s.id + "' has no features");
      for (double v : *s.features) out << ',' << format_double(v);
    }
    if (has_scores) out << ',' << format_double(s.scores->s_pos) << ',' << format_double(s.scores->s_neg);
    out << '\n';
  }
}

inline void save_dataset(const std::string& path, const Dataset& data, const std::string& positive_name,
                         const std::string& negative_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_dataset(out, data, positive_name, negative_name);
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct SyntheticSpec {
  std::size_t n_per_class = 100;
  std::size_t dim = 2;
  double separation = 2.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

// Two Gaussian classes with means at -separation/2 (Negative) and
// +separation/2 (Positive) on the first axis, isotropic noise, shuffled into
// a random order. Ids follow the shuffled order.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_per_class == 0) throw ValidationError("synthetic: n per class must be positive");
  if (spec.dim == 0) throw ValidationError("synthetic: dimension must be positive");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    throw ValidationError("synthetic: separation must be a finite value >= 0");
  }
  if (!(spec.noise > 0.0) || !std::isfinite(spec.noise)) {
    throw ValidationError("synthetic: noise scale must be positive");
  }
  Rng rng(spec.seed);
  std::vector<Sample> samples;
  samples.reserve(2 * spec.n_per_class);
  for (std::size_t c = 0; c < 2; ++c) {
    const Label label = c == 0 ? Label::Positive : Label::Negative;
    const double offset = (label == Label::Positive ? 0.5 : -0.5) * spec.separation;
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      FeatureVector x(spec.dim);
      for (auto& v : x) v = spec.noise * rng.normal();
      x[0] += offset;
      samples.push_back({std::string(), std::move(x), std::nullopt, label});
    }
  }
  rng.shuffle(std::span<Sample>(samples));
  const std::size_t width = std::to_string(samples.size()).size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string num = std::to_string(i + 1);
    samples[i].id = "syn" + std::string(width - num.size(), '0') + num;
  }
  return {std::move(samples), spec.dim};
}

}  // namespace confbin
