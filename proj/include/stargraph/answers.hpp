/*
 * Copyright 2026 The stargraph Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/ntriples.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

using Answer = std::vector<Term>;
using AnswerSet = std::set<Answer>;

inline std::vector<std::string> render_answer(const Answer& a) {
  std::vector<std::string> out;
  for (const auto& t : a) out.push_back(t.render());
  return out;
}

/// Header line of output variables, then one sorted row per answer.
inline std::string answers_to_tsv(const std::vector<Term>& output_pattern, const AnswerSet& answers) {
  std::string out;
  for (std::size_t i = 0; i < output_pattern.size(); ++i) out += (i ? "\t" : "") + output_pattern[i].render();
  out += '\n';
  std::set<std::vector<std::string>> rows;
  for (const auto& a : answers) rows.insert(render_answer(a));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "\t" : "") + r[i];
    out += '\n';
  }
  return out;
}

inline AnswerSet answers_from_tsv(std::string_view text) {
  AnswerSet out;
  std::size_t start = text.find('\n');
  if (start == std::string_view::npos) return out;
  ++start;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    Answer a;
    std::size_t pos = 0;
    while (pos < line.size()) {
      auto t = read_term(line, pos);
      if (!t) throw Error(ErrorCode::kMalformedLine, "bad answer row");
      a.push_back(*t);
      if (pos < line.size() && line[pos] == '\t') ++pos;
    }
    out.insert(std::move(a));
  }
  return out;
}

}  // namespace stargraph
