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

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

namespace detail {

inline bool is_var_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

/// Reads one term token starting at `pos` (leading blanks skipped). Returns
/// nullopt when the text there is not a well-formed token.
inline std::optional<Term> read_term(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos >= s.size()) return std::nullopt;
  char c = s[pos];
  if (c == '<') {
    auto end = s.find('>', pos + 1);
    if (end == std::string_view::npos) return std::nullopt;
    std::string lex(s.substr(pos + 1, end - pos - 1));
    if (lex.empty() || lex.find_first_of(" \t<") != std::string::npos) return std::nullopt;
    pos = end + 1;
    return Term::iri(std::move(lex));
  }
  if (c == '"') {
    std::string lex;
    std::size_t i = pos + 1;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\') {
        if (i + 1 >= s.size() || (s[i + 1] != '"' && s[i + 1] != '\\')) return std::nullopt;
        ++i;
      }
      lex.push_back(s[i++]);
    }
    if (i >= s.size()) return std::nullopt;
    pos = i + 1;
    return Term::literal(std::move(lex));
  }
  if (c == '?') {
    std::size_t i = pos + 1;
    while (i < s.size() && detail::is_var_char(s[i])) ++i;
    if (i == pos + 1) return std::nullopt;
    std::string lex(s.substr(pos + 1, i - pos - 1));
    pos = i;
    return Term::variable(std::move(lex));
  }
  return std::nullopt;
}

/// Parses a full term token (nothing before or after it).
inline std::optional<Term> parse_term(std::string_view s) {
  std::size_t pos = 0;
  auto t = read_term(s, pos);
  if (!t || pos != s.size()) return std::nullopt;
  return t;
}

/// Parses one `s p o .` line. Returns nullopt for blank and comment lines.
inline std::optional<Triple> parse_triple_line(std::string_view line, std::size_t line_no,
                                               bool allow_variables) {
  std::size_t pos = 0;
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  if (pos == line.size() || line[pos] == '#') return std::nullopt;
  auto malformed = [&](const char* why) {
    return Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": " + why);
  };
  auto s = read_term(line, pos);
  auto p = s ? read_term(line, pos) : std::nullopt;
  auto o = p ? read_term(line, pos) : std::nullopt;
  if (!o) throw malformed("expected three terms");
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos >= line.size() || line[pos] != '.') throw malformed("missing terminating ' .'");
  ++pos;
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  if (pos != line.size()) throw malformed("trailing text after '.'");

  std::string where = "line " + std::to_string(line_no);
  if (p->is_variable()) {
    if (!allow_variables) throw Error(ErrorCode::kVariableInData, where);
    throw Error(ErrorCode::kVariablePredicate, where);
  }
  if (!p->is_iri()) throw malformed("predicate must be an IRI");
  if (!allow_variables && (s->is_variable() || o->is_variable()))
    throw Error(ErrorCode::kVariableInData, where);
  if (s->is_literal()) throw Error(ErrorCode::kLiteralSubject, where);
  return Triple{std::move(*s), std::move(*p), std::move(*o)};
}

inline std::vector<Triple> parse_triples(std::string_view text, bool allow_variables) {
  std::vector<Triple> out;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto t = parse_triple_line(line, line_no, allow_variables)) out.push_back(std::move(*t));
    start = end + 1;
  }
  return out;
}

inline DataGraph parse_data(std::string_view text) {
  return DataGraph(parse_triples(text, false));
}

inline QueryGraph parse_query(std::string_view text) {
  return QueryGraph(parse_triples(text, true));
}

template <class G>
std::string serialize(const G& g) {
  std::string out;
  for (const auto& t : g.triples()) {
    out += t.render();
    out += '\n';
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIOError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIOError, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIOError, "write failed for " + path);
}

inline DataGraph load_data(const std::string& path) { return parse_data(read_file(path)); }
inline QueryGraph load_query(const std::string& path) { return parse_query(read_file(path)); }

}  // namespace stargraph
