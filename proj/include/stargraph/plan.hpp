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

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stargraph/decompose.hpp"
#include "stargraph/embedding.hpp"
#include "stargraph/error.hpp"
#include "stargraph/ntriples.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

/// Presence masks of one subquery over B(Q), N(Q) - B(Q) and the triples of Q.
struct QueryPrototype {
  std::string border;
  std::string non_border;
  std::string triples;

  friend bool operator==(const QueryPrototype&, const QueryPrototype&) = default;
};

struct MbnEntry {
  std::size_t node;      // position in the node enumeration
  std::size_t subquery;  // index of the subquery lacking the node

  friend bool operator==(const MbnEntry&, const MbnEntry&) = default;
};

/// A query, its decomposition and every structure derived from the pair.
struct QueryPlan {
  QueryGraph query;
  QueryDecomposition decomposition;
  NodeIndex index;
  std::vector<QueryPrototype> prototypes;
  std::vector<MbnEntry> mbn;
  std::vector<std::size_t> common_border;
  std::vector<std::vector<std::size_t>> sub_triples;  // triple indices per subquery
  std::vector<std::vector<std::size_t>> sub_nodes;    // node positions per subquery
  std::vector<std::optional<std::size_t>> centers;    // centre position per subquery
  std::vector<std::size_t> output;                    // positions of the output pattern

  std::size_t subquery_count() const { return decomposition.size(); }
  std::span<const Triple> triples() const { return query.triples(); }
  bool in_subquery(std::size_t node, std::size_t sub) const {
    return prototypes[sub].border.size() > node ? prototypes[sub].border[node] == '+'
                                                : prototypes[sub].non_border[node - index.border_count()] == '+';
  }
};

inline QueryPlan preprocess(const QueryGraph& q, const QueryDecomposition& d) {
  QueryPlan p;
  p.query = q;
  p.decomposition = d;
  std::vector<Term> border;
  for (const auto& b : d.border_nodes) border.insert(border.end(), b.begin(), b.end());
  std::sort(border.begin(), border.end());
  border.erase(std::unique(border.begin(), border.end()), border.end());
  std::vector<Term> rest;
  std::set_difference(q.nodes().begin(), q.nodes().end(), border.begin(), border.end(),
                      std::back_inserter(rest));
  p.index = NodeIndex(border, rest);
  const auto& all = q.triples();
  std::size_t nb = p.index.border_count();

  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& sq = d.subqueries[i];
    QueryPrototype proto{std::string(nb, '-'), std::string(p.index.size() - nb, '-'),
                         std::string(all.size(), '-')};
    std::vector<std::size_t> tri, nodes;
    for (const auto& t : sq.triples()) {
      auto k = static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin());
      proto.triples[k] = '+';
      tri.push_back(k);
    }
    for (const auto& n : sq.nodes()) {
      auto pos = p.index.at(n);
      if (pos < nb) proto.border[pos] = '+';
      else proto.non_border[pos - nb] = '+';
      nodes.push_back(pos);
    }
    std::sort(nodes.begin(), nodes.end());
    p.prototypes.push_back(std::move(proto));
    p.sub_triples.push_back(std::move(tri));
    p.sub_nodes.push_back(std::move(nodes));
    std::optional<std::size_t> c;
    if (i < d.centers.size() && d.centers[i]) c = p.index.at(*d.centers[i]);
    p.centers.push_back(c);
  }
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (p.prototypes[j].border[b] == '-') p.mbn.push_back({b, j});
  for (const auto& c : d.common_border) p.common_border.push_back(p.index.at(c));
  for (const auto& v : q.output_pattern()) p.output.push_back(p.index.at(v));
  return p;
}

/// Wire form of an embedding: values over B(Q), values over N(Q) - B(Q) and
/// the triples-matched flags.
struct EncodedEmbedding {
  std::vector<std::optional<Term>> bnv;
  std::vector<std::optional<Term>> nbnv;
  std::string tm;

  friend bool operator==(const EncodedEmbedding&, const EncodedEmbedding&) = default;
  friend auto operator<=>(const EncodedEmbedding& a, const EncodedEmbedding& b) {
    if (auto c = a.bnv <=> b.bnv; c != 0) return c;
    if (auto c = a.nbnv <=> b.nbnv; c != 0) return c;
    return a.tm <=> b.tm;
  }
};

inline EncodedEmbedding encode(const Embedding& e, const NodeIndex& idx, std::string tm) {
  EncodedEmbedding out;
  std::size_t nb = idx.border_count();
  out.bnv.assign(e.image.begin(), e.image.begin() + static_cast<std::ptrdiff_t>(nb));
  out.nbnv.assign(e.image.begin() + static_cast<std::ptrdiff_t>(nb), e.image.end());
  out.tm = std::move(tm);
  return out;
}

inline Embedding decode(const EncodedEmbedding& enc) {
  Embedding e;
  e.image = enc.bnv;
  e.image.insert(e.image.end(), enc.nbnv.begin(), enc.nbnv.end());
  return e;
}

inline std::string render_value(const std::optional<Term>& v) { return v ? v->render() : "*"; }

inline std::string render_tuple(const std::vector<std::optional<Term>>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += '\t';
    out += render_value(vs[i]);
  }
  return out;
}

/// `(<bnv>|<nbnv>|<tm>)`, tab-separated inside each tuple.
inline std::string to_wire(const EncodedEmbedding& e) {
  std::string tm;
  for (std::size_t i = 0; i < e.tm.size(); ++i) {
    if (i) tm += '\t';
    tm += e.tm[i];
  }
  return "(" + render_tuple(e.bnv) + "|" + render_tuple(e.nbnv) + "|" + tm + ")";
}

namespace detail {

inline std::vector<std::optional<Term>> read_tuple(std::string_view s, std::size_t& pos,
                                                   std::size_t n, char close) {
  std::vector<std::optional<Term>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) {
      if (pos >= s.size() || s[pos] != '\t') throw Error(ErrorCode::kInvalidArgument, "bad wire tuple");
      ++pos;
    }
    if (pos < s.size() && s[pos] == '*') {
      ++pos;
      out.emplace_back();
      continue;
    }
    auto t = read_term(s, pos);
    if (!t) throw Error(ErrorCode::kInvalidArgument, "bad wire term");
    out.emplace_back(std::move(*t));
  }
  if (pos >= s.size() || s[pos] != close) throw Error(ErrorCode::kInvalidArgument, "bad wire tuple end");
  ++pos;
  return out;
}

}  // namespace detail

inline EncodedEmbedding from_wire(std::string_view s, std::size_t n_border, std::size_t n_rest,
                                  std::size_t n_triples) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw Error(ErrorCode::kInvalidArgument, "bad wire embedding");
  std::size_t pos = 1;
  EncodedEmbedding e;
  e.bnv = detail::read_tuple(s, pos, n_border, '|');
  e.nbnv = detail::read_tuple(s, pos, n_rest, '|');
  for (std::size_t i = 0; i < n_triples; ++i) {
    if (i && s[pos++] != '\t') throw Error(ErrorCode::kInvalidArgument, "bad wire flags");
    char f = s[pos++];
    if (f != '+' && f != '-') throw Error(ErrorCode::kInvalidArgument, "bad wire flag");
    e.tm.push_back(f);
  }
  if (pos + 1 != s.size()) throw Error(ErrorCode::kInvalidArgument, "trailing wire data");
  return e;
}

inline std::string subquery_name(std::size_t i) { return "Q" + std::to_string(i + 1); }

inline std::size_t parse_subquery_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'Q') throw Error(ErrorCode::kInvalidArgument, "bad subquery id");
  return std::stoul(std::string(s.substr(1))) - 1;
}

inline nlohmann::json plan_to_json(const QueryPlan& p) {
  using nlohmann::json;
  json subs = json::array();
  for (std::size_t i = 0; i < p.subquery_count(); ++i) {
    json triples = json::array();
    for (const auto& t : p.decomposition.subqueries[i].triples()) triples.push_back(t.render());
    json s = {{"id", subquery_name(i)},
              {"triples", triples},
              {"prototype",
               {{"border", p.prototypes[i].border},
                {"nonBorder", p.prototypes[i].non_border},
                {"triples", p.prototypes[i].triples}}}};
    if (p.decomposition.centers[i]) s["center"] = p.decomposition.centers[i]->render();
    subs.push_back(s);
  }
  json nodes = json::array(), border = json::array(), triples = json::array(), mbn = json::array(),
       cb = json::array();
  for (std::size_t i = 0; i < p.index.size(); ++i)
    (i < p.index.border_count() ? border : nodes).push_back(p.index.node(i).render());
  for (const auto& t : p.triples()) triples.push_back(t.render());
  for (const auto& m : p.mbn) mbn.push_back({p.index.node(m.node).render(), subquery_name(m.subquery)});
  for (auto c : p.common_border) cb.push_back(p.index.node(c).render());
  return {{"method", p.decomposition.method},
          {"triples", triples},
          {"borderNodes", border},
          {"nonBorderNodes", nodes},
          {"mbn", mbn},
          {"commonBorder", cb},
          {"subqueries", subs}};
}

/// Rebuilds the decomposition of `q` listed in a plan file.
inline QueryDecomposition decomposition_from_json(const QueryGraph& q, const nlohmann::json& j) {
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  try {
    for (const auto& s : j.at("subqueries")) {
      TripleSet ts;
      for (const auto& line : s.at("triples")) {
        auto t = parse_triple_line(line.get<std::string>(), 1, true);
        if (!t) throw Error(ErrorCode::kInvalidArgument, "empty triple in plan");
        ts.push_back(*t);
      }
      parts.push_back(canonical(std::move(ts)));
      std::optional<Term> c;
      if (s.contains("center")) c = parse_term(s.at("center").get<std::string>());
      centers.push_back(c);
    }
    return make_query_decomposition(q, std::move(parts), j.value("method", "plan"), std::move(centers));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad plan: ") + e.what());
  }
}

}  // namespace stargraph
