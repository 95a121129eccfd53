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
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "stargraph/error.hpp"

namespace stargraph {

enum class TermKind : std::uint8_t { kIri, kLiteral, kVariable };

/// A node or edge label: an IRI, a plain literal or a query variable.
class Term {
 public:
  Term() = default;
  Term(TermKind kind, std::string lexical)
      : kind_(kind), lexical_(std::move(lexical)) {}

  static Term iri(std::string s) { return {TermKind::kIri, std::move(s)}; }
  static Term literal(std::string s) {
    return {TermKind::kLiteral, std::move(s)};
  }
  static Term variable(std::string s) {
    return {TermKind::kVariable, std::move(s)};
  }

  TermKind kind() const noexcept { return kind_; }
  const std::string& lexical() const noexcept { return lexical_; }

  bool is_iri() const noexcept { return kind_ == TermKind::kIri; }
  bool is_literal() const noexcept { return kind_ == TermKind::kLiteral; }
  bool is_variable() const noexcept { return kind_ == TermKind::kVariable; }
  bool is_constant() const noexcept { return kind_ != TermKind::kVariable; }

  /// N-Triples style token: <iri>, "literal" or ?var.
  std::string render() const {
    switch (kind_) {
      case TermKind::kIri: return "<" + lexical_ + ">";
      case TermKind::kVariable: return "?" + lexical_;
      case TermKind::kLiteral: break;
    }
    std::string out = "\"";
    for (char c : lexical_) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.lexical_ <=> b.lexical_; c != 0) return c;
    return a.kind_ <=> b.kind_;
  }

 private:
  TermKind kind_ = TermKind::kIri;
  std::string lexical_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.lexical()) * 3 +
           static_cast<std::size_t>(t.kind());
  }
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  std::string render() const {
    return subject.render() + " " + predicate.render() + " " +
           object.render() + " .";
  }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple&,
                                          const Triple&) = default;
};

using TermId = std::uint32_t;

/// Sorted, deduplicated endpoints of a triple set.
inline std::vector<Term> nodes_of(std::span<const Triple> triples) {
  std::vector<Term> out;
  out.reserve(triples.size() * 2);
  for (const auto& t : triples) {
    out.push_back(t.subject);
    out.push_back(t.object);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Triple> canonical(std::vector<Triple> triples) {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return triples;
}

/// A non-empty set of ground triples. Terms are interned into ids assigned in
/// canonical term order, and triples are indexed by (p,s,o) and (p,o,s).
class DataGraph {
 public:
  struct IdTriple {
    TermId s, p, o;
  };

  DataGraph() = default;

  explicit DataGraph(std::vector<Triple> triples) {
    if (triples.empty()) throw Error(ErrorCode::kEmptyGraph, "data graph has no triples");
    for (const auto& t : triples) {
      if (t.subject.is_variable() || t.predicate.is_variable() ||
          t.object.is_variable())
        throw Error(ErrorCode::kVariableInData, t.render());
      if (t.subject.is_literal()) throw Error(ErrorCode::kLiteralSubject, t.render());
      if (!t.predicate.is_iri())
        throw Error(ErrorCode::kInvalidArgument, "predicate must be an IRI: " + t.render());
    }
    triples_ = canonical(std::move(triples));
    build_index();
  }

  std::span<const Triple> triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  const std::vector<Term>& nodes() const noexcept { return nodes_; }

  bool contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
  }

  std::optional<TermId> id_of(const Term& t) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), t);
    if (it == terms_.end() || *it != t) return std::nullopt;
    return static_cast<TermId>(it - terms_.begin());
  }
  const Term& term(TermId id) const { return terms_[id]; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool is_node(TermId id) const { return node_flag_[id] != 0; }

  bool contains(TermId s, TermId p, TermId o) const {
    auto r = with_ps(p, s);
    return std::binary_search(
        r.begin(), r.end(), IdTriple{s, p, o},
        [](const IdTriple& a, const IdTriple& b) { return a.o < b.o; });
  }

  std::span<const IdTriple> with_p(TermId p) const {
    auto lo = std::lower_bound(spo_.begin(), spo_.end(), p,
                               [](const IdTriple& a, TermId v) { return a.p < v; });
    auto hi = std::upper_bound(lo, spo_.end(), p,
                               [](TermId v, const IdTriple& a) { return v < a.p; });
    return {lo, hi};
  }

  std::span<const IdTriple> with_ps(TermId p, TermId s) const {
    auto key = std::make_pair(p, s);
    auto lo = std::lower_bound(spo_.begin(), spo_.end(), key, [](const IdTriple& a, auto k) {
      return std::make_pair(a.p, a.s) < k;
    });
    auto hi = std::upper_bound(lo, spo_.end(), key, [](auto k, const IdTriple& a) {
      return k < std::make_pair(a.p, a.s);
    });
    return {lo, hi};
  }

  std::span<const IdTriple> with_po(TermId p, TermId o) const {
    auto key = std::make_pair(p, o);
    auto lo = std::lower_bound(pos_.begin(), pos_.end(), key, [](const IdTriple& a, auto k) {
      return std::make_pair(a.p, a.o) < k;
    });
    auto hi = std::upper_bound(lo, pos_.end(), key, [](auto k, const IdTriple& a) {
      return k < std::make_pair(a.p, a.o);
    });
    return {lo, hi};
  }

  friend bool operator==(const DataGraph& a, const DataGraph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  void build_index() {
    std::vector<Term> all;
    all.reserve(triples_.size() * 3);
    for (const auto& t : triples_) {
      all.push_back(t.subject);
      all.push_back(t.predicate);
      all.push_back(t.object);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    terms_ = std::move(all);
    node_flag_.assign(terms_.size(), 0);
    spo_.reserve(triples_.size());
    for (const auto& t : triples_) {
      IdTriple it{*id_of(t.subject), *id_of(t.predicate), *id_of(t.object)};
      node_flag_[it.s] = node_flag_[it.o] = 1;
      spo_.push_back(it);
    }
    pos_ = spo_;
    std::sort(spo_.begin(), spo_.end(), [](const IdTriple& a, const IdTriple& b) {
      return std::tie(a.p, a.s, a.o) < std::tie(b.p, b.s, b.o);
    });
    std::sort(pos_.begin(), pos_.end(), [](const IdTriple& a, const IdTriple& b) {
      return std::tie(a.p, a.o, a.s) < std::tie(b.p, b.o, b.s);
    });
    for (TermId i = 0; i < terms_.size(); ++i)
      if (node_flag_[i]) nodes_.push_back(terms_[i]);
  }

  std::vector<Triple> triples_;
  std::vector<Term> terms_;
  std::vector<char> node_flag_;
  std::vector<Term> nodes_;
  std::vector<IdTriple> spo_;
  std::vector<IdTriple> pos_;
};

/// A non-empty set of triple patterns plus its output pattern (the variables
/// in first-appearance order over the canonical triple order).
class QueryGraph {
 public:
  QueryGraph() = default;

  explicit QueryGraph(std::vector<Triple> triples) {
    if (triples.empty()) throw Error(ErrorCode::kEmptyQuery, "query has no triples");
    for (const auto& t : triples) {
      if (t.predicate.is_variable()) throw Error(ErrorCode::kVariablePredicate, t.render());
      if (!t.predicate.is_iri())
        throw Error(ErrorCode::kInvalidArgument, "predicate must be an IRI: " + t.render());
      if (t.subject.is_literal()) throw Error(ErrorCode::kLiteralSubject, t.render());
    }
    triples_ = canonical(std::move(triples));
    nodes_ = nodes_of(triples_);
    for (const auto& t : triples_) {
      for (const Term* x : {&t.subject, &t.object}) {
        if (x->is_variable() &&
            std::find(output_.begin(), output_.end(), *x) == output_.end())
          output_.push_back(*x);
      }
    }
  }

  std::span<const Triple> triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  const std::vector<Term>& nodes() const noexcept { return nodes_; }
  const std::vector<Term>& output_pattern() const noexcept { return output_; }
  bool is_boolean() const noexcept { return output_.empty(); }

  std::vector<Term> variables() const {
    std::vector<Term> v = output_;
    std::sort(v.begin(), v.end());
    return v;
  }

  bool contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
  }

  std::string render() const {
    std::string out;
    for (const auto& t : triples_) out += t.render() + "\n";
    return out;
  }

  friend bool operator==(const QueryGraph& a, const QueryGraph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  std::vector<Triple> triples_;
  std::vector<Term> nodes_;
  std::vector<Term> output_;
};

template <class A, class B>
bool is_subgraph(const A& a, const B& b) {
  auto x = a.triples();
  auto y = b.triples();
  return std::includes(y.begin(), y.end(), x.begin(), x.end());
}

struct QueryClasses {
  bool path = false;
  bool generalized_star = false;
  bool s_query = false;
  bool o_query = false;
  bool so_query = false;

  friend bool operator==(const QueryClasses&, const QueryClasses&) = default;
};

/// Nodes touching every triple, in canonical order.
inline std::vector<Term> central_nodes(std::span<const Triple> triples) {
  std::vector<Term> out;
  for (const auto& n : nodes_of(triples)) {
    bool all = std::all_of(triples.begin(), triples.end(), [&](const Triple& t) {
      return t.subject == n || t.object == n;
    });
    if (all) out.push_back(n);
  }
  return out;
}

/// Centres c with every triple touching c and c the subject of at least one.
inline std::vector<Term> so_centers(std::span<const Triple> triples) {
  std::vector<Term> out;
  for (const auto& c : central_nodes(triples)) {
    bool subj = std::any_of(triples.begin(), triples.end(),
                            [&](const Triple& t) { return t.subject == c; });
    if (subj) out.push_back(c);
  }
  return out;
}

inline bool is_so_query(std::span<const Triple> triples) {
  return !so_centers(triples).empty();
}

inline bool is_generalized_star(std::span<const Triple> triples) {
  return !central_nodes(triples).empty();
}

/// True when the triples can be ordered as a chain (v0,p1,v1),(v1,p2,v2),...
/// i.e. they form a directed trail using every triple once.
inline bool is_path(std::span<const Triple> triples) {
  if (triples.empty()) return false;
  auto nodes = nodes_of(triples);
  auto idx = [&](const Term& t) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), t) -
                                    nodes.begin());
  };
  std::vector<int> balance(nodes.size(), 0);
  std::vector<std::size_t> parent(nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& t : triples) {
    auto s = idx(t.subject), o = idx(t.object);
    ++balance[s];
    --balance[o];
    parent[find(s)] = find(o);
  }
  auto root = find(0);
  int plus = 0, minus = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (find(i) != root) return false;
    if (balance[i] == 1) ++plus;
    else if (balance[i] == -1) ++minus;
    else if (balance[i] != 0) return false;
  }
  return (plus == 0 && minus == 0) || (plus == 1 && minus == 1);
}

inline QueryClasses classify_query(std::span<const Triple> triples) {
  QueryClasses c;
  c.path = is_path(triples);
  for (const auto& n : central_nodes(triples)) {
    c.generalized_star = true;
    bool all_subj = true, all_obj = true, any_subj = false;
    for (const auto& t : triples) {
      bool s = t.subject == n, o = t.object == n;
      all_subj = all_subj && s;
      all_obj = all_obj && o;
      any_subj = any_subj || s;
    }
    c.s_query = c.s_query || all_subj;
    c.o_query = c.o_query || all_obj;
    c.so_query = c.so_query || any_subj;
  }
  return c;
}

inline QueryClasses classify_query(const QueryGraph& q) {
  return classify_query(q.triples());
}

}  // namespace stargraph
