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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

/// Enumeration I of query nodes: border nodes first, then the rest, each
/// group in canonical order.
class NodeIndex {
 public:
  NodeIndex() = default;
  NodeIndex(std::vector<Term> border, std::vector<Term> non_border)
      : border_count_(border.size()) {
    std::sort(border.begin(), border.end());
    std::sort(non_border.begin(), non_border.end());
    nodes_ = std::move(border);
    nodes_.insert(nodes_.end(), non_border.begin(), non_border.end());
    for (std::size_t i = 0; i < nodes_.size(); ++i) sorted_.emplace_back(nodes_[i], i);
    std::sort(sorted_.begin(), sorted_.end());
  }

  /// All nodes of `q`, none of them border nodes.
  static NodeIndex of(const QueryGraph& q) { return NodeIndex({}, q.nodes()); }

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t border_count() const noexcept { return border_count_; }
  const Term& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Term>& nodes() const noexcept { return nodes_; }

  std::optional<std::size_t> find(const Term& t) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), t,
                               [](const auto& p, const Term& v) { return p.first < v; });
    if (it == sorted_.end() || it->first != t) return std::nullopt;
    return it->second;
  }
  std::size_t at(const Term& t) const {
    auto i = find(t);
    if (!i) throw Error(ErrorCode::kInvalidArgument, "node not in enumeration: " + t.render());
    return *i;
  }

 private:
  std::vector<Term> nodes_;
  std::size_t border_count_ = 0;
  std::vector<std::pair<Term, std::size_t>> sorted_;
};

/// Partial mapping from query nodes (positions of a NodeIndex) to data terms.
struct Embedding {
  std::vector<std::optional<Term>> image;

  Embedding() = default;
  explicit Embedding(std::size_t n) : image(n) {}

  bool bound(std::size_t i) const { return image[i].has_value(); }
  std::size_t bound_count() const {
    return static_cast<std::size_t>(
        std::count_if(image.begin(), image.end(), [](auto& v) { return v.has_value(); }));
  }

  friend bool operator==(const Embedding&, const Embedding&) = default;
  friend auto operator<=>(const Embedding& a, const Embedding& b) { return a.image <=> b.image; }
};

inline bool is_compatible(const Embedding& a, const Embedding& b) {
  std::size_t n = std::min(a.image.size(), b.image.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a.image[i] && b.image[i] && *a.image[i] != *b.image[i]) return false;
  return true;
}

inline Embedding join(const Embedding& a, const Embedding& b) {
  if (!is_compatible(a, b)) throw Error(ErrorCode::kIncompatibleEmbeddings, "bindings disagree");
  Embedding out(std::max(a.image.size(), b.image.size()));
  for (std::size_t i = 0; i < out.image.size(); ++i) {
    if (i < a.image.size() && a.image[i]) out.image[i] = a.image[i];
    else if (i < b.image.size()) out.image[i] = b.image[i];
  }
  return out;
}

/// A useful partial embedding plus the pattern triples it matches.
struct PartialEmbedding {
  Embedding embedding;
  std::vector<char> matched;

  friend bool operator==(const PartialEmbedding&, const PartialEmbedding&) = default;
  friend auto operator<=>(const PartialEmbedding& a, const PartialEmbedding& b) {
    if (auto c = a.embedding <=> b.embedding; c != 0) return c;
    return a.matched <=> b.matched;
  }
};

namespace detail {

constexpr TermId kUnbound = std::numeric_limits<TermId>::max();

// A pattern triple resolved against one data graph.
struct CompiledTriple {
  std::size_t s, o;                 // node positions
  std::optional<TermId> p;          // absent when the predicate is not in the graph
};

struct CompiledPattern {
  std::vector<CompiledTriple> triples;
  std::vector<std::size_t> nodes;   // positions touched by the pattern
  std::vector<TermId> fixed;        // per position: constant's id, or kUnbound
  std::vector<char> absent;         // per position: a constant that is not a node of g
  bool constant_missing = false;
};

inline CompiledPattern compile(std::span<const Triple> pattern, const NodeIndex& idx,
                               const DataGraph& g) {
  CompiledPattern c;
  c.fixed.assign(idx.size(), kUnbound);
  c.absent.assign(idx.size(), 0);
  for (const auto& t : pattern) {
    CompiledTriple ct{idx.at(t.subject), idx.at(t.object), g.id_of(t.predicate)};
    c.triples.push_back(ct);
    c.nodes.push_back(ct.s);
    c.nodes.push_back(ct.o);
    for (const Term* x : {&t.subject, &t.object}) {
      if (x->is_variable()) continue;
      auto id = g.id_of(*x);
      if (id && g.is_node(*id)) {
        c.fixed[idx.at(*x)] = *id;
      } else {
        c.absent[idx.at(*x)] = 1;
        c.constant_missing = true;
      }
    }
  }
  std::sort(c.nodes.begin(), c.nodes.end());
  c.nodes.erase(std::unique(c.nodes.begin(), c.nodes.end()), c.nodes.end());
  return c;
}

// Calls f(s, o) for each data triple matching `t` under `b`.
template <class F>
void for_each_candidate(const DataGraph& g, const CompiledTriple& t, const std::vector<TermId>& b, F&& f) {
  if (!t.p) return;
  TermId s = b[t.s], o = b[t.o];
  if (s != kUnbound && o != kUnbound) {
    if (g.contains(s, *t.p, o)) f(s, o);
  } else if (s != kUnbound) {
    for (const auto& x : g.with_ps(*t.p, s))
      if (t.s != t.o || x.o == s) f(x.s, x.o);
  } else if (o != kUnbound) {
    for (const auto& x : g.with_po(*t.p, o)) f(x.s, x.o);
  } else {
    for (const auto& x : g.with_p(*t.p))
      if (t.s != t.o || x.s == x.o) f(x.s, x.o);
  }
}

// Static matching order: most bound endpoints first, then fewest candidates.
inline std::vector<std::size_t> match_order(const CompiledPattern& c, const DataGraph& g) {
  std::size_t n = c.triples.size();
  std::vector<char> bound(c.fixed.size(), 0), done(n, 0);
  for (std::size_t i = 0; i < c.fixed.size(); ++i) bound[i] = c.fixed[i] != kUnbound;
  std::vector<std::size_t> order;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    std::pair<int, std::size_t> best_key{-1, 0};
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const auto& t = c.triples[i];
      int b = bound[t.s] + bound[t.o];
      std::size_t cand = t.p ? g.with_p(*t.p).size() : 0;
      std::pair<int, std::size_t> key{b, std::numeric_limits<std::size_t>::max() - cand};
      if (best == n || key > best_key) best = i, best_key = key;
    }
    done[best] = 1;
    bound[c.triples[best].s] = bound[c.triples[best].o] = 1;
    order.push_back(best);
  }
  return order;
}

inline Embedding to_embedding(const std::vector<TermId>& b, const CompiledPattern& c, const DataGraph& g,
                              std::size_t n) {
  Embedding e(n);
  for (auto pos : c.nodes)
    if (b[pos] != kUnbound) e.image[pos] = g.term(b[pos]);
  return e;
}

}  // namespace detail

/// Total embeddings of `pattern` in `g`, as embeddings over `idx`, sorted.
inline std::vector<Embedding> enumerate_total(std::span<const Triple> pattern, const NodeIndex& idx,
                                              const DataGraph& g) {
  using namespace detail;
  auto c = compile(pattern, idx, g);
  std::vector<Embedding> out;
  if (c.constant_missing) return out;
  auto order = match_order(c, g);
  std::vector<TermId> b = c.fixed;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == order.size()) {
      out.push_back(to_embedding(b, c, g, idx.size()));
      return;
    }
    const auto& t = c.triples[order[k]];
    for_each_candidate(g, t, b, [&](TermId s, TermId o) {
      bool set_s = b[t.s] == kUnbound, set_o = b[t.o] == kUnbound && t.o != t.s;
      if (set_s) b[t.s] = s;
      if (set_o) b[t.o] = o;
      self(self, k + 1);
      if (set_s) b[t.s] = kUnbound;
      if (set_o) b[t.o] = kUnbound;
    });
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Embedding> enumerate_total(const QueryGraph& q, const DataGraph& g) {
  return enumerate_total(q.triples(), NodeIndex::of(q), g);
}

/// Every useful partial embedding of `pattern` in segment `g`, whose border
/// nodes are flagged by `border_mask` (indexed by g's term ids).
inline std::vector<PartialEmbedding> enumerate_useful_partial(std::span<const Triple> pattern,
                                                              const NodeIndex& idx, const DataGraph& g,
                                                              const std::vector<char>& border_mask) {
  using namespace detail;
  auto c = compile(pattern, idx, g);
  std::size_t n = c.triples.size();
  auto order = match_order(c, g);
  std::vector<TermId> b = c.fixed;
  // 0 = undecided, 1 = matched, 2 = left unmatched.
  std::vector<char> state(n, 0);
  std::vector<PartialEmbedding> out;

  auto forcing = [&](TermId v) {
    return v != kUnbound && !border_mask[v] && !g.term(v).is_literal();
  };
  // A freshly bound forcing value must not touch a triple left unmatched.
  auto clash = [&](std::size_t pos) {
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] == 2 && (c.triples[i].s == pos || c.triples[i].o == pos)) return true;
    return false;
  };

  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& t = c.triples[i];
        if (state[i] == 1) {
          any = true;
          continue;
        }
        if (forcing(b[t.s]) || forcing(b[t.o])) return;
        if (b[t.s] != kUnbound && b[t.o] != kUnbound && t.p && g.contains(b[t.s], *t.p, b[t.o])) return;
      }
      if (!any) return;
      PartialEmbedding pe{to_embedding(b, c, g, idx.size()), std::vector<char>(n, 0)};
      for (std::size_t i = 0; i < n; ++i) pe.matched[i] = state[i] == 1;
      out.push_back(std::move(pe));
      return;
    }
    std::size_t ti = order[k];
    const auto& t = c.triples[ti];

    state[ti] = 1;
    auto extend = [&](TermId s, TermId o) {
      bool set_s = b[t.s] == kUnbound, set_o = b[t.o] == kUnbound && t.o != t.s;
      if (set_s) b[t.s] = s;
      if (set_o) b[t.o] = o;
      bool ok = !(set_s && forcing(s) && clash(t.s)) && !(set_o && forcing(o) && clash(t.o));
      if (ok) self(self, k + 1);
      if (set_s) b[t.s] = kUnbound;
      if (set_o) b[t.o] = kUnbound;
    };
    if (!c.absent[t.s] && !c.absent[t.o]) for_each_candidate(g, t, b, extend);

    if (!forcing(b[t.s]) && !forcing(b[t.o])) {
      state[ti] = 2;
      self(self, k + 1);
    }
    state[ti] = 0;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Definitional check that `e` is a useful partial embedding of `pattern` in
/// segment `g` with border set `border` (sorted).
inline bool is_useful(const Embedding& e, std::span<const Triple> pattern, const NodeIndex& idx,
                      const DataGraph& g, const std::vector<Term>& border) {
  auto val = [&](const Term& n) -> const std::optional<Term>& { return e.image[idx.at(n)]; };
  auto image_in = [&](const Triple& t) {
    auto& s = val(t.subject);
    auto& o = val(t.object);
    return s && o && g.contains(Triple{*s, t.predicate, *o});
  };
  auto is_node = [&](const Term& x) {
    return std::binary_search(g.nodes().begin(), g.nodes().end(), x);
  };
  std::vector<Term> pnodes = nodes_of(pattern);
  for (std::size_t i = 0; i < e.image.size(); ++i)
    if (e.image[i] && !std::binary_search(pnodes.begin(), pnodes.end(), idx.node(i))) return false;

  bool nontrivial = false;
  for (const auto& t : pattern) nontrivial = nontrivial || image_in(t);
  if (!nontrivial) return false;

  for (const auto& n : pnodes) {
    auto& v = val(n);
    if (n.is_constant()) {
      if (v && (*v != n || !is_node(n))) return false;
      if (is_node(n) && !v) return false;
      continue;
    }
    if (!v) continue;
    if (!is_node(*v)) return false;
    bool witnessed = std::any_of(pattern.begin(), pattern.end(), [&](const Triple& t) {
      return (t.subject == n || t.object == n) && image_in(t);
    });
    if (!witnessed) return false;
  }

  auto forcing = [&](const std::optional<Term>& v) {
    return v && !v->is_literal() && !std::binary_search(border.begin(), border.end(), *v);
  };
  for (const auto& t : pattern)
    if ((forcing(val(t.subject)) || forcing(val(t.object))) && !image_in(t)) return false;
  return true;
}

}  // namespace stargraph
