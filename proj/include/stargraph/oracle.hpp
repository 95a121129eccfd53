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
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "stargraph/answers.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

// Reference evaluator. It shares no matching code with the distributed
// algorithms: triples are indexed by term, variables bound in a map, and
// pattern triples are matched in order of ascending candidate count.
namespace oracle_detail {

struct Index {
  std::unordered_map<Term, std::vector<const Triple*>, TermHash> by_pred;
  std::map<std::pair<Term, Term>, std::vector<const Triple*>> by_ps, by_po;

  explicit Index(std::span<const Triple> g) {
    for (const auto& t : g) {
      by_pred[t.predicate].push_back(&t);
      by_ps[{t.predicate, t.subject}].push_back(&t);
      by_po[{t.predicate, t.object}].push_back(&t);
    }
  }

  std::span<const Triple* const> lookup(const Triple& pat, const std::map<Term, Term>& b) const {
    auto value = [&](const Term& x) -> const Term* {
      if (!x.is_variable()) return &x;
      auto it = b.find(x);
      return it == b.end() ? nullptr : &it->second;
    };
    static const std::vector<const Triple*> none;
    if (auto s = value(pat.subject)) {
      auto it = by_ps.find({pat.predicate, *s});
      return it == by_ps.end() ? std::span<const Triple* const>(none) : std::span<const Triple* const>(it->second);
    }
    if (auto o = value(pat.object)) {
      auto it = by_po.find({pat.predicate, *o});
      return it == by_po.end() ? std::span<const Triple* const>(none) : std::span<const Triple* const>(it->second);
    }
    auto it = by_pred.find(pat.predicate);
    return it == by_pred.end() ? std::span<const Triple* const>(none) : std::span<const Triple* const>(it->second);
  }
};

template <class OnMatch>
void match_all(const QueryGraph& q, const DataGraph& g, OnMatch&& on_match) {
  std::vector<Triple> data(g.triples().begin(), g.triples().end());
  Index idx(data);
  std::vector<Triple> pats(q.triples().begin(), q.triples().end());
  std::map<Term, Term> b;
  std::vector<char> done(pats.size(), 0);

  auto bind = [&](const Term& x, const Term& v, std::vector<Term>& fresh) {
    if (!x.is_variable()) return x == v;
    auto [it, ins] = b.emplace(x, v);
    if (ins) fresh.push_back(x);
    return it->second == v;
  };
  auto rec = [&](auto&& self, std::size_t depth) -> void {
    if (depth == pats.size()) {
      on_match(b);
      return;
    }
    std::size_t best = pats.size();
    std::size_t best_n = 0;
    for (std::size_t i = 0; i < pats.size(); ++i) {
      if (done[i]) continue;
      auto n = idx.lookup(pats[i], b).size();
      if (best == pats.size() || n < best_n) best = i, best_n = n;
    }
    done[best] = 1;
    const auto& p = pats[best];
    for (const Triple* t : idx.lookup(p, b)) {
      std::vector<Term> fresh;
      if (bind(p.subject, t->subject, fresh) && bind(p.object, t->object, fresh)) self(self, depth + 1);
      for (const auto& f : fresh) b.erase(f);
    }
    done[best] = 0;
  };
  rec(rec, 0);
}

}  // namespace oracle_detail

inline AnswerSet oracle_answers(const QueryGraph& q, const DataGraph& g) {
  AnswerSet out;
  auto vars = q.output_pattern();
  oracle_detail::match_all(q, g, [&](const std::map<Term, Term>& b) {
    Answer a;
    for (const auto& v : vars) a.push_back(b.at(v));
    out.insert(std::move(a));
  });
  return out;
}

/// Number of total embeddings of `q` in `g`. Embeddings are determined by
/// their variable bindings, and each binding is reached once.
inline std::uint64_t count_embeddings(const QueryGraph& q, const DataGraph& g) {
  std::uint64_t n = 0;
  oracle_detail::match_all(q, g, [&](const std::map<Term, Term>&) { ++n; });
  return n;
}

}  // namespace stargraph
