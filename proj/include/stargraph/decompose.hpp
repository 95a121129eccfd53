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
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/rdf.hpp"

namespace stargraph {

struct QueryDecomposition {
  std::string method;
  std::vector<QueryGraph> subqueries;
  std::vector<std::vector<Term>> border_nodes;
  std::vector<Term> common_border;
  bool redundant = false;
  // Central node per subquery, set by the star-producing algorithms.
  std::vector<std::optional<Term>> centers;

  std::size_t size() const noexcept { return subqueries.size(); }
};

using TripleSet = std::vector<Triple>;

namespace detail {

inline bool has(const TripleSet& s, const Triple& t) {
  return std::binary_search(s.begin(), s.end(), t);
}

inline TripleSet minus(const TripleSet& a, const TripleSet& b) {
  TripleSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline TripleSet intersect_with(const TripleSet& a, const TripleSet& b) {
  TripleSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline TripleSet unite(const TripleSet& a, const TripleSet& b) {
  TripleSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

template <class Pred>
TripleSet filter(const TripleSet& s, Pred pred) {
  TripleSet out;
  std::copy_if(s.begin(), s.end(), std::back_inserter(out), pred);
  return out;
}

inline TripleSet incident(const TripleSet& s, const Term& n) {
  return filter(s, [&](const Triple& t) { return t.subject == n || t.object == n; });
}

inline bool has_subject(const TripleSet& s, const Term& n) {
  return std::any_of(s.begin(), s.end(), [&](const Triple& t) { return t.subject == n; });
}

}  // namespace detail

/// Preferred centre of a star-shaped triple set: an so-centre when one exists,
/// otherwise any centre; canonical-min in both cases.
inline std::optional<Term> star_center(std::span<const Triple> triples) {
  auto so = so_centers(triples);
  if (!so.empty()) return so.front();
  auto c = central_nodes(triples);
  if (!c.empty()) return c.front();
  return std::nullopt;
}

/// Builds the decomposition record for the given subqueries and derives the
/// border and common border sets.
inline QueryDecomposition make_query_decomposition(const QueryGraph& q, std::vector<TripleSet> parts,
                                                   std::string method,
                                                   std::vector<std::optional<Term>> centers = {}) {
  QueryDecomposition d;
  d.method = std::move(method);
  for (auto& p : parts) {
    for (const auto& t : p)
      if (!q.contains(t)) throw Error(ErrorCode::kInvalidArgument, "triple not in query: " + t.render());
    d.subqueries.emplace_back(std::move(p));
  }
  std::size_t n = d.subqueries.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> b;
    for (const auto& node : d.subqueries[i].nodes()) {
      if (node.is_literal()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto& nj = d.subqueries[j].nodes();
        if (std::binary_search(nj.begin(), nj.end(), node)) {
          b.push_back(node);
          break;
        }
      }
    }
    d.border_nodes.push_back(std::move(b));
  }
  if (n > 0) {
    d.common_border = d.border_nodes[0];
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Term> x;
      std::set_intersection(d.common_border.begin(), d.common_border.end(),
                            d.border_nodes[i].begin(), d.border_nodes[i].end(), std::back_inserter(x));
      d.common_border = std::move(x);
    }
  }
  for (std::size_t i = 0; i < n && !d.redundant; ++i)
    for (std::size_t j = i + 1; j < n && !d.redundant; ++j) {
      auto a = d.subqueries[i].triples(), b = d.subqueries[j].triples();
      TripleSet x;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(x));
      d.redundant = !x.empty();
    }
  if (centers.size() != n) centers.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i)
    if (!centers[i]) centers[i] = star_center(d.subqueries[i].triples());
  d.centers = std::move(centers);
  return d;
}

inline bool is_node_cover(const QueryGraph& q, const std::vector<Term>& cover) {
  auto in = [&](const Term& t) { return std::find(cover.begin(), cover.end(), t) != cover.end(); };
  return std::all_of(q.triples().begin(), q.triples().end(),
                     [&](const Triple& t) { return in(t.subject) || in(t.object); });
}

/// One generalized star per cover node v: the triples whose object is v,
/// plus the triples with subject v whose object is outside the cover. Stars
/// are numbered in cover order; empty ones are dropped.
inline QueryDecomposition star_decompose_from_cover(const QueryGraph& q, const std::vector<Term>& cover) {
  if (!is_node_cover(q, cover)) throw Error(ErrorCode::kNotANodeCover, "some triple has no endpoint in the cover");
  auto in_cover = [&](const Term& t) { return std::find(cover.begin(), cover.end(), t) != cover.end(); };
  TripleSet all(q.triples().begin(), q.triples().end());
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  for (const auto& v : cover) {
    TripleSet star = detail::filter(all, [&](const Triple& t) {
      return t.object == v || (t.subject == v && !in_cover(t.object));
    });
    if (star.empty() || std::find(parts.begin(), parts.end(), star) != parts.end()) continue;
    parts.push_back(std::move(star));
    centers.push_back(v);
  }
  return make_query_decomposition(q, std::move(parts), "node-cover", std::move(centers));
}

namespace detail {

struct Star {
  Term center;
  TripleSet triples;
};

// Maximal so-query of every node that is the subject of some triple, in
// canonical node order.
inline std::vector<Star> init_so_stars(const TripleSet& q) {
  std::vector<Star> out;
  for (const auto& n : nodes_of(q)) {
    if (n.is_literal() || !has_subject(q, n)) continue;
    out.push_back({n, incident(q, n)});
  }
  return out;
}

}  // namespace detail

inline QueryDecomposition naive_decompose(const QueryGraph& q) {
  TripleSet all(q.triples().begin(), q.triples().end());
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  for (auto& s : detail::init_so_stars(all)) {
    if (std::find(parts.begin(), parts.end(), s.triples) != parts.end()) continue;
    parts.push_back(s.triples);
    centers.push_back(s.center);
  }
  return make_query_decomposition(q, std::move(parts), "naive", std::move(centers));
}

inline QueryDecomposition min_res(const QueryGraph& q) {
  using namespace detail;
  TripleSet all(q.triples().begin(), q.triples().end());
  auto var = [](const Term& t) { return t.is_variable(); };
  TripleSet t_so = filter(all, [&](auto& t) { return var(t.subject) && var(t.object); });
  TripleSet t_sub = filter(all, [&](auto& t) { return var(t.subject) && !var(t.object); });
  TripleSet t_obj = filter(all, [&](auto& t) { return !var(t.subject) && var(t.object); });
  TripleSet t_c = filter(all, [&](auto& t) { return !var(t.subject) && !var(t.object); });

  std::vector<TripleSet> r;
  std::vector<std::optional<Term>> centers;
  auto add = [&](TripleSet s, const Term& c) {
    if (std::find(r.begin(), r.end(), s) != r.end()) return;
    r.push_back(std::move(s));
    centers.push_back(c);
  };
  auto used = [&] {
    TripleSet u;
    for (auto& s : r) u = unite(u, s);
    return u;
  };
  auto subj = [](const TripleSet& s, const Term& n) {
    return filter(s, [&](auto& t) { return t.subject == n; });
  };
  auto obj = [](const TripleSet& s, const Term& n) {
    return filter(s, [&](auto& t) { return t.object == n; });
  };

  for (const auto& t : t_so) {
    TripleSet qs = unite(unite({t}, subj(t_sub, t.subject)), obj(t_obj, t.subject));
    TripleSet s = subj(t_sub, t.object);
    TripleSet qo;
    if (!s.empty()) qo = unite(unite({t}, s), obj(t_obj, t.object));
    if (qs.size() >= qo.size()) add(qs, t.subject);
    else add(qo, t.object);
  }
  t_sub = minus(t_sub, used());
  t_obj = minus(t_obj, used());

  while (!t_sub.empty()) {
    Triple t = t_sub.front();
    TripleSet qp = unite(unite({t}, subj(t_sub, t.subject)), obj(t_obj, t.subject));
    Term center = t.subject;
    if (qp.size() == 1) {
      TripleSet s = subj(t_c, t.object);
      if (!s.empty()) {
        qp = unite(unite({t}, s), obj(t_c, t.object));
        center = t.object;
      }
    }
    t_sub = minus(t_sub, qp);
    t_obj = minus(t_obj, qp);
    add(qp, center);
  }

  for (const auto& t : t_obj) add(unite(unite({t}, subj(t_c, t.subject)), obj(t_c, t.subject)), t.subject);

  t_c = minus(t_c, used());
  while (!t_c.empty()) {
    Triple t = t_c.front();
    TripleSet qs = unite(unite({t}, subj(t_c, t.subject)), obj(t_c, t.subject));
    TripleSet s = subj(t_c, t.object);
    TripleSet qo;
    if (!s.empty()) qo = unite(unite({t}, s), obj(t_c, t.object));
    bool use_s = qs.size() >= qo.size();
    const TripleSet& pick = use_s ? qs : qo;
    t_c = minus(t_c, pick);
    add(pick, use_s ? t.subject : t.object);
  }
  return make_query_decomposition(q, std::move(r), "min-res", std::move(centers));
}

/// Exhaustive search for a minimum-cardinality cover by naive stars.
inline QueryDecomposition min_subquery(const QueryGraph& q, std::size_t max_stars = 16) {
  auto naive = naive_decompose(q);
  std::size_t k = naive.size();
  if (k > max_stars)
    throw Error(ErrorCode::kSearchSpaceTooLarge,
                std::to_string(k) + " candidate stars exceed the limit of " + std::to_string(max_stars));
  std::size_t total = q.size();
  // Masks in increasing size, then increasing lexicographic order of the
  // chosen indices (stars are already in canonical centre order).
  for (std::size_t size = 1; size <= k; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      TripleSet cover;
      for (auto i : pick) {
        TripleSet s(naive.subqueries[i].triples().begin(), naive.subqueries[i].triples().end());
        cover = detail::unite(cover, s);
      }
      if (cover.size() == total) {
        std::vector<TripleSet> parts;
        std::vector<std::optional<Term>> centers;
        for (auto i : pick) {
          parts.emplace_back(naive.subqueries[i].triples().begin(), naive.subqueries[i].triples().end());
          centers.push_back(naive.centers[i]);
        }
        return make_query_decomposition(q, std::move(parts), "min-subquery", std::move(centers));
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == k - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "naive stars do not cover the query");
}

namespace detail {

// Index of the largest star; ties go to the earliest (canonical) centre.
inline std::size_t pick_largest(const std::vector<Star>& stars) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < stars.size(); ++i)
    if (stars[i].triples.size() > stars[best].triples.size()) best = i;
  return best;
}

// Runs max-degree selection. Each step reports the chosen centre and its
// residual star.
template <class OnPick>
void max_degree_walk(const TripleSet& all, OnPick on_pick) {
  auto stars = init_so_stars(all);
  TripleSet covered;
  while (!stars.empty()) {
    auto i = pick_largest(stars);
    Star chosen = stars[i];
    on_pick(chosen);
    covered = unite(covered, chosen.triples);
    std::vector<Star> next;
    for (std::size_t j = 0; j < stars.size(); ++j) {
      if (j == i) continue;
      TripleSet rest = minus(stars[j].triples, covered);
      if (has_subject(rest, stars[j].center)) next.push_back({stars[j].center, std::move(rest)});
    }
    stars = std::move(next);
  }
}

}  // namespace detail

inline QueryDecomposition max_degree(const QueryGraph& q) {
  TripleSet all(q.triples().begin(), q.triples().end());
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  detail::max_degree_walk(all, [&](const detail::Star& s) {
    parts.push_back(s.triples);
    centers.push_back(s.center);
  });
  return make_query_decomposition(q, std::move(parts), "max-degree", std::move(centers));
}

inline QueryDecomposition max_degree_with_redundancy(const QueryGraph& q) {
  TripleSet all(q.triples().begin(), q.triples().end());
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  detail::max_degree_walk(all, [&](const detail::Star& s) {
    TripleSet extra = detail::filter(detail::minus(all, s.triples), [&](const Triple& t) {
      return (t.subject == s.center && !t.object.is_variable()) ||
             (t.object == s.center && !t.subject.is_variable());
    });
    parts.push_back(detail::unite(s.triples, extra));
    centers.push_back(s.center);
  });
  return make_query_decomposition(q, std::move(parts), "max-degree-redundant", std::move(centers));
}

inline QueryDecomposition max_degree_with_reshaping(const QueryGraph& q) {
  using namespace detail;
  TripleSet all(q.triples().begin(), q.triples().end());
  auto stars = init_so_stars(all);
  TripleSet covered;
  std::vector<TripleSet> parts;
  std::vector<std::optional<Term>> centers;
  while (!stars.empty()) {
    std::size_t best = 0;
    std::size_t best_nc = minus(stars[0].triples, covered).size();
    for (std::size_t i = 1; i < stars.size(); ++i) {
      auto nc = minus(stars[i].triples, covered).size();
      if (nc > best_nc) best = i, best_nc = nc;
    }
    Star chosen = stars[best];
    TripleSet fresh = minus(chosen.triples, covered);
    std::optional<TripleSet> pick;
    if (has_subject(fresh, chosen.center)) {
      pick = fresh;
    } else {
      TripleSet donors = filter(intersect_with(chosen.triples, covered),
                                [&](const Triple& t) { return t.subject == chosen.center; });
      for (const auto& tp : donors) {
        auto f = std::find_if(parts.begin(), parts.end(), [&](auto& p) { return has(p, tp); });
        TripleSet reduced = minus(*f, {tp});
        if (reduced.empty() || !is_so_query(reduced)) continue;
        *f = std::move(reduced);
        auto fi = static_cast<std::size_t>(f - parts.begin());
        auto so = so_centers(*f);
        if (std::find(so.begin(), so.end(), *centers[fi]) == so.end()) centers[fi] = so.front();
        pick = unite(fresh, {tp});
        break;
      }
    }
    if (pick) {
      covered = unite(covered, *pick);
      parts.push_back(std::move(*pick));
      centers.push_back(chosen.center);
    }
    std::vector<Star> next;
    for (std::size_t j = 0; j < stars.size(); ++j)
      if (j != best && !minus(stars[j].triples, covered).empty()) next.push_back(stars[j]);
    stars = std::move(next);
  }
  return make_query_decomposition(q, std::move(parts), "max-degree-reshaping", std::move(centers));
}

struct ValidationReport {
  bool is_decomposition = false;
  bool is_non_redundant = false;
  bool all_so_queries = false;
  bool all_generalized_stars = false;
  std::size_t max_variables_per_subquery = 0;
  std::size_t subquery_count = 0;
};

inline ValidationReport validate_decomposition(const QueryGraph& q, const QueryDecomposition& d) {
  ValidationReport r;
  r.subquery_count = d.size();
  TripleSet all(q.triples().begin(), q.triples().end());
  TripleSet cover;
  std::size_t total = 0;
  bool inside = true;
  r.all_so_queries = r.all_generalized_stars = !d.subqueries.empty();
  for (const auto& s : d.subqueries) {
    TripleSet ts(s.triples().begin(), s.triples().end());
    inside = inside && !ts.empty() &&
             std::includes(all.begin(), all.end(), ts.begin(), ts.end());
    cover = detail::unite(cover, ts);
    total += ts.size();
    auto c = classify_query(s);
    r.all_so_queries = r.all_so_queries && c.so_query;
    r.all_generalized_stars = r.all_generalized_stars && c.generalized_star;
    r.max_variables_per_subquery = std::max(r.max_variables_per_subquery, s.variables().size());
  }
  r.is_decomposition = inside && cover == all;
  r.is_non_redundant = r.is_decomposition && total == all.size();
  return r;
}

inline const std::vector<std::string_view>& decomposition_methods() {
  static const std::vector<std::string_view> names = {
      "naive", "min-res", "min-subquery", "max-degree", "max-degree-redundant", "max-degree-reshaping"};
  return names;
}

inline QueryDecomposition decompose(const QueryGraph& q, std::string_view method) {
  if (method == "naive") return naive_decompose(q);
  if (method == "min-res") return min_res(q);
  if (method == "min-subquery") return min_subquery(q);
  if (method == "max-degree") return max_degree(q);
  if (method == "max-degree-redundant") return max_degree_with_redundancy(q);
  if (method == "max-degree-reshaping") return max_degree_with_reshaping(q);
  if (method == "single") return make_query_decomposition(q, {TripleSet(q.triples().begin(), q.triples().end())}, "single");
  throw Error(ErrorCode::kInvalidArgument, "unknown decomposition method: " + std::string(method));
}

}  // namespace stargraph
