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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stargraph/eval_common.hpp"

namespace stargraph {

inline constexpr const char* kPhase2Channel = "phase2";

/// Throws unless every subquery of the plan is a generalized star whose
/// recorded centre touches all of its triples.
inline void require_star_plan(const QueryPlan& plan) {
  for (std::size_t i = 0; i < plan.subquery_count(); ++i) {
    const auto& c = plan.decomposition.centers[i];
    bool ok = c.has_value();
    for (const auto& t : plan.decomposition.subqueries[i].triples())
      ok = ok && (t.subject == *c || t.object == *c);
    if (!ok)
      throw Error(ErrorCode::kNotAStarDecomposition, subquery_name(i) + " is not a generalized star with a centre");
  }
}

/// Phase-1 mapper of the star strategy.
///
/// Triples whose centre image is a border node (or a literal, for centres in
/// object position) are emitted one by one under key (Q_i, centre image).
/// Whole embeddings whose centre image is an inner node of the segment go
/// straight to phase 2 on the side channel, with their border values.
inline void stars_map1(const QueryPlan& plan, std::size_t sub, const Segment& seg, KVEmitter& out) {
  const auto& tri = plan.sub_triples[sub];
  std::size_t c = *plan.centers[sub];
  std::string qname = subquery_name(sub);

  for (std::size_t j = 0; j < tri.size(); ++j) {
    const auto& t = plan.triples()[tri[j]];
    std::size_t s = plan.index.at(t.subject), o = plan.index.at(t.object);
    bool center_subject = s == c;
    std::size_t other = center_subject ? o : s;
    for (const auto& e : enumerate_total(std::span<const Triple>(&t, 1), plan.index, seg.graph)) {
      const Term& v = *e.image[c];
      bool keep = seg.is_border(v) || (!center_subject && v.is_literal());
      if (!keep) continue;
      out.emit({qname, v.render()},
               "T\t" + std::to_string(j) + "\t" + std::to_string(other) + "\t" + e.image[other]->render());
    }
  }

  const auto& sq = plan.decomposition.subqueries[sub];
  std::set<std::pair<std::size_t, std::string>> candidates;
  for (const auto& e : enumerate_total(sq.triples(), plan.index, seg.graph)) {
    const Term& v = *e.image[c];
    if (seg.is_border(v) || v.is_literal()) continue;
    out.emit_to(kPhase2Channel, {qname}, value_total(wire_total(plan, sub, e)));
    emit_candidates(plan, e, [&](std::size_t q, std::size_t pos, const Term& x) {
      candidates.insert({q, value_candidate(pos, x)});
    });
  }
  for (const auto& [q, v] : candidates) out.emit_to(kPhase2Channel, {subquery_name(q)}, v);
}

/// Phase-1 reducer for key (Q_i, v): rebuilds every embedding of the star
/// with centre image v from its single-triple matches.
inline void stars_reduce1(const QueryPlan& plan, std::size_t sub, const Term& v,
                          std::span<const std::string> values, KVEmitter& out, const EvalOptions& opts) {
  const auto& tri = plan.sub_triples[sub];
  std::size_t c = *plan.centers[sub];
  // Candidate images of the non-centre endpoint, per triple.
  std::vector<std::set<Term>> per_triple(tri.size());
  std::vector<std::size_t> other_of(tri.size());
  for (const auto& val : values) {
    if (val.rfind("T\t", 0) != 0) throw Error(ErrorCode::kInvalidArgument, "unexpected star value");
    auto a = val.find('\t', 2), b = val.find('\t', a + 1);
    std::size_t j = std::stoul(val.substr(2, a - 2));
    other_of[j] = std::stoul(val.substr(a + 1, b - a - 1));
    auto t = parse_term(std::string_view(val).substr(b + 1));
    if (!t) throw Error(ErrorCode::kInvalidArgument, "bad star value term");
    per_triple[j].insert(*t);
  }
  for (const auto& s : per_triple)
    if (s.empty()) return;

  std::map<std::size_t, std::set<Term>> lists;
  for (std::size_t j = 0; j < tri.size(); ++j) {
    auto [it, fresh] = lists.try_emplace(other_of[j], per_triple[j]);
    if (!fresh) {
      std::set<Term> keep;
      std::set_intersection(it->second.begin(), it->second.end(), per_triple[j].begin(), per_triple[j].end(),
                            std::inserter(keep, keep.end()));
      it->second = std::move(keep);
    }
  }
  // A self-loop on the centre constrains the centre itself.
  if (auto it = lists.find(c); it != lists.end()) {
    if (!it->second.count(v)) return;
    lists.erase(it);
  }
  std::size_t product = 1;
  for (const auto& [_, l] : lists) {
    if (l.empty()) return;
    product = detail::saturating_mul(product, l.size());
  }
  detail::check_cap(product, opts.cartesian_cap, "stars reducer1 " + subquery_name(sub));

  std::vector<std::pair<std::size_t, std::vector<Term>>> axes;
  for (auto& [pos, l] : lists) axes.emplace_back(pos, std::vector<Term>(l.begin(), l.end()));
  std::vector<std::size_t> pick(axes.size(), 0);
  std::set<std::pair<std::size_t, std::string>> candidates;
  for (;;) {
    Embedding e(plan.index.size());
    e.image[c] = v;
    for (std::size_t a = 0; a < axes.size(); ++a) e.image[axes[a].first] = axes[a].second[pick[a]];
    out.emit({subquery_name(sub)}, value_total(wire_total(plan, sub, e)));
    emit_candidates(plan, e, [&](std::size_t q, std::size_t pos, const Term& x) {
      candidates.insert({q, value_candidate(pos, x)});
    });
    std::size_t a = axes.size();
    while (a > 0 && ++pick[a - 1] == axes[a - 1].second.size()) pick[--a] = 0;
    if (a == 0) break;
  }
  for (const auto& [q, val] : candidates) out.emit({subquery_name(q)}, val);
}

inline EvalResult run_stars(const SegmentSet& segs, const QueryPlan& plan, const EvalOptions& opts) {
  require_star_plan(plan);
  std::size_t n = plan.subquery_count();
  JobSpec<Key, std::string> job1{
      "stars-phase1",
      [&](const Key& k, std::span<const std::string>, KVEmitter& out) {
        stars_map1(plan, parse_subquery_name(k.at(0)), segs.segments.at(parse_segment_name(k.at(1))), out);
      },
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) {
        auto v = parse_term(k.at(1));
        if (!v) throw Error(ErrorCode::kInvalidArgument, "bad centre key");
        stars_reduce1(plan, parse_subquery_name(k.at(0)), *v, vs, out, opts);
      }};
  JobSpec<Key, std::string> job2{
      "stars-phase2",
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) {
        phase2_map(plan, parse_subquery_name(k.at(0)), vs, out, opts);
      },
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) { phase2_reduce(plan, k, vs, out, opts); }};

  auto rt = opts.runtime();
  EvalResult res;
  res.algorithm = "stars";
  auto out1 = run_job(job1, task_records(n, segs.segments.size()), rt, {}, 0);
  res.stages.push_back(out1.stats);

  auto in2 = std::move(out1.main);
  const auto& side = out1.channel(kPhase2Channel);
  in2.insert(in2.end(), side.begin(), side.end());
  std::vector<std::set<std::string>> totals(n);
  count_totals(in2, totals);
  for (const auto& t : totals) res.subquery_embeddings.push_back(t.size());
  if (opts.short_circuit && std::any_of(totals.begin(), totals.end(), [](const auto& t) { return t.empty(); }))
    return res;

  auto out2 = run_job(job2, std::move(in2), rt, {}, 1);
  res.stages.push_back(out2.stats);
  res.answers = collect_answers(out2.main);
  return res;
}

}  // namespace stargraph
