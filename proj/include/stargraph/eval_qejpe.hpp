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
#include <tuple>
#include <vector>

#include "stargraph/eval_common.hpp"

namespace stargraph {

/// Phase-1 mapper: every useful partial embedding of subquery `sub` in
/// segment `seg`, keyed by the subquery and tagged with the segment id.
inline void qejpe_map1(const QueryPlan& plan, std::size_t sub, std::size_t seg_id, const Segment& seg,
                       KVEmitter& out) {
  const auto& sq = plan.decomposition.subqueries[sub];
  auto parts = enumerate_useful_partial(sq.triples(), plan.index, seg.graph, seg.border_mask());
  std::string tag = "G" + std::to_string(seg_id + 1) + "\t";
  for (const auto& pe : parts) {
    std::string tm(plan.triples().size(), '-');
    for (std::size_t k = 0; k < pe.matched.size(); ++k)
      if (pe.matched[k]) tm[plan.sub_triples[sub][k]] = '+';
    out.emit({subquery_name(sub)}, tag + to_wire(encode(pe.embedding, plan.index, std::move(tm))));
  }
}

struct Fragment {
  Embedding embedding;
  std::string tm;
  std::size_t segment = 0;
};

/// Total embeddings of subquery `sub` obtainable by joining compatible
/// fragments that together match all of its triples. With `provenance`,
/// each fragment used must come from a different segment.
inline std::vector<Embedding> assemble_totals(const QueryPlan& plan, std::size_t sub,
                                              const std::vector<Fragment>& frags, bool provenance) {
  const auto& tri = plan.sub_triples[sub];
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (auto k : tri)
    ends.emplace_back(plan.index.at(plan.triples()[k].subject), plan.index.at(plan.triples()[k].object));

  std::map<std::size_t, std::vector<std::size_t>> by_triple;
  std::map<std::tuple<std::size_t, std::size_t, Term>, std::vector<std::size_t>> by_value;
  for (std::size_t f = 0; f < frags.size(); ++f)
    for (std::size_t j = 0; j < tri.size(); ++j) {
      if (frags[f].tm[tri[j]] != '+') continue;
      by_triple[j].push_back(f);
      for (auto pos : {ends[j].first, ends[j].second})
        by_value[{j, pos, *frags[f].embedding.image[pos]}].push_back(f);
    }

  std::set<Embedding> found;
  std::vector<char> covered(tri.size(), 0);
  std::vector<std::size_t> used_segments;
  auto rec = [&](auto&& self, const Embedding& acc) -> void {
    std::size_t pick = tri.size();
    std::optional<std::size_t> bound_pos;
    for (std::size_t j = 0; j < tri.size(); ++j) {
      if (covered[j]) continue;
      if (pick == tri.size()) pick = j;
      if (acc.image[ends[j].first]) {
        pick = j;
        bound_pos = ends[j].first;
        break;
      }
      if (acc.image[ends[j].second]) {
        pick = j;
        bound_pos = ends[j].second;
        break;
      }
    }
    if (pick == tri.size()) {
      found.insert(acc);
      return;
    }
    const std::vector<std::size_t>* cands = nullptr;
    if (bound_pos) {
      auto it = by_value.find({pick, *bound_pos, *acc.image[*bound_pos]});
      if (it == by_value.end()) return;
      cands = &it->second;
    } else {
      auto it = by_triple.find(pick);
      if (it == by_triple.end()) return;
      cands = &it->second;
    }
    for (auto f : *cands) {
      const auto& fr = frags[f];
      if (provenance &&
          std::find(used_segments.begin(), used_segments.end(), fr.segment) != used_segments.end())
        continue;
      if (!is_compatible(acc, fr.embedding)) continue;
      auto saved = covered;
      for (std::size_t j = 0; j < tri.size(); ++j)
        if (fr.tm[tri[j]] == '+') covered[j] = 1;
      used_segments.push_back(fr.segment);
      self(self, join(acc, fr.embedding));
      used_segments.pop_back();
      covered = std::move(saved);
    }
  };
  rec(rec, Embedding(plan.index.size()));
  return {found.begin(), found.end()};
}

/// Phase-1 reducer: joins fragments of subquery `sub` into totals and routes
/// their border values to the subqueries missing them.
inline void qejpe_reduce1(const QueryPlan& plan, std::size_t sub, std::span<const std::string> values,
                          KVEmitter& out, const EvalOptions& opts) {
  std::vector<Fragment> frags;
  std::set<std::string> seen;
  for (const auto& v : values) {
    auto tab = v.find('\t');
    std::string_view wire = std::string_view(v).substr(tab + 1);
    std::size_t seg = parse_segment_name(std::string_view(v).substr(0, tab));
    if (!opts.provenance && !seen.insert(std::string(wire)).second) continue;
    auto enc = parse_wire(plan, wire);
    frags.push_back({decode(enc), enc.tm, seg});
  }
  auto totals = assemble_totals(plan, sub, frags, opts.provenance);
  std::set<std::pair<std::size_t, std::string>> candidates;
  for (const auto& e : totals) {
    out.emit({subquery_name(sub)}, value_total(wire_total(plan, sub, e)));
    emit_candidates(plan, e, [&](std::size_t j, std::size_t pos, const Term& t) {
      candidates.insert({j, value_candidate(pos, t)});
    });
  }
  for (const auto& [j, v] : candidates) out.emit({subquery_name(j)}, v);
}

inline EvalResult run_qejpe(const SegmentSet& segs, const QueryPlan& plan, const EvalOptions& opts) {
  std::size_t n = plan.subquery_count();
  JobSpec<Key, std::string> job1{
      "qejpe-phase1",
      [&](const Key& k, std::span<const std::string>, KVEmitter& out) {
        std::size_t seg = parse_segment_name(k.at(1));
        qejpe_map1(plan, parse_subquery_name(k.at(0)), seg, segs.segments.at(seg), out);
      },
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) {
        qejpe_reduce1(plan, parse_subquery_name(k.at(0)), vs, out, opts);
      }};
  JobSpec<Key, std::string> job2{
      "qejpe-phase2",
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) {
        phase2_map(plan, parse_subquery_name(k.at(0)), vs, out, opts);
      },
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) { phase2_reduce(plan, k, vs, out, opts); }};

  auto rt = opts.runtime();
  EvalResult res;
  res.algorithm = "qejpe";
  auto out1 = run_job(job1, task_records(n, segs.segments.size()), rt, {}, 0);
  res.stages.push_back(out1.stats);

  std::vector<std::set<std::string>> totals(n);
  count_totals(out1.main, totals);
  for (const auto& t : totals) res.subquery_embeddings.push_back(t.size());
  bool empty_sub = std::any_of(totals.begin(), totals.end(), [](const auto& t) { return t.empty(); });
  if (opts.short_circuit && empty_sub) return res;

  auto out2 = run_job(job2, std::move(out1.main), rt, {}, 1);
  res.stages.push_back(out2.stats);
  res.answers = collect_answers(out2.main);
  return res;
}

}  // namespace stargraph
