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
#include <vector>

#include "stargraph/eval_common.hpp"

namespace stargraph {

inline constexpr const char* kMapper2Channel = "mapper2";
inline constexpr const char* kReducer2Channel = "reducer2";

inline void require_redundancy_inputs(const SegmentSet& segs, const QueryPlan& plan) {
  if (segs.layout != Layout::kSDecomposition)
    throw Error(ErrorCode::kNotAnSDecomposition,
                "segments use layout " + layout_name(segs.layout) + " (method " + segs.method + ")");
  for (std::size_t i = 0; i < plan.subquery_count(); ++i)
    if (!is_so_query(plan.decomposition.subqueries[i].triples()))
      throw Error(ErrorCode::kNotSoDecomposition, subquery_name(i) + " is not a subject-object star");
}

/// Mapper-2 key of an embedding: its subquery plus its common border values.
inline Key mapper2_key(const QueryPlan& plan, std::size_t sub, const Embedding& e) {
  Key k{subquery_name(sub)};
  for (auto pos : plan.common_border) k.push_back(e.image[pos]->render());
  return k;
}

/// Map-only first phase: totals of the subquery inside one s-segment, sent
/// to mapper 2 when some subquery lacks a border node, else to reducer 2.
inline void red_map1(const QueryPlan& plan, std::size_t sub, const Segment& seg, KVEmitter& out) {
  const auto& sq = plan.decomposition.subqueries[sub];
  auto totals = enumerate_total(sq.triples(), plan.index, seg.graph);
  std::size_t nb = plan.index.border_count();
  for (const auto& e : totals) {
    if (!plan.mbn.empty()) {
      out.emit_to(kMapper2Channel, mapper2_key(plan, sub, e), value_total(wire_total(plan, sub, e)));
      emit_candidates(plan, e, [&](std::size_t q, std::size_t pos, const Term& x) {
        out.emit_to(kMapper2Channel, mapper2_key(plan, q, e), value_candidate(pos, x));
      });
    } else {
      Key k;
      for (std::size_t b = 0; b < nb; ++b) {
        if (!e.image[b]) throw Error(ErrorCode::kInvalidArgument, "border value missing with empty MBN");
        k.push_back(e.image[b]->render());
      }
      auto enc = encode(e, plan.index, plan.prototypes[sub].triples);
      out.emit_to(kReducer2Channel, std::move(k), subquery_name(sub) + "\t(" + render_tuple(enc.nbnv) + ")");
    }
  }
}

inline EvalResult run_redundancy(const SegmentSet& segs, const QueryPlan& plan, const EvalOptions& opts) {
  require_redundancy_inputs(segs, plan);
  std::size_t n = plan.subquery_count();
  JobSpec<Key, std::string> job1{
      "redundancy-phase1",
      [&](const Key& k, std::span<const std::string>, KVEmitter& out) {
        red_map1(plan, parse_subquery_name(k.at(0)), segs.segments.at(parse_segment_name(k.at(1))), out);
      },
      {}};
  JobSpec<Key, std::string> job2{
      "redundancy-phase2",
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) {
        phase2_map(plan, parse_subquery_name(k.at(0)), vs, out, opts);
      },
      [&](const Key& k, std::span<const std::string> vs, KVEmitter& out) { phase2_reduce(plan, k, vs, out, opts); }};

  auto rt = opts.runtime();
  EvalResult res;
  res.algorithm = "redundancy";
  std::vector<Stage<Key, std::string>> stages{
      {job1, {}},
      {job2, {{0, kMapper2Channel, false}, {0, kReducer2Channel, true}}}};
  auto outs = run_pipeline(stages, task_records(n, segs.segments.size()), rt);

  std::vector<std::set<std::string>> totals(n);
  count_totals(outs[0].channel(kMapper2Channel), totals);
  for (const auto& r : outs[0].channel(kReducer2Channel)) {
    auto tab = r.value.find('\t');
    totals[parse_subquery_name(std::string_view(r.value).substr(0, tab))].insert(key_to_string(r.key) + r.value);
  }
  for (const auto& t : totals) res.subquery_embeddings.push_back(t.size());
  for (const auto& o : outs) res.stages.push_back(o.stats);
  res.answers = collect_answers(outs.back().main);
  return res;
}

}  // namespace stargraph
