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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "stargraph/answers.hpp"
#include "stargraph/embedding.hpp"
#include "stargraph/error.hpp"
#include "stargraph/mapreduce.hpp"
#include "stargraph/plan.hpp"
#include "stargraph/segments.hpp"

namespace stargraph {

using Key = std::vector<std::string>;
using KV = Record<Key, std::string>;
using KVEmitter = Emitter<Key, std::string>;

struct EvalOptions {
  std::size_t workers = 1;
  std::size_t spill_threshold = 0;
  // Upper bound on any single cartesian expansion (stars reducer1, mapper2).
  std::size_t cartesian_cap = 1000000;
  // QEJPE reducer1 joins only fragments that come from distinct segments.
  bool provenance = false;
  // QEJPE skips phase 2 when some subquery has no total embedding.
  bool short_circuit = false;
  // Redundancy mapper2 drops repeated embeddings before expansion.
  bool dedup = true;

  RuntimeOptions runtime() const {
    RuntimeOptions r;
    r.workers = std::max<std::size_t>(1, workers);
    r.spill_threshold = spill_threshold;
    return r;
  }
};

struct EvalResult {
  std::string algorithm;
  AnswerSet answers;
  std::vector<StageStats> stages;
  std::vector<std::size_t> subquery_embeddings;
};

/// Map inputs of phase 1: one record per (subquery, segment) pair.
inline std::vector<KV> task_records(std::size_t subqueries, std::size_t segments) {
  std::vector<KV> out;
  for (std::size_t i = 0; i < subqueries; ++i)
    for (std::size_t j = 0; j < segments; ++j) out.push_back({{subquery_name(i), "G" + std::to_string(j + 1)}, ""});
  return out;
}

inline std::size_t parse_segment_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'G') throw Error(ErrorCode::kInvalidArgument, "bad segment id");
  return std::stoul(std::string(s.substr(1))) - 1;
}

inline std::string wire_total(const QueryPlan& plan, std::size_t sub, const Embedding& e) {
  return to_wire(encode(e, plan.index, plan.prototypes[sub].triples));
}

inline EncodedEmbedding parse_wire(const QueryPlan& plan, std::string_view s) {
  return from_wire(s, plan.index.border_count(), plan.index.size() - plan.index.border_count(),
                   plan.triples().size());
}

// Tagged values flowing into phase 2 (and out of phase-1 reducers):
//   "E\t<wire>"          a total embedding of the subquery in the key
//   "V\t<pos>\t<term>"   a candidate value for a border position
inline std::string value_total(const std::string& wire) { return "E\t" + wire; }
inline std::string value_candidate(std::size_t pos, const Term& t) {
  return "V\t" + std::to_string(pos) + "\t" + t.render();
}

/// Phase-1 reducer side of the missing-border-node routing: for every bound
/// border position of `e` and every MBN entry naming that position, a
/// candidate record for the subquery that lacks it.
template <class EmitFn>
void emit_candidates(const QueryPlan& plan, const Embedding& e, EmitFn&& emit) {
  for (const auto& m : plan.mbn)
    if (e.image[m.node]) emit(m.subquery, m.node, *e.image[m.node]);
}

namespace detail {

inline std::vector<std::optional<Term>> parse_value_tuple(std::string_view s, std::size_t n) {
  if (s.empty() || s.front() != '(') throw Error(ErrorCode::kInvalidArgument, "bad value tuple");
  std::size_t pos = 1;
  if (n == 0) {
    if (s != "()") throw Error(ErrorCode::kInvalidArgument, "bad value tuple");
    return {};
  }
  auto out = read_tuple(s, pos, n, ')');
  if (pos != s.size()) throw Error(ErrorCode::kInvalidArgument, "bad value tuple");
  return out;
}

inline void check_cap(std::size_t product, std::size_t cap, const std::string& where) {
  if (product > cap)
    throw Error(ErrorCode::kCartesianLimit,
                where + ": " + std::to_string(product) + " tuples exceed cap " + std::to_string(cap));
}

inline std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

}  // namespace detail

/// Phase-2 mapper. `values` hold totals of subquery `sub` and candidate
/// values for the border positions it lacks. Each total is completed in
/// every possible way and keyed by the completed border tuple.
inline void phase2_map(const QueryPlan& plan, std::size_t sub, std::span<const std::string> values,
                       KVEmitter& out, const EvalOptions& opts) {
  std::vector<std::string> totals;
  std::map<std::size_t, std::vector<Term>> cand;
  for (const auto& v : values) {
    if (v.rfind("E\t", 0) == 0) {
      totals.push_back(v.substr(2));
    } else if (v.rfind("V\t", 0) == 0) {
      auto tab = v.find('\t', 2);
      auto pos = std::stoul(v.substr(2, tab - 2));
      auto t = parse_term(std::string_view(v).substr(tab + 1));
      if (!t) throw Error(ErrorCode::kInvalidArgument, "bad candidate value");
      cand[pos].push_back(*t);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unexpected phase-2 value");
    }
  }
  if (opts.dedup) {
    std::sort(totals.begin(), totals.end());
    totals.erase(std::unique(totals.begin(), totals.end()), totals.end());
  }
  for (auto& [_, ts] : cand) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  }
  std::string tag = subquery_name(sub) + "\t";
  for (const auto& w : totals) {
    auto enc = parse_wire(plan, w);
    std::vector<std::size_t> holes;
    std::size_t product = 1;
    for (std::size_t k = 0; k < enc.bnv.size(); ++k) {
      if (enc.bnv[k]) continue;
      holes.push_back(k);
      auto it = cand.find(k);
      product = detail::saturating_mul(product, it == cand.end() ? 0 : it->second.size());
    }
    if (product == 0) continue;
    detail::check_cap(product, opts.cartesian_cap, "mapper2 " + subquery_name(sub));
    std::string value = tag + "(" + render_tuple(enc.nbnv) + ")";
    std::vector<std::size_t> pick(holes.size(), 0);
    for (;;) {
      Key key;
      std::size_t h = 0;
      for (std::size_t k = 0; k < enc.bnv.size(); ++k) {
        if (enc.bnv[k]) key.push_back(enc.bnv[k]->render());
        else key.push_back(cand[k][pick[h++]].render());
      }
      out.emit(std::move(key), value);
      std::size_t i = holes.size();
      while (i > 0) {
        --i;
        if (++pick[i] < cand[holes[i]].size()) break;
        pick[i] = 0;
        if (i == 0) {
          i = holes.size() + 1;
          break;
        }
      }
      if (holes.empty() || i == holes.size() + 1) break;
    }
  }
}

/// Phase-2 reducer: one embedding per subquery, joined and projected.
inline void phase2_reduce(const QueryPlan& plan, const Key& key, std::span<const std::string> values,
                          KVEmitter& out, const EvalOptions& opts) {
  std::size_t n = plan.subquery_count();
  std::size_t nb = plan.index.border_count();
  std::vector<std::vector<std::vector<std::optional<Term>>>> per(n);
  for (const auto& v : values) {
    auto tab = v.find('\t');
    auto sub = parse_subquery_name(std::string_view(v).substr(0, tab));
    per[sub].push_back(detail::parse_value_tuple(std::string_view(v).substr(tab + 1), plan.index.size() - nb));
  }
  std::size_t product = 1;
  for (auto& p : per) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    product = detail::saturating_mul(product, p.size());
  }
  if (product == 0) return;
  detail::check_cap(product, opts.cartesian_cap, "reducer2");

  Embedding base(plan.index.size());
  for (std::size_t k = 0; k < nb; ++k) {
    auto t = parse_term(key.at(k));
    if (!t) throw Error(ErrorCode::kInvalidArgument, "bad border key");
    base.image[k] = *t;
  }
  std::set<Key> answers;
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    Embedding e = base;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto& nbnv = per[i][pick[i]];
      for (std::size_t k = 0; k < nbnv.size(); ++k) {
        if (!nbnv[k]) continue;
        auto& slot = e.image[nb + k];
        if (slot && *slot != *nbnv[k]) ok = false;
        else slot = nbnv[k];
      }
    }
    if (ok) {
      Key row;
      for (auto pos : plan.output) row.push_back(e.image[pos]->render());
      answers.insert(std::move(row));
    }
    std::size_t i = n;
    while (i > 0 && ++pick[i - 1] == per[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
  for (const auto& a : answers) out.emit(a, "");
}

/// Turns the reducer-2 output (answer rows as keys) into an answer set.
inline AnswerSet collect_answers(const std::vector<KV>& rows) {
  AnswerSet out;
  for (const auto& r : rows) {
    Answer a;
    for (const auto& tok : r.key) {
      auto t = parse_term(tok);
      if (!t) throw Error(ErrorCode::kInvalidArgument, "bad answer token");
      a.push_back(*t);
    }
    out.insert(std::move(a));
  }
  return out;
}

/// Distinct total embeddings per subquery among records about to enter
/// phase 2 (tagged "E" values keyed by a subquery id).
inline void count_totals(const std::vector<KV>& recs, std::vector<std::set<std::string>>& seen) {
  for (const auto& r : recs)
    if (!r.key.empty() && r.value.rfind("E\t", 0) == 0) seen[parse_subquery_name(r.key[0])].insert(r.value);
}

inline nlohmann::json stats_to_json(const EvalResult& r, bool stable) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"stage", s.stage},
                      {"recordsIn", s.records_in},
                      {"recordsOut", s.records_out},
                      {"shuffled", s.shuffled},
                      {"distinctKeys", s.distinct_keys},
                      {"wallMillis", stable ? 0.0 : s.wall_millis}});
  nlohmann::json subs = nlohmann::json::object();
  for (std::size_t i = 0; i < r.subquery_embeddings.size(); ++i) subs[subquery_name(i)] = r.subquery_embeddings[i];
  return {{"algorithm", r.algorithm}, {"answers", r.answers.size()}, {"stages", stages}, {"subqueryEmbeddings", subs}};
}

}  // namespace stargraph
