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

#include <gtest/gtest.h>

#include <set>

#include "support/testkit.hpp"

using namespace stargraph;
using testkit::T;

namespace {

const QueryPlan& plan3() {
  static const QueryPlan p = preprocess(testkit::fig3_query(), testkit::fig3_decomposition());
  return p;
}

const testkit::Numbering& num3() {
  static const testkit::Numbering n =
      testkit::numbering_of({"?P1", "?A", "?P2"}, {"<Journal1>", "?T"}, "fig3.bgp");
  return n;
}

std::string wire(std::vector<std::string> b, std::vector<std::string> r, const std::string& tm) {
  return testkit::numbered_wire(plan3(), num3(), b, r, tm);
}

std::string total(std::size_t sub, std::vector<std::string> b, std::vector<std::string> r) {
  return value_total(to_wire(encode(testkit::numbered(plan3(), num3(), b, r), plan3().index,
                                    plan3().prototypes[sub].triples)));
}

std::string cand(const char* node, const char* value) {
  return value_candidate(plan3().index.at(T(node)), T(value));
}

std::set<std::string> map1_values(const QueryPlan& plan, std::size_t sub, std::size_t seg) {
  KVEmitter em;
  qejpe_map1(plan, sub, seg, testkit::fig2_segments().segments[seg], em);
  std::set<std::string> out;
  for (const auto& r : em.main()) {
    EXPECT_EQ(r.key, Key{subquery_name(sub)});
    out.insert(r.value);
  }
  return out;
}

std::vector<std::string> all_map1(const QueryPlan& plan, const SegmentSet& segs, std::size_t sub) {
  std::vector<std::string> vs;
  for (std::size_t j = 0; j < segs.segments.size(); ++j) {
    KVEmitter em;
    qejpe_map1(plan, sub, j, segs.segments[j], em);
    for (auto& r : em.main()) vs.push_back(r.value);
  }
  std::sort(vs.begin(), vs.end());
  return vs;
}

std::map<Key, std::set<std::string>> reduce1(const QueryPlan& plan, const SegmentSet& segs, std::size_t sub,
                                             EvalOptions opts = {}) {
  auto vs = all_map1(plan, segs, sub);
  KVEmitter em;
  qejpe_reduce1(plan, sub, vs, em, opts);
  std::map<Key, std::set<std::string>> out;
  for (auto& r : em.main()) out[r.key].insert(r.value);
  return out;
}

struct Case {
  DataGraph g;
  QueryGraph q;
  SegmentSet segs;
  QueryDecomposition d;
  std::string label;
};

std::vector<Case> random_cases(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<Case> out;
  const auto& methods = decomposition_methods();
  for (int i = 0; i < n; ++i) {
    testkit::GraphShape shape;
    shape.nodes = 8 + rng.uniform(8);
    shape.triples = 20 + rng.uniform(30);
    auto g = testkit::random_graph(rng, shape);
    auto q = testkit::random_query(rng, g, 1 + rng.uniform(5), 0.75, rng.chance(0.3));
    std::size_t m = 1 + rng.uniform(4);
    SegmentSet segs;
    if (rng.chance(0.5)) segs = edge_random_partition(g, std::min(m, g.size()), rng.next()).to_segment_set();
    else segs = s_decompose(g, testkit::random_node_partition(rng, g, m)).to_segment_set();
    auto method = std::string(methods[i % methods.size()]);
    out.push_back({g, q, segs, decompose(q, method), method + "/" + segs.method + "\n" + q.render()});
  }
  return out;
}

}  // namespace

TEST(Map1, WorkedEmissions) {
  EXPECT_TRUE(map1_values(plan3(), 0, 0).count("G1\t" + wire({"<Person4>", "<Article1>", "*"}, {"*", "\"Title1\""}, "+---+")));
  EXPECT_TRUE(map1_values(plan3(), 1, 0).count("G1\t" + wire({"*", "<Article1>", "<Person4>"}, {"*", "*"}, "--+--")));
  EXPECT_TRUE(map1_values(plan3(), 0, 1).count("G2\t" + wire({"<Person2>", "<Article2>", "*"}, {"*", "*"}, "+----")));
  auto q2g2 = map1_values(plan3(), 1, 1);
  EXPECT_TRUE(q2g2.count("G2\t" + wire({"*", "<Article1>", "<Person1>"}, {"*", "*"}, "--+--")));
  EXPECT_TRUE(q2g2.count("G2\t" + wire({"*", "<Article2>", "<Person3>"}, {"*", "*"}, "--+--")));
  auto q3g2 = map1_values(plan3(), 2, 1);
  EXPECT_TRUE(q3g2.count("G2\t" + wire({"<Person4>", "*", "<Person1>"}, {"*", "*"}, "-+---")));
  EXPECT_TRUE(q3g2.count("G2\t" + wire({"<Person2>", "*", "<Person3>"}, {"*", "*"}, "-+---")));
  EXPECT_TRUE(map1_values(plan3(), 0, 2).count("G3\t" + wire({"*", "<Article2>", "*"}, {"*", "\"Title2\""}, "----+")));
  auto q2g3 = map1_values(plan3(), 1, 2);
  EXPECT_TRUE(q2g3.count("G3\t" + wire({"*", "<Article1>", "*"}, {"<Journal1>", "*"}, "---+-")));
  EXPECT_TRUE(q2g3.count("G3\t" + wire({"*", "<Article2>", "*"}, {"<Journal1>", "*"}, "---+-")));
}

TEST(Map1, SilentPairs) {
  EXPECT_TRUE(map1_values(plan3(), 2, 2).empty());
  EXPECT_TRUE(map1_values(plan3(), 2, 0).empty());
}

TEST(Map1, NoMatchNoEmission) {
  auto q = testkit::query({"?x <nothing> ?y ."});
  auto plan = preprocess(q, decompose(q, "single"));
  EXPECT_TRUE(map1_values(plan, 0, 0).empty());
}

TEST(Reduce1, WorkedTotalsAndCandidates) {
  const auto& segs = testkit::fig2_segments();
  auto q1 = reduce1(plan3(), segs, 0);
  EXPECT_TRUE(q1[{"Q1"}].count(total(0, {"<Person4>", "<Article1>", "*"}, {"*", "\"Title1\""})));
  EXPECT_TRUE(q1[{"Q1"}].count(total(0, {"<Person2>", "<Article2>", "*"}, {"*", "\"Title2\""})));
  EXPECT_TRUE(q1[{"Q2"}].count(cand("?P1", "<Person2>")));
  EXPECT_TRUE(q1[{"Q2"}].count(cand("?P1", "<Person4>")));
  EXPECT_TRUE(q1[{"Q3"}].count(cand("?A", "<Article1>")));
  EXPECT_TRUE(q1[{"Q3"}].count(cand("?A", "<Article2>")));

  auto q2 = reduce1(plan3(), segs, 1);
  EXPECT_TRUE(q2[{"Q2"}].count(total(1, {"*", "<Article1>", "<Person1>"}, {"<Journal1>", "*"})));
  EXPECT_TRUE(q2[{"Q2"}].count(total(1, {"*", "<Article2>", "<Person3>"}, {"<Journal1>", "*"})));
  EXPECT_TRUE(q2[{"Q1"}].count(cand("?P2", "<Person1>")));
  EXPECT_TRUE(q2[{"Q1"}].count(cand("?P2", "<Person3>")));

  auto q3 = reduce1(plan3(), segs, 2);
  EXPECT_EQ(q3[{"Q3"}], (std::set<std::string>{total(2, {"<Person4>", "*", "<Person1>"}, {"*", "*"}),
                                                  total(2, {"<Person2>", "*", "<Person3>"}, {"*", "*"})}));
  EXPECT_EQ(q3[{"Q2"}], (std::set<std::string>{cand("?P1", "<Person2>"), cand("?P1", "<Person4>")}));
  EXPECT_EQ(q3[{"Q1"}], (std::set<std::string>{cand("?P2", "<Person1>"), cand("?P2", "<Person3>")}));
}

TEST(Reduce1, NoTotalsNoEmissions) {
  auto q = testkit::query({"?a <hasAuthor> ?b .", "?b <hasAuthor> ?c ."});
  auto plan = preprocess(q, decompose(q, "single"));
  EXPECT_TRUE(reduce1(plan, testkit::fig2_segments(), 0).empty());
}

TEST(Reduce1, TotalsEqualSubqueryEmbeddings) {
  for (const auto& c : random_cases(61, 80)) {
    auto plan = preprocess(c.q, c.d);
    for (std::size_t i = 0; i < plan.subquery_count(); ++i) {
      auto got = reduce1(plan, c.segs, i)[{subquery_name(i)}];
      std::set<std::string> want;
      for (const auto& e : enumerate_total(c.d.subqueries[i].triples(), plan.index, c.g))
        want.insert(value_total(wire_total(plan, i, e)));
      std::erase_if(got, [](const std::string& v) { return v[0] != 'E'; });
      EXPECT_EQ(got, want) << c.label;
    }
  }
}

TEST(Map2, WorkedCompletions) {
  std::vector<std::string> vs{total(0, {"<Person4>", "<Article1>", "*"}, {"*", "\"Title1\""}),
                              total(0, {"<Person2>", "<Article2>", "*"}, {"*", "\"Title2\""}),
                              cand("?P2", "<Person1>"), cand("?P2", "<Person3>")};
  std::sort(vs.begin(), vs.end());
  KVEmitter em;
  phase2_map(plan3(), 0, vs, em, {});
  std::set<std::pair<Key, std::string>> got;
  for (auto& r : em.main()) got.insert({r.key, r.value});
  // Keys follow the canonical border order (?A, ?P1, ?P2).
  EXPECT_TRUE(got.count({{"<Article1>", "<Person4>", "<Person1>"}, "Q1\t(*\t\"Title1\")"}));
  EXPECT_TRUE(got.count({{"<Article2>", "<Person2>", "<Person3>"}, "Q1\t(*\t\"Title2\")"}));
  EXPECT_EQ(got.size(), 4u);
}

TEST(Map2, NoHolesSingleEmission) {
  auto q = testkit::fig3_query();
  std::vector<std::string> vs{total(0, {"<Person4>", "<Article1>", "<Person1>"}, {"*", "\"Title1\""})};
  KVEmitter em;
  phase2_map(plan3(), 0, vs, em, {});
  ASSERT_EQ(em.main().size(), 1u);
  EXPECT_EQ(em.main()[0].key, (Key{"<Article1>", "<Person4>", "<Person1>"}));
}

TEST(Map2, MissingCandidatesDropTotal) {
  std::vector<std::string> vs{total(0, {"<Person4>", "<Article1>", "*"}, {"*", "\"Title1\""})};
  KVEmitter em;
  phase2_map(plan3(), 0, vs, em, {});
  EXPECT_TRUE(em.main().empty());
}

TEST(Map2, DuplicateTotalsExpandOnce) {
  auto t = total(0, {"<Person4>", "<Article1>", "*"}, {"*", "\"Title1\""});
  std::vector<std::string> vs{t, t, cand("?P2", "<Person1>")};
  KVEmitter dedup, raw;
  phase2_map(plan3(), 0, vs, dedup, {});
  EvalOptions keep;
  keep.dedup = false;
  phase2_map(plan3(), 0, vs, raw, keep);
  EXPECT_EQ(dedup.main().size(), 1u);
  EXPECT_EQ(raw.main().size(), 2u);
}

TEST(Map2, CartesianCap) {
  std::vector<std::string> vs{total(2, {"*", "*", "<Person1>"}, {"*", "*"}), cand("?P1", "<a>"), cand("?P1", "<b>"),
                              cand("?A", "<c>"), cand("?A", "<d>")};
  EvalOptions tight;
  tight.cartesian_cap = 3;
  KVEmitter em;
  try {
    phase2_map(plan3(), 2, vs, em, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCartesianLimit);
  }
}

TEST(Reduce2, WorkedJoins) {
  KVEmitter em;
  std::vector<std::string> vs{"Q1\t(*\t\"Title1\")", "Q2\t(<Journal1>\t*)", "Q3\t(*\t*)"};
  phase2_reduce(plan3(), {"<Article1>", "<Person4>", "<Person1>"}, vs, em, {});
  ASSERT_EQ(em.main().size(), 1u);
  // Output pattern (?A, ?P1, ?P2, ?T).
  EXPECT_EQ(em.main()[0].key, (Key{"<Article1>", "<Person4>", "<Person1>", "\"Title1\""}));

  KVEmitter em2;
  std::vector<std::string> vs2{"Q1\t(*\t\"Title2\")", "Q2\t(<Journal1>\t*)", "Q3\t(*\t*)"};
  phase2_reduce(plan3(), {"<Article2>", "<Person2>", "<Person3>"}, vs2, em2, {});
  ASSERT_EQ(em2.main().size(), 1u);
  EXPECT_EQ(em2.main()[0].key, (Key{"<Article2>", "<Person2>", "<Person3>", "\"Title2\""}));
}

TEST(Reduce2, MissingSubqueryNoAnswer) {
  KVEmitter em;
  std::vector<std::string> vs{"Q1\t(*\t\"Title1\")", "Q3\t(*\t*)"};
  phase2_reduce(plan3(), {"<Article1>", "<Person4>", "<Person1>"}, vs, em, {});
  EXPECT_TRUE(em.main().empty());
}

TEST(Reduce2, BooleanQueryEmitsEmptyTupleOnce) {
  auto q = testkit::query({"<Article1> <journal> <Journal1> .", "<Article1> <title> \"Title1\" ."});
  auto plan = preprocess(q, decompose(q, "naive"));
  ASSERT_EQ(plan.subquery_count(), 1u);
  auto res = run_qejpe(testkit::fig2_segments(), plan, {});
  EXPECT_EQ(res.answers, AnswerSet{Answer{}});
  auto miss = testkit::query({"<Article1> <journal> <Journal2> ."});
  EXPECT_TRUE(run_qejpe(testkit::fig2_segments(), preprocess(miss, decompose(miss, "naive")), {}).answers.empty());
}

TEST(Run, WorkedQueryTwoAnswers) {
  auto res = run_qejpe(testkit::fig2_segments(), plan3(), {});
  EXPECT_EQ(res.answers, (AnswerSet{testkit::answer({"<Article1>", "<Person4>", "<Person1>", "\"Title1\""}),
                                    testkit::answer({"<Article2>", "<Person2>", "<Person3>", "\"Title2\""})}));
  ASSERT_EQ(res.stages.size(), 2u);
  EXPECT_EQ(res.stages[0].stage, "qejpe-phase1");
  EXPECT_EQ(res.stages[1].stage, "qejpe-phase2");
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(res.subquery_embeddings[i],
              enumerate_total(plan3().decomposition.subqueries[i].triples(), plan3().index, testkit::biblio_graph()).size());
  EXPECT_EQ(res.algorithm, "qejpe");
}

TEST(Run, SingleSegmentSingleSubquery) {
  const auto& g = testkit::biblio_graph();
  auto segs = edge_random_partition(g, 1, 0).to_segment_set();
  for (auto q : {testkit::fig1b_query(), testkit::fig3_query(), testkit::fig4_query()})
    EXPECT_EQ(run_qejpe(segs, preprocess(q, decompose(q, "single")), {}).answers, oracle_answers(q, g));
}

TEST(Run, ShortCircuitSkipsPhaseTwo) {
  auto q = testkit::query({"?a <hasAuthor> ?b .", "?b <title> ?t ."});
  auto plan = preprocess(q, max_degree(q));
  EvalOptions opts;
  opts.short_circuit = true;
  auto res = run_qejpe(testkit::fig2_segments(), plan, opts);
  EXPECT_TRUE(res.answers.empty());
  EXPECT_EQ(res.stages.size(), 1u);
  EXPECT_EQ(run_qejpe(testkit::fig2_segments(), plan, {}).stages.size(), 2u);
}

TEST(Run, MatchesOracleOnRandomInstances) {
  std::size_t nonempty = 0;
  for (const auto& c : random_cases(62, 120)) {
    auto plan = preprocess(c.q, c.d);
    auto want = oracle_answers(c.q, c.g);
    auto res = run_qejpe(c.segs, plan, {});
    EXPECT_EQ(res.answers, want) << c.label;
    nonempty += !want.empty();
  }
  EXPECT_GT(nonempty, 30u);
}

TEST(Run, OptionsDoNotChangeAnswers) {
  for (const auto& c : random_cases(63, 60)) {
    auto plan = preprocess(c.q, c.d);
    auto base = run_qejpe(c.segs, plan, {}).answers;
    EvalOptions prov;
    prov.provenance = true;
    EvalOptions sc;
    sc.short_circuit = true;
    EvalOptions many;
    many.workers = 4;
    EvalOptions raw;
    raw.dedup = false;
    EXPECT_EQ(run_qejpe(c.segs, plan, prov).answers, base) << c.label;
    EXPECT_EQ(run_qejpe(c.segs, plan, sc).answers, base) << c.label;
    EXPECT_EQ(run_qejpe(c.segs, plan, many).answers, base) << c.label;
    EXPECT_EQ(run_qejpe(c.segs, plan, raw).answers, base) << c.label;
  }
}

TEST(Run, StatsAreWorkerIndependent) {
  auto a = run_qejpe(testkit::fig2_segments(), plan3(), {});
  EvalOptions eight;
  eight.workers = 8;
  auto b = run_qejpe(testkit::fig2_segments(), plan3(), eight);
  EXPECT_EQ(stats_to_json(a, true), stats_to_json(b, true));
  auto j = stats_to_json(a, true);
  EXPECT_EQ(j["answers"], 2);
  EXPECT_EQ(j["stages"][0]["wallMillis"], 0.0);
  EXPECT_EQ(j["subqueryEmbeddings"]["Q3"], a.subquery_embeddings[2]);
}

TEST(Dispatch, UnknownAlgorithm) {
  try {
    evaluate("bogus", testkit::fig2_segments(), plan3(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_EQ(evaluate("qejpe", testkit::fig2_segments(), testkit::fig3_query(), testkit::fig3_decomposition(), {})
                .answers.size(),
            2u);
}
