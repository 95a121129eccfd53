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

#include "support/testkit.hpp"

using namespace stargraph;
using testkit::T;
using testkit::query;
using testkit::tris;

TEST(Nodes, SingleTriple) {
  DataGraph g(tris({"<A> <p> <B> ."}));
  EXPECT_EQ(g.nodes(), (std::vector<Term>{T("<A>"), T("<B>")}));
}

TEST(Nodes, UnionOfEndpoints) {
  DataGraph g(tris({"<A> <p> \"x\" .", "<A> <q> <B> ."}));
  std::set<Term> got(g.nodes().begin(), g.nodes().end());
  EXPECT_EQ(got, (std::set<Term>{T("<A>"), T("\"x\""), T("<B>")}));
}

TEST(Nodes, BibliographicQueryHasFiveNodes) {
  auto q = testkit::fig1b_query();
  std::set<Term> got(q.nodes().begin(), q.nodes().end());
  EXPECT_EQ(got, (std::set<Term>{T("?A"), T("?W"), T("?T"), T("\"2008\""), T("<Journal1>")}));
}

TEST(Nodes, PredicatesAreNotNodes) {
  DataGraph g(tris({"<a> <p> <b> .", "<b> <q> <c> ."}));
  for (const auto& n : g.nodes()) EXPECT_TRUE(n != T("<p>") && n != T("<q>"));
}

TEST(Term, EqualityNeedsKindAndLexical) {
  EXPECT_EQ(Term::iri("a"), Term::iri("a"));
  EXPECT_NE(Term::iri("a"), Term::literal("a"));
  EXPECT_NE(Term::iri("a"), Term::variable("a"));
  EXPECT_NE(Term::iri("a"), Term::iri("b"));
}

TEST(Term, RenderEscapesLiterals) {
  EXPECT_EQ(Term::literal("a\"b\\c").render(), "\"a\\\"b\\\\c\"");
  EXPECT_EQ(Term::iri("x").render(), "<x>");
  EXPECT_EQ(Term::variable("v").render(), "?v");
}

TEST(DataGraph, RejectsEmpty) {
  try {
    DataGraph g(std::vector<Triple>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGraph);
  }
}

TEST(DataGraph, RejectsVariablesAndLiteralSubjects) {
  try {
    DataGraph g(tris({"?x <p> <b> ."}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVariableInData);
  }
  try {
    DataGraph g(std::vector<Triple>{{Term::literal("x"), Term::iri("p"), Term::iri("b")}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLiteralSubject);
  }
}

TEST(DataGraph, DeduplicatesTriples) {
  DataGraph g(tris({"<a> <p> <b> .", "<a> <p> <b> ."}));
  EXPECT_EQ(g.size(), 1u);
}

TEST(QueryGraph, RejectsVariablePredicate) {
  try {
    QueryGraph q(std::vector<Triple>{{T("<a>"), T("?p"), T("<b>")}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVariablePredicate);
  }
}

TEST(QueryGraph, OutputPatternFollowsCanonicalOrder) {
  auto q = query({"?b <q> <c> .", "?a <p> ?b ."});
  EXPECT_EQ(q.output_pattern(), (std::vector<Term>{T("?a"), T("?b")}));
  auto b = query({"<a> <p> <b> ."});
  EXPECT_TRUE(b.is_boolean());
}

TEST(Classify, SingleTripleBelongsToEveryClass) {
  auto c = classify_query(query({"?x <p> <c> ."}));
  EXPECT_TRUE(c.path);
  EXPECT_TRUE(c.generalized_star);
  EXPECT_TRUE(c.s_query);
  EXPECT_TRUE(c.o_query);
  EXPECT_TRUE(c.so_query);
}

TEST(Classify, ObjectOnlyCentre) {
  auto c = classify_query(query({"<c1> <p> ?x .", "<c2> <q> ?x ."}));
  EXPECT_EQ(c, (QueryClasses{false, true, false, true, false}));
}

TEST(Classify, ArticleStarOfCoverDecomposition) {
  auto c = classify_query(query({"<Article1> <hasAuthor> ?P1 .", "<Article1> <title> ?T .",
                                 "<Article1> <journal> ?J ."}));
  EXPECT_TRUE(c.generalized_star);
  EXPECT_TRUE(c.so_query);
  EXPECT_FALSE(c.path);
  EXPECT_FALSE(c.o_query);
}

TEST(Classify, PathQuery) {
  auto c = classify_query(query({"?a <p> ?b .", "?b <q> ?c .", "?c <r> ?d ."}));
  EXPECT_TRUE(c.path);
  EXPECT_FALSE(c.generalized_star);
}

TEST(Classify, RandomShapesRespectImplications) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto q = testkit::random_shape_query(rng, 1 + rng.uniform(6));
    auto c = classify_query(q);
    if (c.so_query) {
      EXPECT_TRUE(c.generalized_star) << q.render();
    }
    if (c.s_query || c.o_query) {
      EXPECT_TRUE(c.generalized_star) << q.render();
    }
    if (q.size() == 1) {
      EXPECT_TRUE(c.path && c.generalized_star && (c.s_query || c.o_query)) << q.render();
    }
  }
}

TEST(Subgraph, SetInclusion) {
  DataGraph b(tris({"<a> <p> <b> .", "<b> <p> <c> ."}));
  EXPECT_TRUE(is_subgraph(b, b));
  EXPECT_TRUE(is_subgraph(DataGraph(tris({"<b> <p> <c> ."})), b));
  EXPECT_FALSE(is_subgraph(DataGraph(tris({"<c> <p> <d> ."})), b));
}

TEST(DataGraph, PredicatesAreIris) {
  for (const auto& t : testkit::biblio_graph().triples()) EXPECT_TRUE(t.predicate.is_iri());
}
