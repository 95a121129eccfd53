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

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/rdf.hpp"
#include "stargraph/rng.hpp"

namespace stargraph {

struct GenOptions {
  std::size_t triples = 1000;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;         // 0 picks triples / 4 (at least 2)
  std::size_t predicates = 8;
  double literal_ratio = 0.1;    // share of triples with a literal object
  double star_ratio = 0.3;       // share of triples whose subject is a hub
  double path_ratio = 0.2;       // share of triples extending a chain
  std::size_t hubs = 0;          // 0 picks nodes / 50 (at least 1)
};

/// Seeded synthetic graph over IRIs <n0>.. , predicates <p0>.. and literals
/// "v0".. . Hubs are the first nodes; chains link node i to node i+1.
inline DataGraph generate_graph(const GenOptions& o) {
  if (o.triples == 0) throw Error(ErrorCode::kInvalidArgument, "a graph needs at least one triple");
  if (o.predicates == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one predicate");
  std::size_t n = o.nodes ? o.nodes : std::max<std::size_t>(2, o.triples / 4);
  std::size_t hubs = std::min(n, o.hubs ? o.hubs : std::max<std::size_t>(1, n / 50));
  std::size_t lits = std::max<std::size_t>(1, n / 4);
  Rng rng(o.seed);

  auto node = [](std::size_t i) { return Term::iri("n" + std::to_string(i)); };
  std::unordered_set<std::string> seen;
  std::vector<Triple> out;
  std::size_t attempts = 0, limit = 64 * o.triples + 1024;
  while (out.size() < o.triples) {
    if (++attempts > limit)
      throw Error(ErrorCode::kInvalidArgument, "cannot draw " + std::to_string(o.triples) +
                                                   " distinct triples from the configured alphabet");
    Term p = Term::iri("p" + std::to_string(rng.uniform(o.predicates)));
    Term s, obj;
    if (rng.chance(o.path_ratio)) {
      std::size_t i = rng.uniform(n);
      s = node(i);
      obj = node((i + 1) % n);
    } else {
      s = node(rng.chance(o.star_ratio) ? rng.uniform(hubs) : rng.uniform(n));
      obj = rng.chance(o.literal_ratio) ? Term::literal("v" + std::to_string(rng.uniform(lits)))
                                        : node(rng.uniform(n));
    }
    Triple t{s, p, obj};
    if (seen.insert(t.render()).second) out.push_back(std::move(t));
  }
  return DataGraph(std::move(out));
}

}  // namespace stargraph
