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
#include <string>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/ntriples.hpp"
#include "stargraph/rdf.hpp"
#include "stargraph/rng.hpp"
#include "stargraph/segments.hpp"

namespace stargraph {

struct DataDecomposition {
  std::vector<DataGraph> segments;
  std::vector<std::vector<Term>> border_sets;
  std::string method;
  std::uint64_t seed = 0;

  SegmentSet to_segment_set() const {
    SegmentSet set{method, seed, Layout::kTriplePartition, {}};
    for (std::size_t i = 0; i < segments.size(); ++i)
      set.segments.push_back({segments[i], border_sets[i], std::nullopt});
    return set;
  }
};

/// Blocks N_1..N_m of non-literal nodes, each sorted.
using NodePartition = std::vector<std::vector<Term>>;

struct SDecomposition {
  DataDecomposition base;
  NodePartition node_partition;
  std::vector<std::vector<Term>> replicated_nodes;
  std::vector<std::vector<Triple>> replicated_triples;

  SegmentSet to_segment_set() const {
    SegmentSet set = base.to_segment_set();
    set.layout = Layout::kSDecomposition;
    for (std::size_t i = 0; i < set.segments.size(); ++i)
      set.segments[i].replicated = replicated_nodes[i];
    return set;
  }
};

inline DataDecomposition make_decomposition(std::vector<std::vector<Triple>> parts,
                                            std::string method, std::uint64_t seed) {
  DataDecomposition d;
  d.method = std::move(method);
  d.seed = seed;
  for (auto& p : parts) {
    if (p.empty()) throw Error(ErrorCode::kRejectedEmptySegment, "empty segment");
    d.segments.emplace_back(std::move(p));
  }
  d.border_sets = compute_border_sets(d.segments);
  return d;
}

inline DataDecomposition edge_random_partition(const DataGraph& g, std::size_t m,
                                               std::uint64_t seed) {
  if (m == 0 || m > g.size())
    throw Error(ErrorCode::kTooManySegments,
                "m=" + std::to_string(m) + " for " + std::to_string(g.size()) + " triples");
  auto triples = g.triples();
  Rng rng(seed);
  std::vector<std::size_t> assign(triples.size());
  auto sizes_ok = [&](std::vector<std::size_t>& sizes) {
    sizes.assign(m, 0);
    for (auto a : assign) ++sizes[a];
    return std::find(sizes.begin(), sizes.end(), 0) == sizes.end();
  };
  std::vector<std::size_t> sizes;
  bool ok = false;
  for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
    for (auto& a : assign) a = rng.uniform(m);
    ok = sizes_ok(sizes);
  }
  while (!ok) {
    auto empty = static_cast<std::size_t>(std::find(sizes.begin(), sizes.end(), 0) - sizes.begin());
    auto largest = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t i = triples.size(); i-- > 0;) {
      if (assign[i] == largest) {
        assign[i] = empty;
        break;
      }
    }
    ok = sizes_ok(sizes);
  }
  std::vector<std::vector<Triple>> parts(m);
  for (std::size_t i = 0; i < triples.size(); ++i) parts[assign[i]].push_back(triples[i]);
  return make_decomposition(std::move(parts), "edge-random", seed);
}

inline std::vector<Term> non_literal_nodes(const DataGraph& g) {
  std::vector<Term> out;
  for (const auto& n : g.nodes())
    if (!n.is_literal()) out.push_back(n);
  return out;
}

inline std::uint64_t node_hash(const Term& t, std::uint64_t seed) {
  return splitmix64(fnv1a64(t.render()) ^ splitmix64(seed));
}

inline NodePartition vertex_hash_partition(const DataGraph& g, std::size_t m, std::uint64_t seed) {
  auto nodes = non_literal_nodes(g);
  if (m == 0 || m > nodes.size())
    throw Error(ErrorCode::kTooManySegments,
                "m=" + std::to_string(m) + " for " + std::to_string(nodes.size()) +
                    " non-literal nodes");
  NodePartition blocks(m);
  for (const auto& n : nodes) blocks[node_hash(n, seed) % m].push_back(n);
  for (;;) {
    auto empty = std::find_if(blocks.begin(), blocks.end(), [](auto& b) { return b.empty(); });
    if (empty == blocks.end()) break;
    auto largest = std::max_element(blocks.begin(), blocks.end(),
                                    [](auto& a, auto& b) { return a.size() < b.size(); });
    auto victim = std::max_element(largest->begin(), largest->end(), [&](auto& a, auto& b) {
      auto ha = node_hash(a, seed), hb = node_hash(b, seed);
      return ha != hb ? ha < hb : a < b;
    });
    empty->push_back(*victim);
    largest->erase(victim);
  }
  return blocks;
}

inline SDecomposition s_decompose(const DataGraph& g, NodePartition blocks,
                                  std::string method = "imported", std::uint64_t seed = 0) {
  std::map<Term, std::size_t> block_of;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto& b = blocks[i];
    if (b.empty()) throw Error(ErrorCode::kNotAPartition, "block " + std::to_string(i + 1) + " is empty");
    std::sort(b.begin(), b.end());
    for (const auto& n : b) {
      if (n.is_literal() || n.is_variable())
        throw Error(ErrorCode::kNotAPartition, "block node " + n.render() + " is not an IRI");
      if (!block_of.emplace(n, i).second)
        throw Error(ErrorCode::kNotAPartition, n.render() + " is in two blocks");
    }
  }
  auto nodes = non_literal_nodes(g);
  if (nodes.size() != block_of.size() ||
      !std::all_of(nodes.begin(), nodes.end(), [&](auto& n) { return block_of.count(n) > 0; }))
    throw Error(ErrorCode::kNotAPartition, "blocks do not cover exactly the non-literal nodes");

  std::vector<std::vector<Triple>> parts(blocks.size());
  for (const auto& t : g.triples()) {
    auto bs = block_of.at(t.subject);
    parts[bs].push_back(t);
    if (!t.object.is_literal()) {
      auto bo = block_of.at(t.object);
      if (bo != bs) parts[bo].push_back(t);
    }
  }
  SDecomposition sd;
  sd.base = make_decomposition(std::move(parts), std::move(method), seed);
  sd.node_partition = std::move(blocks);
  for (std::size_t i = 0; i < sd.base.segments.size(); ++i) {
    const auto& seg = sd.base.segments[i];
    std::vector<Term> repl;
    for (const auto& n : seg.nodes())
      if (!n.is_literal() && block_of.at(n) != i) repl.push_back(n);
    std::vector<Triple> rt;
    for (const auto& t : seg.triples())
      if (std::binary_search(repl.begin(), repl.end(), t.subject) ||
          std::binary_search(repl.begin(), repl.end(), t.object))
        rt.push_back(t);
    sd.replicated_nodes.push_back(std::move(repl));
    sd.replicated_triples.push_back(std::move(rt));
  }
  return sd;
}

/// Parsed import file. Lines are either `<iri>\t<block>` (node partition) or
/// `<s> <p> <o> .\t<block>` (triple assignment); one file uses one form.
struct Assignment {
  bool node_form = true;
  std::vector<std::pair<Term, std::string>> nodes;
  std::vector<std::pair<Triple, std::string>> triples;
};

inline Assignment parse_assignment(std::string_view text) {
  Assignment a;
  bool seen = false;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": missing TAB");
    auto lhs = line.substr(0, tab);
    std::string block(line.substr(tab + 1));
    if (block.empty())
      throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": missing block");
    bool is_triple = lhs.find_last_not_of(" \t") != std::string_view::npos &&
                     lhs[lhs.find_last_not_of(" \t")] == '.';
    if (seen && is_triple == a.node_form)
      throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": mixed forms");
    seen = true;
    a.node_form = !is_triple;
    if (is_triple) {
      auto t = parse_triple_line(lhs, line_no, false);
      if (!t) throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no));
      a.triples.emplace_back(*t, block);
    } else {
      auto t = parse_term(lhs);
      if (!t || !t->is_iri())
        throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": expected <iri>");
      a.nodes.emplace_back(*t, block);
    }
  }
  return a;
}

namespace detail {

// Block ids in numeric order when all are integers, lexical order otherwise.
inline std::map<std::string, std::size_t> order_blocks(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) {
    return !s.empty() && s.size() < 18 &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  });
  if (numeric)
    std::sort(ids.begin(), ids.end(),
              [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = i;
  return out;
}

}  // namespace detail

inline NodePartition import_node_partition(const Assignment& a, const DataGraph& g) {
  if (!a.node_form) throw Error(ErrorCode::kInvalidArgument, "assignment lists triples, not nodes");
  std::vector<std::string> ids;
  for (auto& [n, b] : a.nodes) ids.push_back(b);
  auto order = detail::order_blocks(ids);
  auto nodes = non_literal_nodes(g);
  NodePartition blocks(order.size());
  std::vector<Term> seen;
  for (auto& [n, b] : a.nodes) {
    if (!std::binary_search(nodes.begin(), nodes.end(), n))
      throw Error(ErrorCode::kUnknownNode, n.render());
    blocks[order.at(b)].push_back(n);
    seen.push_back(n);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error(ErrorCode::kNotAPartition, "node listed twice");
  for (const auto& n : nodes)
    if (!std::binary_search(seen.begin(), seen.end(), n)) throw Error(ErrorCode::kMissingNode, n.render());
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  return blocks;
}

inline NodePartition import_node_partition(const std::string& path, const DataGraph& g) {
  return import_node_partition(parse_assignment(read_file(path)), g);
}

inline DataDecomposition import_triple_partition(const Assignment& a, const DataGraph& g) {
  if (a.node_form) throw Error(ErrorCode::kInvalidArgument, "assignment lists nodes, not triples");
  std::vector<std::string> ids;
  for (auto& [t, b] : a.triples) ids.push_back(b);
  auto order = detail::order_blocks(ids);
  std::vector<std::vector<Triple>> parts(order.size());
  std::vector<Triple> seen;
  for (auto& [t, b] : a.triples) {
    if (!g.contains(t)) throw Error(ErrorCode::kUnknownNode, "triple not in graph: " + t.render());
    parts[order.at(b)].push_back(t);
    seen.push_back(t);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error(ErrorCode::kNotAPartition, "triple listed twice");
  for (const auto& t : g.triples())
    if (!std::binary_search(seen.begin(), seen.end(), t)) throw Error(ErrorCode::kMissingNode, t.render());
  return make_decomposition(std::move(parts), "imported", 0);
}

}  // namespace stargraph
