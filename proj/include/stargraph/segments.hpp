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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stargraph/error.hpp"
#include "stargraph/ntriples.hpp"
#include "stargraph/rdf.hpp"
#include "stargraph/rng.hpp"

namespace stargraph {

enum class Layout { kTriplePartition, kSDecomposition };

inline std::string layout_name(Layout l) {
  return l == Layout::kSDecomposition ? "s-decomposition" : "triple-partition";
}

/// One data segment with its border nodes and, for s-decompositions, its
/// replicated nodes. Both node lists are sorted.
struct Segment {
  DataGraph graph;
  std::vector<Term> border;
  std::optional<std::vector<Term>> replicated;

  bool is_border(const Term& t) const {
    return std::binary_search(border.begin(), border.end(), t);
  }

  /// Border flag per interned id of `graph`.
  std::vector<char> border_mask() const {
    std::vector<char> mask(graph.term_count(), 0);
    for (const auto& b : border)
      if (auto id = graph.id_of(b)) mask[*id] = 1;
    return mask;
  }

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentSet {
  std::string method;
  std::uint64_t seed = 0;
  Layout layout = Layout::kTriplePartition;
  std::vector<Segment> segments;
};

/// Border sets of a tuple of graphs: non-literal nodes occurring in at least
/// two of them.
inline std::vector<std::vector<Term>> compute_border_sets(const std::vector<DataGraph>& graphs) {
  std::vector<Term> all;
  for (const auto& g : graphs)
    for (const auto& n : g.nodes())
      if (!n.is_literal()) all.push_back(n);
  std::sort(all.begin(), all.end());
  std::vector<Term> shared;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    if (j - i >= 2) shared.push_back(all[i]);
    i = j;
  }
  std::vector<std::vector<Term>> out;
  for (const auto& g : graphs) {
    std::vector<Term> b;
    std::set_intersection(g.nodes().begin(), g.nodes().end(), shared.begin(), shared.end(),
                          std::back_inserter(b));
    out.push_back(std::move(b));
  }
  return out;
}

namespace detail {

inline std::string render_node_list(const std::vector<Term>& nodes) {
  std::string out;
  for (const auto& n : nodes) out += n.render() + "\n";
  return out;
}

inline std::vector<Term> parse_node_list(const std::string& text, const std::string& path) {
  std::vector<Term> out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    auto t = parse_term(line);
    if (!t || t->is_variable())
      throw Error(ErrorCode::kMalformedLine, path + " line " + std::to_string(line_no));
    out.push_back(*t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string created_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = std::strtoll(epoch, nullptr, 10);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

/// Writes seg-<k>.nt, seg-<k>.border, optional seg-<k>.repl and manifest.json
/// into `dir` (created if needed). Segments are numbered from 1.
inline nlohmann::json write_segments(const SegmentSet& set, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIOError, "cannot create " + dir);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t k = 0; k < set.segments.size(); ++k) {
    const auto& seg = set.segments[k];
    if (seg.graph.size() == 0)
      throw Error(ErrorCode::kRejectedEmptySegment, "segment " + std::to_string(k + 1));
  }
  for (std::size_t k = 0; k < set.segments.size(); ++k) {
    const auto& seg = set.segments[k];
    std::string base = (fs::path(dir) / ("seg-" + std::to_string(k + 1))).string();
    std::string nt = serialize(seg.graph);
    write_file(base + ".nt", nt);
    write_file(base + ".border", detail::render_node_list(seg.border));
    if (seg.replicated) write_file(base + ".repl", detail::render_node_list(*seg.replicated));
    files.push_back({{"id", k + 1},
                     {"triples", seg.graph.size()},
                     {"checksum", detail::hex64(fnv1a64(nt))}});
  }
  nlohmann::json manifest = {{"method", set.method},
                             {"seed", set.seed},
                             {"segments", set.segments.size()},
                             {"layout", layout_name(set.layout)},
                             {"created", detail::created_timestamp()},
                             {"files", files}};
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return manifest;
}

inline SegmentSet read_segments(const std::string& dir) {
  namespace fs = std::filesystem;
  auto manifest_path = fs::path(dir) / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::kMissingManifest, manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIOError, "bad manifest: " + std::string(e.what()));
  }
  SegmentSet set;
  set.method = manifest.value("method", "");
  set.seed = manifest.value("seed", std::uint64_t{0});
  set.layout = manifest.value("layout", "") == "s-decomposition" ? Layout::kSDecomposition
                                                                  : Layout::kTriplePartition;
  std::size_t m = manifest.value("segments", std::size_t{0});
  auto files = manifest.value("files", nlohmann::json::array());

  std::size_t present = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (name.rfind("seg-", 0) == 0 && entry.path().extension() == ".nt") ++present;
  }
  if (present != m || (!files.empty() && files.size() != m))
    throw Error(ErrorCode::kChecksumMismatch,
                "manifest lists " + std::to_string(m) + " segments, found " +
                    std::to_string(present));

  for (std::size_t k = 0; k < m; ++k) {
    std::string base = (fs::path(dir) / ("seg-" + std::to_string(k + 1))).string();
    if (!fs::exists(base + ".nt"))
      throw Error(ErrorCode::kChecksumMismatch, "missing " + base + ".nt");
    std::string nt = read_file(base + ".nt");
    if (!files.empty()) {
      const auto& f = files[k];
      if (f.value("checksum", "") != detail::hex64(fnv1a64(nt)))
        throw Error(ErrorCode::kChecksumMismatch, base + ".nt");
    }
    if (!fs::exists(base + ".border")) throw Error(ErrorCode::kMissingBorderSidecar, base + ".border");
    Segment seg{parse_data(nt), detail::parse_node_list(read_file(base + ".border"), base + ".border"),
                std::nullopt};
    if (fs::exists(base + ".repl"))
      seg.replicated = detail::parse_node_list(read_file(base + ".repl"), base + ".repl");
    set.segments.push_back(std::move(seg));
  }
  return set;
}

}  // namespace stargraph
