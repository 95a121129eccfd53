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
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stargraph.hpp"

namespace stargraph::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kPrecondition = 3, kLimit = 4 };

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kNotAnSDecomposition:
    case ErrorCode::kNotSoDecomposition:
    case ErrorCode::kNotAStarDecomposition:
    case ErrorCode::kNotANodeCover:
      return kPrecondition;
    case ErrorCode::kCartesianLimit:
    case ErrorCode::kSearchSpaceTooLarge:
      return kLimit;
    default:
      return kUsage;
  }
}

inline std::vector<Term> parse_term_list(const std::string& s) {
  std::vector<Term> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == ',' || s[pos] == ' ') {
      ++pos;
      continue;
    }
    auto t = read_term(s, pos);
    if (!t) throw Error(ErrorCode::kInvalidArgument, "bad term list: " + s);
    out.push_back(*t);
  }
  return out;
}

inline nlohmann::json report_to_json(const ValidationReport& r) {
  return {{"isDecomposition", r.is_decomposition},
          {"isNonRedundant", r.is_non_redundant},
          {"allSoQueries", r.all_so_queries},
          {"allGeneralizedStars", r.all_generalized_stars},
          {"maxVariablesPerSubquery", r.max_variables_per_subquery},
          {"subqueryCount", r.subquery_count}};
}

struct PartitionArgs {
  std::string input, method, assign, out;
  std::size_t segments = 0;
  std::uint64_t seed = 0;
};

struct DecomposeArgs {
  std::string query, method, cover, out;
};

struct EvalArgs {
  std::string algorithm, data, query, plan, decompose = "max-degree", out, stats;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t cap = EvalOptions{}.cartesian_cap;
  bool provenance = false, short_circuit = false, no_dedup = false, stable_stats = false;
};

struct OracleArgs {
  std::string data, query, out;
  bool count = false;
};

struct GenArgs {
  GenOptions opts;
  std::string out;
};

inline void cmd_partition(const PartitionArgs& a, std::ostream& out) {
  auto g = load_data(a.input);
  SegmentSet set;
  if (a.method == "edge-random") {
    set = edge_random_partition(g, a.segments, a.seed).to_segment_set();
  } else if (a.method == "vertex-hash") {
    auto blocks = vertex_hash_partition(g, a.segments, a.seed);
    set = s_decompose(g, std::move(blocks), "vertex-hash", a.seed).to_segment_set();
  } else if (a.method == "import") {
    if (a.assign.empty()) throw Error(ErrorCode::kInvalidArgument, "--method import needs --assign");
    auto assignment = parse_assignment(read_file(a.assign));
    if (assignment.node_form)
      set = s_decompose(g, import_node_partition(assignment, g), "imported", 0).to_segment_set();
    else
      set = import_triple_partition(assignment, g).to_segment_set();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown partition method: " + a.method);
  }
  auto manifest = write_segments(set, a.out);
  out << manifest.dump(2) << "\n";
}

inline void cmd_decompose(const DecomposeArgs& a, std::ostream& out) {
  auto q = load_query(a.query);
  QueryDecomposition d;
  if (a.method == "node-cover") {
    if (a.cover.empty()) throw Error(ErrorCode::kInvalidArgument, "--method node-cover needs --cover");
    d = star_decompose_from_cover(q, parse_term_list(a.cover));
  } else {
    d = decompose(q, a.method);
  }
  auto plan = plan_to_json(preprocess(q, d));
  plan["validation"] = report_to_json(validate_decomposition(q, d));
  if (!a.out.empty()) write_file(a.out, plan.dump(2) + "\n");
  out << plan["validation"].dump(2) << "\n";
}

inline void cmd_eval(const EvalArgs& a, std::ostream& out) {
  auto segs = read_segments(a.data);
  auto q = load_query(a.query);
  QueryDecomposition d = a.plan.empty() ? decompose(q, a.decompose)
                                        : decomposition_from_json(q, nlohmann::json::parse(read_file(a.plan), nullptr, true, true));
  EvalOptions opts;
  opts.workers = a.workers;
  opts.spill_threshold = RuntimeOptions::from_env(a.workers).spill_threshold;
  opts.cartesian_cap = a.cap;
  opts.provenance = a.provenance;
  opts.short_circuit = a.short_circuit;
  opts.dedup = !a.no_dedup;
  auto res = evaluate(a.algorithm, segs, q, d, opts);
  auto tsv = answers_to_tsv(q.output_pattern(), res.answers);
  if (a.out.empty()) out << tsv;
  else write_file(a.out, tsv);
  if (!a.stats.empty()) write_file(a.stats, stats_to_json(res, a.stable_stats).dump(2) + "\n");
}

inline void cmd_oracle(const OracleArgs& a, std::ostream& out) {
  auto g = load_data(a.data);
  auto q = load_query(a.query);
  if (a.count) {
    out << count_embeddings(q, g) << "\n";
    return;
  }
  auto tsv = answers_to_tsv(q.output_pattern(), oracle_answers(q, g));
  if (a.out.empty()) out << tsv;
  else write_file(a.out, tsv);
}

inline void cmd_gen(const GenArgs& a, std::ostream& out) {
  auto g = generate_graph(a.opts);
  auto text = serialize(g);
  if (a.out.empty()) out << text;
  else write_file(a.out, text);
}

/// Runs the command line `args` (without the program name) and returns the
/// process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Distributed evaluation of basic graph patterns over partitioned RDF graphs", "stargraph"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* part = app.add_subcommand("partition", "Split a data graph into segments");
  part->add_option("--input", pa.input, "N-Triples data graph")->required();
  part->add_option("--method", pa.method, "edge-random, vertex-hash or import")
      ->required()
      ->check(CLI::IsMember({"edge-random", "vertex-hash", "import"}));
  part->add_option("--segments", pa.segments, "Number of segments");
  part->add_option("--seed", pa.seed, "RNG seed");
  part->add_option("--assign", pa.assign, "Node or triple assignment file for --method import");
  part->add_option("--out", pa.out, "Output directory")->required();

  DecomposeArgs da;
  std::vector<std::string> methods(decomposition_methods().begin(), decomposition_methods().end());
  methods.push_back("single");
  methods.push_back("node-cover");
  auto* dec = app.add_subcommand("decompose", "Decompose a query and write a plan");
  dec->add_option("--query", da.query, "Query file")->required();
  dec->add_option("--method", da.method, "Decomposition algorithm")->required()->check(CLI::IsMember(methods));
  dec->add_option("--cover", da.cover, "Node cover for --method node-cover, comma separated");
  dec->add_option("--out", da.out, "Plan JSON output");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a query over a segment directory");
  ev->add_option("--algorithm", ea.algorithm, "qejpe, stars or redundancy")
      ->required()
      ->check(CLI::IsMember({"qejpe", "stars", "redundancy"}));
  ev->add_option("--data", ea.data, "Segment directory")->required();
  ev->add_option("--query", ea.query, "Query file")->required();
  auto* plan_opt = ev->add_option("--plan", ea.plan, "Plan JSON from the decompose command");
  ev->add_option("--decompose", ea.decompose, "Decomposition algorithm when no plan is given")
      ->check(CLI::IsMember(methods))
      ->excludes(plan_opt);
  ev->add_option("--workers", ea.workers, "Worker threads")->check(CLI::PositiveNumber);
  ev->add_option("--out", ea.out, "Answers TSV (stdout when omitted)");
  ev->add_option("--stats", ea.stats, "Stats JSON output");
  ev->add_option("--cartesian-cap", ea.cap, "Largest cartesian expansion allowed");
  ev->add_flag("--provenance", ea.provenance, "Join only fragments from different segments");
  ev->add_flag("--short-circuit", ea.short_circuit, "Skip phase 2 when a subquery has no embedding");
  ev->add_flag("--no-dedup", ea.no_dedup, "Keep duplicate embeddings before expansion");
  ev->add_flag("--stable-stats", ea.stable_stats, "Write zero wall times to the stats file");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Answer a query by exhaustive matching");
  orc->add_option("--data", oa.data, "N-Triples data graph")->required();
  orc->add_option("--query", oa.query, "Query file")->required();
  orc->add_option("--out", oa.out, "Answers TSV (stdout when omitted)");
  orc->add_flag("--count", oa.count, "Print the number of embeddings instead");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic data graph");
  gen->add_option("--triples", ga.opts.triples, "Number of distinct triples")->required();
  gen->add_option("--seed", ga.opts.seed, "RNG seed");
  gen->add_option("--nodes", ga.opts.nodes, "Number of IRI nodes");
  gen->add_option("--predicates", ga.opts.predicates, "Number of predicates");
  gen->add_option("--literal-ratio", ga.opts.literal_ratio, "Share of literal objects");
  gen->add_option("--star-ratio", ga.opts.star_ratio, "Share of triples leaving a hub");
  gen->add_option("--path-ratio", ga.opts.path_ratio, "Share of chain triples");
  gen->add_option("--out", ga.out, "Output file (stdout when omitted)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (part->parsed()) cmd_partition(pa, out);
    else if (dec->parsed()) cmd_decompose(da, out);
    else if (ev->parsed()) cmd_eval(ea, out);
    else if (orc->parsed()) cmd_oracle(oa, out);
    else if (gen->parsed()) cmd_gen(ga, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(root_code(e));
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace stargraph::cli
