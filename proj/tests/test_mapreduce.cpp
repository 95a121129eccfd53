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

#include <filesystem>
#include <map>
#include <sstream>

#include "stargraph/mapreduce.hpp"
#include "support/testkit.hpp"

using namespace stargraph;

namespace {

using SRec = Record<std::string, std::string>;
using SJob = JobSpec<std::string, std::string>;
using SEm = Emitter<std::string, std::string>;
using VKey = std::vector<std::string>;

RuntimeOptions workers(std::size_t n, std::size_t spill = 0) {
  RuntimeOptions o;
  o.workers = n;
  o.spill_threshold = spill;
  return o;
}

SJob identity_concat() {
  return {"concat",
          [](const std::string& k, std::span<const std::string> vs, SEm& out) {
            for (const auto& v : vs) out.emit(k, v);
          },
          [](const std::string& k, std::span<const std::string> vs, SEm& out) {
            std::string s;
            for (const auto& v : vs) s += v + ",";
            out.emit(k, s);
          }};
}

SJob word_count() {
  return {"wc",
          [](const std::string&, std::span<const std::string> lines, SEm& out) {
            for (const auto& line : lines) {
              std::istringstream in(line);
              std::string w;
              while (in >> w) out.emit(w, "1");
            }
          },
          [](const std::string& w, std::span<const std::string> ones, SEm& out) {
            out.emit(w, std::to_string(ones.size()));
          }};
}

std::vector<SRec> random_records(Rng& rng, std::size_t n, std::size_t keys) {
  std::vector<SRec> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"k" + std::to_string(rng.uniform(keys)), "v" + std::to_string(rng.uniform(1000))});
  return out;
}

}  // namespace

TEST(RunJob, IdentityConcatSameForAnyWorkerCount) {
  std::vector<SRec> in{{"b", "2"}, {"a", "1"}, {"b", "0"}};
  auto one = run_job(identity_concat(), in, workers(1));
  auto four = run_job(identity_concat(), in, workers(4));
  EXPECT_EQ(one.main, four.main);
  EXPECT_EQ(one.main, (std::vector<SRec>{{"a", "1,"}, {"b", "0,2,"}}));
}

TEST(RunJob, WordCount) {
  std::vector<SRec> in{{"doc1", "the cat sat"}, {"doc2", "the cat"}, {"doc3", "a the"}};
  auto out = run_job(word_count(), in, workers(3));
  std::map<std::string, std::string> counts;
  for (const auto& r : out.main) counts[r.key] = r.value;
  EXPECT_EQ(counts, (std::map<std::string, std::string>{{"a", "1"}, {"cat", "2"}, {"sat", "1"}, {"the", "3"}}));
  EXPECT_EQ(out.stats.shuffled, 7u);
  EXPECT_EQ(out.stats.distinct_keys, 4u);
  EXPECT_EQ(out.stats.records_in, 3u);
  EXPECT_EQ(out.stats.records_out, 4u);
}

TEST(RunJob, SideChannelBypassesReduce) {
  SJob job{"side",
           [](const std::string& k, std::span<const std::string> vs, SEm& out) {
             for (const auto& v : vs) {
               if (v == "skip") out.emit_to("later", k, v);
               else out.emit(k, v);
             }
           },
           [](const std::string& k, std::span<const std::string> vs, SEm& out) {
             out.emit(k, std::to_string(vs.size()));
           }};
  auto out = run_job(job, {{"x", "skip"}, {"x", "keep"}, {"y", "keep"}}, workers(2));
  EXPECT_EQ(out.main, (std::vector<SRec>{{"x", "1"}, {"y", "1"}}));
  EXPECT_EQ(out.channel("later"), (std::vector<SRec>{{"x", "skip"}}));
  EXPECT_TRUE(out.channel("missing").empty());
  EXPECT_EQ(out.stats.shuffled, 2u);
  EXPECT_EQ(out.stats.records_out, 3u);
}

TEST(RunJob, ValuesArriveSorted) {
  SJob job{"sorted",
           [](const std::string& k, std::span<const std::string> vs, SEm& out) {
             EXPECT_TRUE(std::is_sorted(vs.begin(), vs.end()));
             for (const auto& v : vs) out.emit(k, v);
           },
           [](const std::string& k, std::span<const std::string> vs, SEm& out) {
             EXPECT_TRUE(std::is_sorted(vs.begin(), vs.end()));
             out.emit(k, std::to_string(vs.size()));
           }};
  Rng rng(51);
  run_job(job, random_records(rng, 500, 7), workers(4));
}

TEST(RunJob, MapOnly) {
  SJob job{"maponly",
           [](const std::string& k, std::span<const std::string> vs, SEm& out) { out.emit(k + "!", vs[0]); },
           {}};
  auto out = run_job(job, {{"b", "1"}, {"a", "2"}}, workers(2));
  EXPECT_EQ(out.main, (std::vector<SRec>{{"a!", "2"}, {"b!", "1"}}));
  EXPECT_EQ(out.stats.shuffled, 0u);
  EXPECT_EQ(out.stats.distinct_keys, 2u);
}

TEST(RunJob, MapFailureCarriesKey) {
  SJob job{"boom",
           [](const std::string& k, std::span<const std::string>, SEm&) {
             if (k == "bad") throw Error(ErrorCode::kCartesianLimit, "too big");
           },
           [](const std::string&, std::span<const std::string>, SEm&) {}};
  try {
    run_job(job, {{"ok", "1"}, {"bad", "2"}}, workers(2), {}, 3);
    FAIL();
  } catch (const TaskError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMapFnError);
    EXPECT_EQ(e.key(), "bad");
    EXPECT_EQ(e.stage(), 3u);
    EXPECT_EQ(e.cause(), ErrorCode::kCartesianLimit);
    EXPECT_EQ(root_code(e), ErrorCode::kCartesianLimit);
  }
}

TEST(RunJob, ReduceFailureCarriesKey) {
  SJob job{"boom",
           [](const std::string& k, std::span<const std::string> vs, SEm& out) { out.emit(k, vs[0]); },
           [](const std::string& k, std::span<const std::string>, SEm&) {
             if (k == "z") throw std::runtime_error("bad reduce");
           }};
  try {
    run_job(job, {{"a", "1"}, {"z", "2"}}, workers(1));
    FAIL();
  } catch (const TaskError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReduceFnError);
    EXPECT_EQ(e.key(), "z");
    EXPECT_EQ(e.cause(), ErrorCode::kReduceFnError);
  }
}

TEST(RunJob, CompositeKeysShuffleExactlyOnce) {
  JobSpec<VKey, std::string> job{
      "composite",
      [](const VKey& k, std::span<const std::string> vs, Emitter<VKey, std::string>& out) {
        for (const auto& v : vs) out.emit({k[0], v.substr(0, 1)}, v);
      },
      [](const VKey& k, std::span<const std::string> vs, Emitter<VKey, std::string>& out) {
        out.emit(k, std::to_string(vs.size()));
      }};
  Rng rng(52);
  std::vector<Record<VKey, std::string>> in;
  std::map<VKey, std::size_t> expect;
  for (int i = 0; i < 400; ++i) {
    VKey k{"g" + std::to_string(rng.uniform(5))};
    std::string v = std::to_string(rng.uniform(100));
    expect[{k[0], v.substr(0, 1)}]++;
    in.push_back({k, v});
  }
  auto out = run_job(job, in, workers(4));
  ASSERT_EQ(out.main.size(), expect.size());
  for (const auto& r : out.main) EXPECT_EQ(std::stoul(r.value), expect.at(r.key));
}

TEST(RunJob, ScheduleIndependence) {
  Rng rng(53);
  for (int i = 0; i < 20; ++i) {
    auto in = random_records(rng, 50 + rng.uniform(500), 1 + rng.uniform(40));
    auto base = run_job(identity_concat(), in, workers(1));
    for (std::size_t w : {2u, 8u}) {
      auto other = run_job(identity_concat(), in, workers(w));
      EXPECT_EQ(base.main, other.main);
      EXPECT_EQ(base.stats.shuffled, other.stats.shuffled);
      EXPECT_EQ(base.stats.distinct_keys, other.stats.distinct_keys);
    }
  }
}

TEST(RunJob, SpillMatchesInMemory) {
  Rng rng(54);
  testkit::TempDir dir("spill");
  auto in = random_records(rng, 3000, 97);
  auto mem = run_job(identity_concat(), in, workers(2));
  auto opts = workers(2, 64);
  opts.spill_dir = dir.str();
  auto spilled = run_job(identity_concat(), in, opts);
  EXPECT_EQ(mem.main, spilled.main);
  EXPECT_EQ(mem.stats.distinct_keys, spilled.stats.distinct_keys);
  std::size_t left = 0;
  for (auto it = std::filesystem::recursive_directory_iterator(dir.str()); it != std::filesystem::end(it); ++it)
    left += it->is_regular_file();
  EXPECT_EQ(left, 0u);
}

TEST(RunJob, WorkerRecordsSumToStageTotal) {
  Rng rng(55);
  auto in = random_records(rng, 800, 30);
  for (std::size_t w : {1u, 3u, 8u}) {
    auto out = run_job(word_count(), in, workers(w));
    std::size_t sum = 0;
    for (auto n : out.stats.worker_records_out) sum += n;
    EXPECT_EQ(out.stats.worker_records_out.size(), w);
    EXPECT_EQ(sum, out.stats.records_out);
  }
}

TEST(Pipeline, SideChannelMergesIntoNextMap) {
  SJob first{"split",
             [](const std::string& k, std::span<const std::string> vs, SEm& out) {
               for (const auto& v : vs) {
                 if (v.front() == 's') out.emit_to("ch", k, v);
                 else out.emit(k, v);
               }
             },
             [](const std::string& k, std::span<const std::string> vs, SEm& out) {
               for (const auto& v : vs) out.emit(k, "r" + v);
             }};
  SJob second{"join",
              [](const std::string& k, std::span<const std::string> vs, SEm& out) {
                for (const auto& v : vs) out.emit(k, v);
              },
              [](const std::string& k, std::span<const std::string> vs, SEm& out) {
                std::string s;
                for (const auto& v : vs) s += v + ";";
                out.emit(k, s);
              }};
  std::vector<Stage<std::string, std::string>> stages{{first, {}}, {second, {{0, "", false}, {0, "ch", false}}}};
  auto outs = run_pipeline(stages, {{"a", "x"}, {"a", "s1"}, {"b", "s2"}}, workers(2));
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(outs[1].main, (std::vector<SRec>{{"a", "rx;s1;"}, {"b", "s2;"}}));
  EXPECT_EQ(outs[1].stats.records_in, 3u);
}

TEST(Pipeline, WireIntoReduce) {
  SJob first{"maponly",
             [](const std::string& k, std::span<const std::string> vs, SEm& out) {
               out.emit_to("direct", k, vs[0]);
               out.emit_to("mapped", k, vs[0] + "m");
             },
             {}};
  SJob second{"count",
              [](const std::string& k, std::span<const std::string> vs, SEm& out) {
                for (const auto& v : vs) out.emit(k, v);
              },
              [](const std::string& k, std::span<const std::string> vs, SEm& out) {
                std::string s;
                for (const auto& v : vs) s += v + ";";
                out.emit(k, s);
              }};
  std::vector<Stage<std::string, std::string>> stages{{first, {}},
                                                      {second, {{0, "mapped", false}, {0, "direct", true}}}};
  auto outs = run_pipeline(stages, {{"k", "v"}}, workers(1));
  EXPECT_EQ(outs[1].main, (std::vector<SRec>{{"k", "v;vm;"}}));
  EXPECT_EQ(outs[1].stats.shuffled, 2u);
}

TEST(Pipeline, EmptyIntermediateStream) {
  SJob drop{"drop", [](const std::string&, std::span<const std::string>, SEm&) {},
            [](const std::string&, std::span<const std::string>, SEm&) {}};
  std::vector<Stage<std::string, std::string>> stages{{drop, {}}, {identity_concat(), {{0, "", false}}}};
  auto outs = run_pipeline(stages, {{"a", "1"}}, workers(2));
  EXPECT_TRUE(outs[1].main.empty());
  EXPECT_EQ(outs[1].stats.records_in, 0u);
  EXPECT_EQ(outs[1].stats.records_out, 0u);
}

TEST(Pipeline, RecordsOutReported) {
  SJob fan{"fan",
           [](const std::string& k, std::span<const std::string>, SEm& out) {
             for (int i = 0; i < 7; ++i) out.emit(k + std::to_string(i), "x");
           },
           {}};
  std::vector<Stage<std::string, std::string>> stages{{fan, {}}};
  auto outs = run_pipeline(stages, {{"a", "1"}, {"b", "1"}}, workers(2));
  EXPECT_EQ(outs[0].stats.records_out, 14u);
  EXPECT_EQ(outs[0].stats.stage, "fan");
}

TEST(Pipeline, RejectsForwardWire) {
  std::vector<Stage<std::string, std::string>> stages{{identity_concat(), {{0, "", false}}}};
  EXPECT_THROW(run_pipeline(stages, {}, workers(1)), Error);
}

TEST(Runtime, SpillThresholdFromEnvironment) {
  ::setenv("STARGRAPH_SPILL_THRESHOLD", "123", 1);
  auto o = RuntimeOptions::from_env(0);
  ::unsetenv("STARGRAPH_SPILL_THRESHOLD");
  EXPECT_EQ(o.spill_threshold, 123u);
  EXPECT_EQ(o.workers, 1u);
  EXPECT_EQ(RuntimeOptions::from_env(4).spill_threshold, 0u);
}
