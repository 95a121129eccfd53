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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <unistd.h>
#include <vector>

#include "stargraph/error.hpp"

namespace stargraph {

template <class K, class V>
struct Record {
  K key;
  V value;

  friend bool operator==(const Record&, const Record&) = default;
  friend auto operator<=>(const Record&, const Record&) = default;
};

/// Collects the records one map or reduce invocation emits. `emit` feeds the
/// job's main stream; `emit_to` writes a named side channel that bypasses the
/// rest of the job.
template <class K, class V>
class Emitter {
 public:
  void emit(K key, V value) { main_.push_back({std::move(key), std::move(value)}); }
  void emit_to(const std::string& channel, K key, V value) {
    side_[channel].push_back({std::move(key), std::move(value)});
  }

  std::vector<Record<K, V>>& main() { return main_; }
  std::map<std::string, std::vector<Record<K, V>>>& side() { return side_; }
  std::size_t side_count() const {
    std::size_t n = 0;
    for (auto& [_, v] : side_) n += v.size();
    return n;
  }

 private:
  std::vector<Record<K, V>> main_;
  std::map<std::string, std::vector<Record<K, V>>> side_;
};

template <class K, class V>
using GroupFn = std::function<void(const K&, std::span<const V>, Emitter<K, V>&)>;

/// Map and reduce both receive a key with all of its values in sorted order.
/// A job without a reduce function is map-only.
template <class K, class V>
struct JobSpec {
  std::string name;
  GroupFn<K, V> map;
  GroupFn<K, V> reduce;
};

struct StageStats {
  std::string stage;
  std::size_t records_in = 0;
  std::size_t records_out = 0;
  std::size_t shuffled = 0;
  std::size_t distinct_keys = 0;
  double wall_millis = 0;
  std::vector<std::size_t> worker_records_out;
};

template <class K, class V>
struct JobOutput {
  std::vector<Record<K, V>> main;
  std::map<std::string, std::vector<Record<K, V>>> side;
  StageStats stats;

  const std::vector<Record<K, V>>& channel(const std::string& name) const {
    static const std::vector<Record<K, V>> empty;
    if (name.empty()) return main;
    auto it = side.find(name);
    return it == side.end() ? empty : it->second;
  }
};

struct RuntimeOptions {
  std::size_t workers = 1;
  // Shuffle buffers larger than this many records are spilled to sorted runs
  // on disk. Zero keeps everything in memory.
  std::size_t spill_threshold = 0;
  std::string spill_dir;

  /// Reads STARGRAPH_SPILL_THRESHOLD when set.
  static RuntimeOptions from_env(std::size_t workers) {
    RuntimeOptions o;
    o.workers = std::max<std::size_t>(1, workers);
    if (const char* v = std::getenv("STARGRAPH_SPILL_THRESHOLD")) o.spill_threshold = std::strtoull(v, nullptr, 10);
    return o;
  }
};

inline std::string key_to_string(const std::string& k) { return k; }
inline std::string key_to_string(const std::vector<std::string>& k) {
  std::string out;
  for (std::size_t i = 0; i < k.size(); ++i) out += (i ? " " : "") + k[i];
  return out;
}
template <class T>
std::string key_to_string(const T& k) {
  if constexpr (std::is_arithmetic_v<T>) return std::to_string(k);
  else return "?";
}

/// Runs fn(task, worker) for every task in [0, n) on up to `workers`
/// threads. The exception of the lowest failing task is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i, 0);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i; !failed && (i = next++) < n;) {
          try {
            fn(i, w);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

template <class T>
struct SpillCodec : std::false_type {};

template <>
struct SpillCodec<std::string> : std::true_type {
  static void write(std::ostream& out, const std::string& s) {
    std::uint64_t n = s.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(s.data(), static_cast<std::streamsize>(n));
  }
  static bool read(std::istream& in, std::string& s) {
    std::uint64_t n;
    if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
    s.resize(n);
    return static_cast<bool>(in.read(s.data(), static_cast<std::streamsize>(n)));
  }
};

template <>
struct SpillCodec<std::vector<std::string>> : std::true_type {
  static void write(std::ostream& out, const std::vector<std::string>& v) {
    std::uint64_t n = v.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const auto& s : v) SpillCodec<std::string>::write(out, s);
  }
  static bool read(std::istream& in, std::vector<std::string>& v) {
    std::uint64_t n;
    if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
    v.resize(n);
    for (auto& s : v)
      if (!SpillCodec<std::string>::read(in, s)) return false;
    return true;
  }
};

/// Sorted record buffer that spills sorted runs to disk past a threshold and
/// replays everything as key groups in order.
template <class K, class V>
class SortBuffer {
  static constexpr bool kCanSpill = SpillCodec<K>::value && SpillCodec<V>::value;

 public:
  SortBuffer(std::size_t threshold, std::string dir) : threshold_(kCanSpill ? threshold : 0), dir_(std::move(dir)) {}
  ~SortBuffer() {
    std::error_code ec;
    if (!run_dir_.empty()) std::filesystem::remove_all(run_dir_, ec);
  }

  void add(Record<K, V> r) {
    mem_.push_back(std::move(r));
    ++size_;
    if (threshold_ && mem_.size() >= threshold_) spill();
  }
  std::size_t size() const { return size_; }
  std::size_t runs() const { return runs_.size(); }

  /// Calls on_batch(groups) with consecutive key groups; a batch holds about
  /// `threshold` records when spilling, otherwise everything.
  template <class OnBatch>
  void drain(OnBatch on_batch) {
    using Group = std::pair<K, std::vector<V>>;
    std::vector<Group> batch;
    std::size_t in_batch = 0;
    auto push = [&](Record<K, V>&& r) {
      if (batch.empty() || batch.back().first != r.key) {
        if (threshold_ && in_batch >= threshold_) {
          on_batch(batch);
          batch.clear();
          in_batch = 0;
        }
        batch.push_back({std::move(r.key), {}});
      }
      batch.back().second.push_back(std::move(r.value));
      ++in_batch;
    };
    if (runs_.empty()) {
      std::sort(mem_.begin(), mem_.end());
      for (auto& r : mem_) push(std::move(r));
      mem_.clear();
    } else {
      if constexpr (kCanSpill) {
        if (!mem_.empty()) spill();
        merge_runs(push);
      }
    }
    if (!batch.empty()) on_batch(batch);
  }

 private:
  void spill() {
    if constexpr (kCanSpill) {
      std::sort(mem_.begin(), mem_.end());
      if (run_dir_.empty()) {
        static std::atomic<unsigned> counter{0};
        auto base = dir_.empty() ? std::filesystem::temp_directory_path() : std::filesystem::path(dir_);
        run_dir_ = base / ("stargraph-spill-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(run_dir_);
      }
      auto path = run_dir_ / ("run-" + std::to_string(runs_.size()));
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorCode::kIOError, "cannot write spill run " + path.string());
      for (const auto& r : mem_) {
        SpillCodec<K>::write(out, r.key);
        SpillCodec<V>::write(out, r.value);
      }
      runs_.push_back(path);
      mem_.clear();
    }
  }

  template <class Push>
  void merge_runs(Push& push) {
    struct Cursor {
      std::ifstream in;
      Record<K, V> cur;
      bool next() { return SpillCodec<K>::read(in, cur.key) && SpillCodec<V>::read(in, cur.value); }
    };
    std::vector<Cursor> cursors(runs_.size());
    auto cmp = [&](std::size_t a, std::size_t b) { return cursors[b].cur < cursors[a].cur; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      cursors[i].in.open(runs_[i], std::ios::binary);
      if (cursors[i].next()) heap.push(i);
    }
    while (!heap.empty()) {
      auto i = heap.top();
      heap.pop();
      push(std::move(cursors[i].cur));
      if (cursors[i].next()) heap.push(i);
    }
  }

  std::size_t threshold_;
  std::string dir_;
  std::filesystem::path run_dir_;
  std::vector<Record<K, V>> mem_;
  std::vector<std::filesystem::path> runs_;
  std::size_t size_ = 0;
};

}  // namespace detail

/// Runs one job. `map_inputs` are grouped by key and handed to map; map
/// output plus `reduce_inputs` are shuffled by key and handed to reduce.
/// Output does not depend on the worker count.
template <class K, class V>
JobOutput<K, V> run_job(const JobSpec<K, V>& spec, std::vector<Record<K, V>> map_inputs,
                        const RuntimeOptions& opts, std::vector<Record<K, V>> reduce_inputs = {},
                        std::size_t stage = 0) {
  auto start = std::chrono::steady_clock::now();
  JobOutput<K, V> out;
  out.stats.stage = spec.name;
  out.stats.records_in = map_inputs.size() + reduce_inputs.size();
  out.stats.worker_records_out.assign(std::max<std::size_t>(1, opts.workers), 0);
  std::mutex stats_mu;
  auto credit = [&](std::size_t worker, std::size_t n) {
    std::lock_guard lock(stats_mu);
    out.stats.worker_records_out[worker] += n;
  };
  auto collect_side = [&](std::vector<Emitter<K, V>>& ems) {
    for (auto& em : ems)
      for (auto& [ch, recs] : em.side()) {
        auto& dst = out.side[ch];
        for (auto& r : recs) dst.push_back(std::move(r));
      }
  };
  auto run_groups = [&](std::vector<std::pair<K, std::vector<V>>>& groups, const GroupFn<K, V>& fn,
                        ErrorCode code, bool count_main) {
    std::vector<Emitter<K, V>> ems(groups.size());
    parallel_for(groups.size(), opts.workers, [&](std::size_t i, std::size_t w) {
      try {
        fn(groups[i].first, std::span<const V>(groups[i].second), ems[i]);
      } catch (const TaskError&) {
        throw;
      } catch (const Error& e) {
        throw TaskError(code, stage, key_to_string(groups[i].first), e.code(), e.what());
      } catch (const std::exception& e) {
        throw TaskError(code, stage, key_to_string(groups[i].first), code, e.what());
      }
      credit(w, ems[i].side_count() + (count_main ? ems[i].main().size() : 0));
    });
    return ems;
  };

  // Map phase.
  std::vector<std::pair<K, std::vector<V>>> map_groups;
  {
    std::sort(map_inputs.begin(), map_inputs.end());
    for (auto& r : map_inputs) {
      if (map_groups.empty() || map_groups.back().first != r.key) map_groups.push_back({std::move(r.key), {}});
      map_groups.back().second.push_back(std::move(r.value));
    }
    map_inputs.clear();
  }
  bool map_only = !spec.reduce;
  auto map_ems = run_groups(map_groups, spec.map, ErrorCode::kMapFnError, map_only);
  collect_side(map_ems);

  if (map_only) {
    out.stats.distinct_keys = map_groups.size();
    for (auto& em : map_ems)
      for (auto& r : em.main()) out.main.push_back(std::move(r));
    std::sort(out.main.begin(), out.main.end());
  } else {
    detail::SortBuffer<K, V> shuffle(opts.spill_threshold, opts.spill_dir);
    for (auto& em : map_ems)
      for (auto& r : em.main()) shuffle.add(std::move(r));
    map_ems.clear();
    for (auto& r : reduce_inputs) shuffle.add(std::move(r));
    reduce_inputs.clear();
    out.stats.shuffled = shuffle.size();
    shuffle.drain([&](std::vector<std::pair<K, std::vector<V>>>& groups) {
      out.stats.distinct_keys += groups.size();
      auto ems = run_groups(groups, spec.reduce, ErrorCode::kReduceFnError, true);
      for (auto& em : ems)
        for (auto& r : em.main()) out.main.push_back(std::move(r));
      collect_side(ems);
    });
  }
  for (auto& [_, recs] : out.side) std::sort(recs.begin(), recs.end());
  out.stats.records_out = out.main.size();
  for (auto& [_, recs] : out.side) out.stats.records_out += recs.size();
  out.stats.wall_millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Connects an output stream of an earlier stage to a later stage. An empty
/// channel name is the main stream.
struct Wire {
  std::size_t from;
  std::string channel;
  bool to_reduce = false;
};

template <class K, class V>
struct Stage {
  JobSpec<K, V> spec;
  std::vector<Wire> inputs;
};

/// Runs stages in order. Stage 0 additionally receives `initial` as map input.
template <class K, class V>
std::vector<JobOutput<K, V>> run_pipeline(const std::vector<Stage<K, V>>& stages,
                                          std::vector<Record<K, V>> initial, const RuntimeOptions& opts) {
  std::vector<JobOutput<K, V>> outs;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    std::vector<Record<K, V>> map_in, reduce_in;
    if (s == 0) map_in = std::move(initial);
    for (const auto& w : stages[s].inputs) {
      if (w.from >= s) throw Error(ErrorCode::kInvalidArgument, "wire from a later stage");
      const auto& src = outs[w.from].channel(w.channel);
      auto& dst = w.to_reduce ? reduce_in : map_in;
      dst.insert(dst.end(), src.begin(), src.end());
    }
    outs.push_back(run_job(stages[s].spec, std::move(map_in), opts, std::move(reduce_in), s));
  }
  return outs;
}

}  // namespace stargraph
