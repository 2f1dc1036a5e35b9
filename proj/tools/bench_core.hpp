#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "reclaim/structures/manual_bst.hpp"
#include "reclaim/structures/manual_list.hpp"
#include "reclaim/structures/manual_queue.hpp"
#include "reclaim/structures/rc_bst.hpp"
#include "reclaim/structures/rc_list.hpp"
#include "reclaim/structures/rc_queue.hpp"

// Workload runner: prefills one structure, hammers it from N registered
// threads for a fixed duration (the first 10% is warmup and excluded from
// throughput), samples the allocation ledger every 10 ms, and emits one
// CSV/JSON record per run plus a mean/stddev summary row when repeating.

namespace bench {

using namespace reclaim;
using namespace reclaim::structures;

struct WorkloadConfig {
  std::string structure = "hash";  // list | hash | bst | dlqueue
  std::string scheme = "rc-ebr";   // ebr | ibr | hp | rc-ebr | rc-ibr | rc-hp
  unsigned threads = 4;
  double duration_s = 1.0;
  std::uint64_t init_size = 1000;
  std::uint64_t key_range = 0;  // 0 -> 2 * init_size
  unsigned update_pct = 10;     // split half insert, half delete
  unsigned rq_pct = 0;          // bst only
  unsigned rq_size = 64;
  unsigned epoch_freq = 0;  // 0 -> backend default
  std::uint64_t seed = 1;
  unsigned repeat = 1;
  std::string format = "csv";  // csv | json
  std::string out;             // empty -> stdout
};

// Normalizes defaults and reports the first configuration error, if any.
inline std::optional<std::string> validate(WorkloadConfig& c) {
  if (c.structure != "list" && c.structure != "hash" && c.structure != "bst" &&
      c.structure != "dlqueue") {
    return "unknown structure: " + c.structure;
  }
  bool rc = c.scheme.rfind("rc-", 0) == 0;
  std::string backend = rc ? c.scheme.substr(3) : c.scheme;
  try {
    parse_backend_name(backend);
  } catch (const std::exception& e) {
    return std::string(e.what()) + " (scheme " + c.scheme + ")";
  }
  if (c.threads < 1) return "threads must be >= 1";
  if (c.threads + 2 > ThreadRegistry::max_threads()) return "too many threads";
  if (c.duration_s <= 0) return "duration must be positive";
  if (c.init_size < 1) return "init-size must be >= 1";
  if (c.key_range == 0) c.key_range = 2 * c.init_size;
  if (c.key_range < c.init_size) return "key-range must be >= init-size";
  if (c.update_pct + c.rq_pct > 100) return "update-pct + rq-pct must be <= 100";
  if (c.rq_pct > 0 && c.structure != "bst") {
    return "range queries are only supported on the bst";
  }
  if (c.rq_size < 1) return "rq-size must be >= 1";
  if (c.structure == "bst" && c.scheme == "hp") {
    return "the manual Natarajan-Mittal tree is unsafe under plain hazard "
           "pointers; use ebr, ibr, or an rc-* scheme";
  }
  if (c.repeat < 1) return "repeat must be >= 1";
  if (c.format != "csv" && c.format != "json") return "format must be csv or json";
  return std::nullopt;
}

struct OpCounts {
  std::uint64_t inserts = 0, removes = 0, lookups = 0, range_queries = 0;
  std::uint64_t enqueues = 0, dequeues = 0;

  std::uint64_t total() const {
    return inserts + removes + lookups + range_queries + enqueues + dequeues;
  }
};

struct RunResult {
  WorkloadConfig cfg;
  unsigned repeat_index = 0;
  double throughput = 0;  // ops/s over the measured window
  OpCounts ops;           // measured window only
  std::uint64_t peak_live = 0, mean_live = 0;
  std::uint64_t slow_path_snapshots = 0;  // measured window
};

// Deterministic per-thread operation stream: identical seed and thread id
// reproduce the identical op sequence.
struct OpGen {
  struct Op {
    char kind;  // 'i'nsert, 'r'emove, 'l'ookup, 'q' range query
    std::uint64_t key;
  };

  std::mt19937_64 rng;

  OpGen(std::uint64_t seed, unsigned tid)
      : rng(seed + 0x9E3779B97F4A7C15ull * (tid + 1)) {}

  Op next(const WorkloadConfig& c) {
    std::uint64_t k = rng() % c.key_range;
    auto r = static_cast<unsigned>(rng() % 100);
    if (r < c.update_pct) return {(r & 1) ? 'i' : 'r', k};
    if (r < c.update_pct + c.rq_pct) return {'q', k};
    return {'l', k};
  }
};

template <class S>
concept HasRangeQuery = requires(S s) {
  s.range_query(std::uint64_t{}, std::uint64_t{});
};

namespace detail {

struct RunController {
  std::atomic<bool> start{false};
  std::atomic<bool> measuring{false};
  std::atomic<bool> stop{false};
  std::atomic<bool> sampler_stop{false};
};

// Drives the workers, the warmup split, and the 10 ms ledger sampler.
// `body(tid, measured_counts)` runs the per-thread loop.
template <class Body>
RunResult drive(const WorkloadConfig& c, unsigned repeat_index, Body&& body) {
  RunController ctl;
  std::vector<OpCounts> counts(c.threads);
  std::vector<std::thread> workers;
  workers.reserve(c.threads);
  for (unsigned t = 0; t < c.threads; ++t) {
    workers.emplace_back([&, t] {
      while (!ctl.start.load(std::memory_order_acquire)) std::this_thread::yield();
      body(t, ctl, counts[t]);
    });
  }

  std::vector<std::uint64_t> samples;
  std::thread sampler([&] {
    while (!ctl.sampler_stop.load(std::memory_order_acquire)) {
      samples.push_back(ledger::live_allocations());
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  });

  using clock = std::chrono::steady_clock;
  ctl.start.store(true, std::memory_order_release);
  std::this_thread::sleep_for(std::chrono::duration<double>(c.duration_s * 0.1));
  auto slow0 = ledger::counters().slow_path_snapshots.load();
  auto m_start = clock::now();
  ctl.measuring.store(true, std::memory_order_release);
  std::this_thread::sleep_for(std::chrono::duration<double>(c.duration_s * 0.9));
  ctl.stop.store(true, std::memory_order_release);
  double elapsed = std::chrono::duration<double>(clock::now() - m_start).count();
  for (auto& w : workers) w.join();
  ctl.sampler_stop.store(true, std::memory_order_release);
  sampler.join();

  RunResult r;
  r.cfg = c;
  r.repeat_index = repeat_index;
  for (auto& oc : counts) {
    r.ops.inserts += oc.inserts;
    r.ops.removes += oc.removes;
    r.ops.lookups += oc.lookups;
    r.ops.range_queries += oc.range_queries;
    r.ops.enqueues += oc.enqueues;
    r.ops.dequeues += oc.dequeues;
  }
  r.throughput = static_cast<double>(r.ops.total()) / elapsed;
  r.slow_path_snapshots = ledger::counters().slow_path_snapshots.load() - slow0;
  if (!samples.empty()) {
    std::uint64_t sum = 0;
    for (auto v : samples) {
      sum += v;
      if (v > r.peak_live) r.peak_live = v;
    }
    r.mean_live = sum / samples.size();
  }
  return r;
}

}  // namespace detail

// --- structure runners ------------------------------------------------------

template <class S>
RunResult run_map(S& s, const WorkloadConfig& c, unsigned repeat_index) {
  // Prefill with uniform random keys until init_size distinct keys are in.
  std::mt19937_64 prefill(c.seed);
  for (std::uint64_t inserted = 0; inserted < c.init_size;) {
    std::uint64_t k = prefill() % c.key_range;
    if (s.insert(k, k + 1)) ++inserted;
  }
  return detail::drive(c, repeat_index,
                       [&](unsigned tid, detail::RunController& ctl, OpCounts& out) {
    OpGen gen(c.seed, tid + 1);
    while (!ctl.stop.load(std::memory_order_relaxed)) {
      auto op = gen.next(c);
      bool measured = ctl.measuring.load(std::memory_order_relaxed);
      switch (op.kind) {
        case 'i':
          s.insert(op.key, op.key + 1);
          if (measured) ++out.inserts;
          break;
        case 'r':
          s.remove(op.key);
          if (measured) ++out.removes;
          break;
        case 'q':
          if constexpr (HasRangeQuery<S>) {
            s.range_query(op.key, c.rq_size);
            if (measured) ++out.range_queries;
          }
          break;
        default:
          s.lookup(op.key);
          if (measured) ++out.lookups;
          break;
      }
    }
  });
}

// Pop-then-reinsert token workload on a queue.
template <class Q>
RunResult run_queue(Q& q, const WorkloadConfig& c, unsigned repeat_index) {
  for (std::uint64_t i = 0; i < c.init_size; ++i) q.enqueue(c.seed + i);
  return detail::drive(c, repeat_index,
                       [&](unsigned, detail::RunController& ctl, OpCounts& out) {
    while (!ctl.stop.load(std::memory_order_relaxed)) {
      bool measured = ctl.measuring.load(std::memory_order_relaxed);
      auto v = q.dequeue();
      if (measured) ++out.dequeues;
      if (v) {
        q.enqueue(*v);
        if (measured) ++out.enqueues;
      }
    }
  });
}

// --- scheme dispatch ----------------------------------------------------

template <class B>
std::string run_rc(const WorkloadConfig& c, std::vector<RunResult>& results) {
  rc::RcDomain<B>::configure(BackendConfig{c.epoch_freq, 8, 0});
  auto& d = rc::RcDomain<B>::instance();
  d.collect_all();
  std::uint64_t baseline = ledger::live_allocations();
  for (unsigned r = 0; r < c.repeat; ++r) {
    if (c.structure == "list") {
      RcHarrisList<B> s;
      results.push_back(run_map(s, c, r));
    } else if (c.structure == "hash") {
      RcMichaelHash<B> s(c.init_size);  // load factor 1
      results.push_back(run_map(s, c, r));
    } else if (c.structure == "bst") {
      RcNatarajanBst<B> s;
      results.push_back(run_map(s, c, r));
    } else {
      RcDlQueue<B> s;
      results.push_back(run_queue(s, c, r));
    }
    d.collect_all();
    std::uint64_t live = ledger::live_allocations();
    if (live != baseline) {
      std::ostringstream os;
      os << "ledger sanity failed after run " << r << ": " << live
         << " live allocations, expected " << baseline;
      return os.str();
    }
  }
  return {};
}

template <class B>
std::string run_manual(const WorkloadConfig& c, std::vector<RunResult>& results) {
  BackendConfig bcfg{c.epoch_freq, 8, 0};
  std::uint64_t baseline = ledger::live_allocations();
  for (unsigned r = 0; r < c.repeat; ++r) {
    if (c.structure == "list") {
      ManualHarrisList<B> s(bcfg);
      results.push_back(run_map(s, c, r));
    } else if (c.structure == "hash") {
      ManualMichaelHash<B> s(c.init_size, bcfg);
      results.push_back(run_map(s, c, r));
    } else if (c.structure == "bst") {
      if constexpr (std::is_same_v<B, HpBackend>) {
        return "bst/hp manual combination rejected";  // caught by validate()
      } else {
        ManualNatarajanBst<B> s(bcfg);
        results.push_back(run_map(s, c, r));
      }
    } else {
      ManualMsQueue<B> s(bcfg);
      results.push_back(run_queue(s, c, r));
    }
    std::uint64_t live = ledger::live_allocations();
    if (live != baseline) {
      std::ostringstream os;
      os << "ledger sanity failed after run " << r << ": " << live
         << " live allocations, expected " << baseline;
      return os.str();
    }
  }
  return {};
}

// Runs the whole configured workload. Returns an error message, or empty on
// success with one RunResult per repeat appended.
inline std::string run(const WorkloadConfig& cfg, std::vector<RunResult>& results) {
  WorkloadConfig c = cfg;
  if (auto err = validate(c)) return *err;
  bool rc = c.scheme.rfind("rc-", 0) == 0;
  BackendKind kind = parse_backend_name(rc ? c.scheme.substr(3) : c.scheme);
  switch (kind) {
    case BackendKind::ebr:
      return rc ? run_rc<EbrBackend>(c, results) : run_manual<EbrBackend>(c, results);
    case BackendKind::ibr:
      return rc ? run_rc<IbrBackend>(c, results) : run_manual<IbrBackend>(c, results);
    case BackendKind::hp:
      return rc ? run_rc<HpBackend>(c, results) : run_manual<HpBackend>(c, results);
  }
  return "unreachable";
}

// --- emitters ------------------------------------------------------------

inline void summary_stats(const std::vector<RunResult>& rs, double& mean,
                          double& stddev) {
  mean = 0;
  for (auto& r : rs) mean += r.throughput;
  mean /= rs.size();
  double var = 0;
  for (auto& r : rs) var += (r.throughput - mean) * (r.throughput - mean);
  stddev = rs.size() > 1 ? std::sqrt(var / (rs.size() - 1)) : 0.0;
}

inline const char* kCsvHeader =
    "structure,scheme,threads,duration_s,init_size,key_range,update_pct,"
    "rq_pct,rq_size,epoch_freq,seed,repeat_index,throughput,inserts,removes,"
    "lookups,range_queries,enqueues,dequeues,peak_live,mean_live,"
    "slow_path_snapshots,throughput_mean,throughput_stddev";

inline std::string emit_csv(const std::vector<RunResult>& rs) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  auto prefix = [&](const WorkloadConfig& c) {
    os << c.structure << ',' << c.scheme << ',' << c.threads << ',' << c.duration_s
       << ',' << c.init_size << ',' << c.key_range << ',' << c.update_pct << ','
       << c.rq_pct << ',' << c.rq_size << ',' << c.epoch_freq << ',' << c.seed << ',';
  };
  for (auto& r : rs) {
    prefix(r.cfg);
    os << r.repeat_index << ',' << r.throughput << ',' << r.ops.inserts << ','
       << r.ops.removes << ',' << r.ops.lookups << ',' << r.ops.range_queries << ','
       << r.ops.enqueues << ',' << r.ops.dequeues << ',' << r.peak_live << ','
       << r.mean_live << ',' << r.slow_path_snapshots << ",,\n";
  }
  if (rs.size() > 1) {
    double mean, stddev;
    summary_stats(rs, mean, stddev);
    prefix(rs.front().cfg);
    os << "summary,,,,,,,,,,," << mean << ',' << stddev << "\n";
  }
  return os.str();
}

inline std::string emit_json(const std::vector<RunResult>& rs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto& r : rs) {
    nlohmann::ordered_json o;
    o["structure"] = r.cfg.structure;
    o["scheme"] = r.cfg.scheme;
    o["threads"] = r.cfg.threads;
    o["duration_s"] = r.cfg.duration_s;
    o["init_size"] = r.cfg.init_size;
    o["key_range"] = r.cfg.key_range;
    o["update_pct"] = r.cfg.update_pct;
    o["rq_pct"] = r.cfg.rq_pct;
    o["rq_size"] = r.cfg.rq_size;
    o["epoch_freq"] = r.cfg.epoch_freq;
    o["seed"] = r.cfg.seed;
    o["repeat_index"] = r.repeat_index;
    o["throughput"] = r.throughput;
    o["inserts"] = r.ops.inserts;
    o["removes"] = r.ops.removes;
    o["lookups"] = r.ops.lookups;
    o["range_queries"] = r.ops.range_queries;
    o["enqueues"] = r.ops.enqueues;
    o["dequeues"] = r.ops.dequeues;
    o["peak_live"] = r.peak_live;
    o["mean_live"] = r.mean_live;
    o["slow_path_snapshots"] = r.slow_path_snapshots;
    arr.push_back(std::move(o));
  }
  if (rs.size() > 1) {
    double mean, stddev;
    summary_stats(rs, mean, stddev);
    nlohmann::ordered_json o;
    o["repeat_index"] = "summary";
    o["throughput_mean"] = mean;
    o["throughput_stddev"] = stddev;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace bench
