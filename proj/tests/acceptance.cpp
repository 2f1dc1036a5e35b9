// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all pass.
//
//   acceptance [--seed N] [--budget X]
//
// --budget scales run durations and trial counts (1.0 = full scale); the
// directional-throughput criterion additionally reports the measured
// ratios so partial hardware (fewer cores than the stated minimum) can be
// judged from the output.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bench_core.hpp"
#include "reclaim/structures/manual_bst.hpp"
#include "reclaim/structures/manual_list.hpp"
#include "reclaim/structures/manual_queue.hpp"
#include "reclaim/structures/rc_bst.hpp"
#include "reclaim/structures/rc_list.hpp"
#include "reclaim/structures/rc_queue.hpp"
#include "reclaim/verify/contract.hpp"
#include "reclaim/verify/interleave.hpp"

using namespace reclaim;
using namespace reclaim::structures;

namespace {

std::uint64_t g_seed = 1;
double g_budget = 1.0;
bool g_all_pass = true;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%d] %s %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) g_all_pass = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct LedgerSnap {
  std::uint64_t allocs, frees, poison, strong_updates;

  static LedgerSnap now() {
    auto& c = ledger::counters();
    return {c.allocs.load(), c.frees.load(), c.poison_reads.load(),
            c.strong_updates.load()};
  }
};

template <class B>
bool quiesce() {
  auto& d = rc::RcDomain<B>::instance();
  d.collect_all();
  return d.pending_total() == 0;
}

// --- [1] sticky counter interleavings --------------------------------------

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  auto rep = verify::explore_counter(3, 4, {0, 1, 2, 3});
  double dt = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "sticky counter interleavings: %llu assignments, %llu states, "
                "%llu violations, budget_exhausted=%d, %.1fs (< 300s)",
                (unsigned long long)rep.assignments, (unsigned long long)rep.states,
                (unsigned long long)(rep.linearizability_violations +
                                     rep.stickiness_violations + rep.credit_violations),
                rep.budget_exhausted ? 1 : 0, dt);
  report(1, rep.clean() && !rep.budget_exhausted && dt < 300.0, buf);
}

// --- [2] backend contract ---------------------------------------------------

template <class Backend>
int contract_schedule_failures(std::uint64_t seed, int rounds, int steps,
                               std::string& first_diag) {
  int failures = 0;
  std::mt19937_64 rng(seed);
  for (int round = 0; round < rounds; ++round) {
    BackendConfig cfg;
    cfg.epoch_freq = 1 + rng() % 3;
    cfg.hp_slots = 2;
    AcquireRetire<Backend> ar(cfg);
    verify::ContractRunner runner(ar, 3);
    std::array<std::atomic<Handle>, 4> cells{};

    struct ThreadSim {
      bool in_cs = false;
      std::vector<std::size_t> held;
      std::optional<std::size_t> plain;
    };
    std::array<ThreadSim, 3> sim;

    auto release_all = [&](std::uint32_t t) {
      for (auto a : sim[t].held) runner.release(a);
      sim[t].held.clear();
      if (sim[t].plain) {
        runner.release(*sim[t].plain);
        sim[t].plain.reset();
      }
    };

    for (int step = 0; step < steps; ++step) {
      std::uint32_t t = rng() % 3;
      auto& s = sim[t];
      if (!s.in_cs) {
        runner.begin_cs(t);
        s.in_cs = true;
        continue;
      }
      switch (rng() % 7) {
        case 0:
          release_all(t);
          runner.end_cs(t);
          s.in_cs = false;
          break;
        case 1: {
          Handle h = runner.alloc(t, rng());
          cells[rng() % cells.size()].store(h);
          break;
        }
        case 2:
          if (auto a = runner.try_acquire(t, cells[rng() % cells.size()])) {
            s.held.push_back(*a);
          }
          break;
        case 3:
          if (!s.plain) s.plain = runner.acquire(t, cells[rng() % cells.size()]);
          break;
        case 4:
          if (!s.held.empty()) {
            std::size_t i = rng() % s.held.size();
            runner.release(s.held[i]);
            s.held.erase(s.held.begin() + static_cast<std::ptrdiff_t>(i));
          } else if (s.plain) {
            runner.release(*s.plain);
            s.plain.reset();
          }
          break;
        case 5: {
          Handle h = cells[rng() % cells.size()].load();
          if (h) runner.retire(t, h);
          break;
        }
        default:
          runner.eject(t);
      }
    }

    for (std::uint32_t t = 0; t < 3; ++t) {
      if (sim[t].in_cs) {
        release_all(t);
        runner.end_cs(t);
      }
    }
    for (std::uint32_t t = 0; t < 3; ++t) runner.drain(t);

    std::string diag;
    if (!verify::check_multiplicity(runner.log(), &diag) ||
        !verify::check_definition3(runner.log(), &diag) || ar.pending_total() != 0) {
      if (diag.empty()) diag = "pending retires after quiescent drain";
      if (first_diag.empty()) first_diag = diag;
      ++failures;
    }
  }
  return failures;
}

void criterion2() {
  int rounds = std::max(10, (int)(60 * g_budget));
  std::string diag;
  int f_ebr = contract_schedule_failures<EbrBackend>(g_seed, rounds, 28, diag);
  int f_ibr = contract_schedule_failures<IbrBackend>(g_seed, rounds, 28, diag);
  int f_hp = contract_schedule_failures<HpBackend>(g_seed, rounds, 28, diag);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "backend contract: %d bounded schedules per backend, failures "
                "ebr=%d ibr=%d hp=%d%s%s",
                rounds, f_ebr, f_ibr, f_hp, diag.empty() ? "" : "; first: ",
                diag.c_str());
  report(2, f_ebr == 0 && f_ibr == 0 && f_hp == 0, buf);
}

// --- [3] leak freedom -------------------------------------------------------

template <class S>
void map_stress(S& s, int nthreads, long ops_per_thread, std::uint64_t key_range,
                std::uint64_t seed) {
  std::vector<std::thread> workers;
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(seed * 977 + t);
      for (long i = 0; i < ops_per_thread; ++i) {
        std::uint64_t k = rng() % key_range;
        switch (rng() % 4) {
          case 0:
          case 1:
            s.insert(k, k + 1);
            break;
          case 2:
            s.remove(k);
            break;
          default:
            s.lookup(k);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
}

template <class Q>
void queue_stress(Q& q, int nthreads, long ops_per_thread, std::uint64_t seed) {
  std::vector<std::thread> workers;
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(seed * 1013 + t);
      for (long i = 0; i < ops_per_thread; ++i) {
        if (rng() % 2) {
          q.enqueue(rng() | 1);
        } else {
          q.dequeue();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
}

void criterion3() {
  const long total_ops = std::max(100000L, (long)(1000000L * g_budget));
  const int nthreads = 4;
  const long per_thread = (total_ops + nthreads - 1) / nthreads;
  int failures = 0;
  std::string first;

  auto run_case = [&](const char* name, auto make_and_stress, auto drain) {
    auto before = LedgerSnap::now();
    make_and_stress();
    bool drained = drain();
    auto after = LedgerSnap::now();
    bool ok = drained && (after.allocs - before.allocs) == (after.frees - before.frees);
    if (!ok) {
      ++failures;
      if (first.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s leaked %lld allocations", name,
                      (long long)((after.allocs - before.allocs) -
                                  (after.frees - before.frees)));
        first = buf;
      }
    }
  };

  auto rc_backend_cases = [&]<class B>(const char* bn) {
    std::string n;
    n = std::string("rc-list/") + bn;
    run_case(n.c_str(),
             [&] {
               RcHarrisList<B> s;
               map_stress(s, nthreads, per_thread, 256, g_seed);
             },
             [] { return quiesce<B>(); });
    n = std::string("rc-hash/") + bn;
    run_case(n.c_str(),
             [&] {
               RcMichaelHash<B> s(512);
               map_stress(s, nthreads, per_thread, 2048, g_seed + 1);
             },
             [] { return quiesce<B>(); });
    n = std::string("rc-bst/") + bn;
    run_case(n.c_str(),
             [&] {
               RcNatarajanBst<B> s;
               map_stress(s, nthreads, per_thread, 4096, g_seed + 2);
             },
             [] { return quiesce<B>(); });
    n = std::string("rc-dlqueue/") + bn;
    run_case(n.c_str(),
             [&] {
               RcDlQueue<B> s;
               queue_stress(s, nthreads, per_thread, g_seed + 3);
             },
             [] { return quiesce<B>(); });
  };
  rc_backend_cases.template operator()<EbrBackend>("ebr");
  rc_backend_cases.template operator()<IbrBackend>("ibr");
  rc_backend_cases.template operator()<HpBackend>("hp");

  auto manual_backend_cases = [&]<class B, bool WithBst>(const char* bn) {
    std::string n;
    n = std::string("manual-list/") + bn;
    run_case(n.c_str(),
             [&] {
               ManualHarrisList<B> s;
               map_stress(s, nthreads, per_thread, 256, g_seed + 4);
             },
             [] { return true; });
    n = std::string("manual-hash/") + bn;
    run_case(n.c_str(),
             [&] {
               ManualMichaelHash<B> s(512);
               map_stress(s, nthreads, per_thread, 2048, g_seed + 5);
             },
             [] { return true; });
    if constexpr (WithBst) {
      n = std::string("manual-bst/") + bn;
      run_case(n.c_str(),
               [&] {
                 ManualNatarajanBst<B> s;
                 map_stress(s, nthreads, per_thread, 4096, g_seed + 6);
               },
               [] { return true; });
    }
    n = std::string("manual-queue/") + bn;
    run_case(n.c_str(),
             [&] {
               ManualMsQueue<B> s;
               queue_stress(s, nthreads, per_thread, g_seed + 7);
             },
             [] { return true; });
  };
  manual_backend_cases.template operator()<EbrBackend, true>("ebr");
  manual_backend_cases.template operator()<IbrBackend, true>("ibr");
  manual_backend_cases.template operator()<HpBackend, false>("hp");

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "leak freedom: 23 structure/scheme stress runs of %ld ops each, "
                "%d leaked%s%s",
                total_ops, failures, first.empty() ? "" : "; first: ", first.c_str());
  report(3, failures == 0, buf);
}

// --- [4] memory safety ------------------------------------------------------

void criterion4() {
  const double dur = std::max(2.0, 10.0 * g_budget);
  auto before = LedgerSnap::now();
  std::string err_all;
  const char* schemes[] = {"ebr", "ibr", "hp", "rc-ebr", "rc-ibr", "rc-hp"};
  for (const char* sch : schemes) {
    bench::WorkloadConfig c;
    c.structure = "hash";
    c.scheme = sch;
    c.threads = 8;
    c.duration_s = dur;
    c.init_size = 1000;
    c.update_pct = 30;
    c.seed = g_seed;
    std::vector<bench::RunResult> rs;
    auto err = bench::run(c, rs);
    if (!err.empty() && err_all.empty()) err_all = std::string(sch) + ": " + err;
  }
  auto after = LedgerSnap::now();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "memory safety: 6 schemes x 8 threads x %.0fs stress, poison "
                "reads=%llu%s%s",
                dur, (unsigned long long)(after.poison - before.poison),
                err_all.empty() ? "" : ", run error: ", err_all.c_str());
  report(4, after.poison == before.poison && err_all.empty(), buf);
}

// --- [5] weak-count rule ----------------------------------------------------

template <class B>
int weak_rule_violations(long ops_per_phase) {
  int violations = 0;
  RcDlQueue<B> q;
  auto& d = rc::RcDomain<B>::instance();
  std::mt19937_64 top(g_seed + 17);
  for (int phase = 0; phase < 3; ++phase) {
    std::vector<std::thread> workers;
    for (int t = 0; t < 8; ++t) {
      workers.emplace_back([&, t] {
        std::mt19937_64 rng(top() + t);
        for (long i = 0; i < ops_per_phase; ++i) {
          if (rng() % 3) {
            q.enqueue(rng() | 1);
          } else {
            q.dequeue();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    d.collect_all();
    auto nodes = q.quiescent_nodes();
    std::size_t stride = std::max<std::size_t>(1, nodes.size() / 100);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < nodes.size() && checked < 100; i += stride, ++checked) {
      Handle h = nodes[i];
      std::uint64_t weak_cells = 0;
      using Node = typename RcDlQueue<B>::Node;
      for (Handle n : nodes) {
        if (n.template as<Node>()->prev.peek().canonical() == h) ++weak_cells;
      }
      std::uint64_t strong = header_of(h).strong.load();
      std::uint64_t want = weak_cells + (strong > 0 ? 1 : 0) + d.pending_weak(h);
      if (header_of(h).weak.load() != want) ++violations;
    }
  }
  return violations;
}

void criterion5() {
  long ops = std::max(2000L, (long)(50000L * g_budget));
  int v = weak_rule_violations<EbrBackend>(ops) + weak_rule_violations<IbrBackend>(ops) +
          weak_rule_violations<HpBackend>(ops);
  quiesce<EbrBackend>();
  quiesce<IbrBackend>();
  quiesce<HpBackend>();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "weak-count rule: dlqueue stress, 3 backends x 3 quiescent points "
                "x 100 sampled nodes, violations=%d",
                v);
  report(5, v == 0, buf);
}

// --- [6] get_snapshot null-correctness --------------------------------------

template <class B>
long replacement_race_nulls(long trials) {
  struct Obj {
    std::uint64_t value;
    explicit Obj(std::uint64_t v) : value(v) {}
  };
  long nulls = 0;
  rc::atomic_shared_ptr<Obj, B> cell;
  {
    rc::CriticalGuard<B> cs;
    cell.store(rc::make_shared<Obj, B>(1));
  }
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    std::mt19937_64 rng(g_seed + 23);
    std::uint64_t v = 2;
    while (!stop.load(std::memory_order_relaxed)) {
      // Replace the live object; the old one expires mid-stream.
      auto p = rc::make_shared<Obj, B>(v++ | 1);
      rc::CriticalGuard<B> cs;
      cell.store(std::move(p));
      if ((rng() & 0xF) == 0) std::this_thread::yield();
    }
  });
  {
    std::mt19937_64 rng(g_seed + 29);
    std::array<rc::atomic_shared_ptr<Obj, B>, 1> dummy{};
    for (long i = 0; i < trials; ++i) {
      rc::CriticalGuard<B> cs;
      // Half of the trials run with the announcement slots exhausted so
      // the slow path (counter-based snapshot) is exercised on hp.
      std::vector<rc::snapshot_ptr<Obj, B>> hog;
      if (rng() % 2) {
        for (int k = 0; k < 12; ++k) hog.push_back(dummy[0].get_snapshot());
      }
      auto s = cell.get_snapshot();
      if (!s || s->value == 0) ++nulls;
    }
  }
  stop.store(true);
  writer.join();
  return nulls;
}

void criterion6() {
  long trials = std::max(2000L, (long)(10000L * g_budget));
  long n = replacement_race_nulls<EbrBackend>(trials) +
           replacement_race_nulls<IbrBackend>(trials) +
           replacement_race_nulls<HpBackend>(trials);
  bool drained = quiesce<EbrBackend>() && quiesce<IbrBackend>() && quiesce<HpBackend>();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "snapshot null-correctness: replacement race, %ld trials x 3 "
                "backends, null snapshots=%ld",
                trials, n);
  report(6, n == 0 && drained, buf);
}

// --- [7] directional throughput --------------------------------------------

std::optional<double> bench_mean(const char* structure, const char* scheme,
                                 unsigned update_pct, unsigned rq_pct, double dur,
                                 unsigned repeat, std::string& err_out) {
  bench::WorkloadConfig c;
  c.structure = structure;
  c.scheme = scheme;
  c.threads = 4;
  c.duration_s = dur;
  c.init_size = 1000;
  c.update_pct = update_pct;
  c.rq_pct = rq_pct;
  c.seed = g_seed;
  c.repeat = repeat;
  std::vector<bench::RunResult> rs;
  auto err = bench::run(c, rs);
  if (!err.empty()) {
    err_out = err;
    return std::nullopt;
  }
  double mean, stddev;
  bench::summary_stats(rs, mean, stddev);
  return mean;
}

void criterion7() {
  const double dur = std::max(2.0, 30.0 * g_budget);
  const unsigned repeat = g_budget >= 1.0 ? 5u : 2u;
  const unsigned cores = std::thread::hardware_concurrency();
  std::string err;

  auto ra = bench_mean("hash", "rc-ebr", 10, 0, dur, repeat, err);
  auto ma = bench_mean("hash", "ebr", 10, 0, dur, repeat, err);
  auto rb = bench_mean("bst", "rc-ebr", 50, 50, dur, repeat, err);
  auto hb = bench_mean("bst", "rc-hp", 50, 50, dur, repeat, err);
  auto rc_ = bench_mean("bst", "rc-ibr", 1, 0, dur, repeat, err);
  auto mc = bench_mean("bst", "ibr", 1, 0, dur, repeat, err);

  if (!err.empty() || !ra || !ma || !rb || !hb || !rc_ || !mc) {
    report(7, false, "directional throughput: benchmark error: " + err);
    return;
  }
  double a = *ra / *ma, b = *rb / *hb, c = *rc_ / *mc;
  bool pass_a = a >= 0.5;
  bool pass_b = b >= 1.5;
  bool pass_c = c >= 0.5 && c <= 1.0;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "directional throughput (%u hw threads, %.0fs x %u repeats, 4 "
                "worker threads): (a) rc-ebr/ebr hash 10%%upd = %.2f (>= 0.5: %s); "
                "(b) rc-ebr/rc-hp bst rq = %.2f (>= 1.5: %s); (c) rc-ibr/ibr bst "
                "1%%upd = %.2f (in [0.5,1.0]: %s)",
                cores, dur, repeat, a, pass_a ? "yes" : "no", b, pass_b ? "yes" : "no",
                c, pass_c ? "yes" : "no");
  report(7, pass_a && pass_b && pass_c, buf);
}

// --- [8] oracle equivalence -------------------------------------------------

template <class S>
long map_oracle_mismatches(S& s, std::uint64_t key_range, long ops, std::uint64_t seed) {
  long bad = 0;
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, std::uint64_t> oracle;
  for (long i = 0; i < ops; ++i) {
    std::uint64_t k = rng() % key_range;
    switch (rng() % 3) {
      case 0: {
        std::uint64_t v = rng();
        if (s.insert(k, v) != oracle.emplace(k, v).second) ++bad;
        break;
      }
      case 1:
        if (s.remove(k) != (oracle.erase(k) > 0)) ++bad;
        break;
      default: {
        auto got = s.lookup(k);
        auto it = oracle.find(k);
        if (got.has_value() != (it != oracle.end())) ++bad;
        else if (got && *got != it->second) ++bad;
      }
    }
  }
  for (std::uint64_t k = 0; k < key_range; ++k) {
    auto got = s.lookup(k);
    auto it = oracle.find(k);
    if (got.has_value() != (it != oracle.end())) ++bad;
    else if (got && *got != it->second) ++bad;
  }
  return bad;
}

template <class Q>
long queue_oracle_mismatches(Q& q, long ops, std::uint64_t seed) {
  long bad = 0;
  std::mt19937_64 rng(seed);
  std::deque<std::uint64_t> oracle;
  for (long i = 0; i < ops; ++i) {
    if (rng() % 2) {
      std::uint64_t v = rng() | 1;
      q.enqueue(v);
      oracle.push_back(v);
    } else {
      auto got = q.dequeue();
      if (oracle.empty()) {
        if (got) ++bad;
      } else {
        if (!got || *got != oracle.front()) ++bad;
        oracle.pop_front();
      }
    }
  }
  while (!oracle.empty()) {
    auto got = q.dequeue();
    if (!got || *got != oracle.front()) ++bad;
    oracle.pop_front();
  }
  if (q.dequeue()) ++bad;
  return bad;
}

void criterion8() {
  const long ops = std::max(10000L, (long)(100000L * g_budget));
  long bad = 0;
  {
    RcHarrisList<EbrBackend> s;
    bad += map_oracle_mismatches(s, 128, ops, g_seed + 41);
  }
  {
    RcHarrisList<HpBackend> s;
    bad += map_oracle_mismatches(s, 128, ops, g_seed + 42);
  }
  {
    RcMichaelHash<IbrBackend> s(256);
    bad += map_oracle_mismatches(s, 1024, ops, g_seed + 43);
  }
  {
    RcNatarajanBst<EbrBackend> s;
    bad += map_oracle_mismatches(s, 1024, ops, g_seed + 44);
  }
  {
    RcNatarajanBst<HpBackend> s;
    bad += map_oracle_mismatches(s, 1024, ops, g_seed + 45);
  }
  {
    RcDlQueue<EbrBackend> q;
    bad += queue_oracle_mismatches(q, ops, g_seed + 46);
  }
  {
    RcDlQueue<HpBackend> q;
    bad += queue_oracle_mismatches(q, ops, g_seed + 47);
  }
  {
    ManualHarrisList<EbrBackend> s;
    bad += map_oracle_mismatches(s, 128, ops, g_seed + 48);
  }
  {
    ManualMichaelHash<HpBackend> s(256);
    bad += map_oracle_mismatches(s, 1024, ops, g_seed + 49);
  }
  {
    ManualNatarajanBst<IbrBackend> s;
    bad += map_oracle_mismatches(s, 1024, ops, g_seed + 50);
  }
  {
    ManualMsQueue<IbrBackend> q;
    bad += queue_oracle_mismatches(q, ops, g_seed + 51);
  }
  quiesce<EbrBackend>();
  quiesce<IbrBackend>();
  quiesce<HpBackend>();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "oracle equivalence: 11 structure variants x %ld randomized ops vs "
                "sequential oracle, mismatches=%ld",
                ops, bad);
  report(8, bad == 0, buf);
}

// --- [9] snapshot fast path -------------------------------------------------

template <class B>
std::uint64_t readonly_strong_updates(long lookups) {
  RcNatarajanBst<B> s;
  std::mt19937_64 rng(g_seed + 61);
  for (int i = 0; i < 1000; ++i) s.insert(rng() % 4096, i);
  quiesce<B>();
  auto before = LedgerSnap::now();
  for (long i = 0; i < lookups; ++i) s.lookup(rng() % 4096);
  auto after = LedgerSnap::now();
  return after.strong_updates - before.strong_updates;
}

void criterion9() {
  const long lookups = std::max(10000L, (long)(100000L * g_budget));
  std::uint64_t e = readonly_strong_updates<EbrBackend>(lookups);
  std::uint64_t i = readonly_strong_updates<IbrBackend>(lookups);
  quiesce<EbrBackend>();
  quiesce<IbrBackend>();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "snapshot fast path: %ld read-only bst lookups, strong-count "
                "updates ebr=%llu ibr=%llu (want exactly 0)",
                lookups, (unsigned long long)e, (unsigned long long)i);
  report(9, e == 0 && i == 0, buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  app.add_option("--seed", g_seed, "base rng seed")->capture_default_str();
  app.add_option("--budget", g_budget, "scale factor for durations and trial counts")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();

  std::printf("%s\n", g_all_pass ? "ALL PASS" : "FAILURES PRESENT");
  return g_all_pass ? 0 : 1;
}
