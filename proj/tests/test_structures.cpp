#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include "reclaim/structures/manual_bst.hpp"
#include "reclaim/structures/manual_list.hpp"
#include "reclaim/structures/manual_queue.hpp"
#include "reclaim/structures/rc_bst.hpp"
#include "reclaim/structures/rc_list.hpp"
#include "reclaim/structures/rc_queue.hpp"

using namespace reclaim;
using namespace reclaim::structures;

namespace {

struct LedgerSnap {
  std::uint64_t allocs, frees, poison, slow_snaps;

  static LedgerSnap now() {
    auto& c = ledger::counters();
    return {c.allocs.load(), c.frees.load(), c.poison_reads.load(),
            c.slow_path_snapshots.load()};
  }
};

template <class B>
void quiesce() {
  auto& d = rc::RcDomain<B>::instance();
  d.collect_all();
  REQUIRE(d.pending_total() == 0);
}

// Randomized single-threaded run of a map-like structure against std::map,
// comparing every returned value, then a full sweep of the key range.
template <class S>
void map_oracle(S& s, std::uint64_t key_range, int ops, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, std::uint64_t> oracle;
  for (int i = 0; i < ops; ++i) {
    std::uint64_t k = rng() % key_range;
    switch (rng() % 3) {
      case 0: {
        std::uint64_t v = rng();
        bool got = s.insert(k, v);
        bool want = oracle.emplace(k, v).second;
        REQUIRE(got == want);
        break;
      }
      case 1: {
        bool got = s.remove(k);
        bool want = oracle.erase(k) > 0;
        REQUIRE(got == want);
        break;
      }
      default: {
        auto got = s.lookup(k);
        auto it = oracle.find(k);
        REQUIRE(got.has_value() == (it != oracle.end()));
        if (got) REQUIRE(*got == it->second);
        break;
      }
    }
  }
  for (std::uint64_t k = 0; k < key_range; ++k) {
    auto got = s.lookup(k);
    auto it = oracle.find(k);
    REQUIRE(got.has_value() == (it != oracle.end()));
    if (got) REQUIRE(*got == it->second);
  }
}

// Multi-threaded mixed workload; doctest assertions are kept out of the
// worker threads, which instead count violations.
template <class S>
void concurrent_map_smoke(S& s, int nthreads, int ops_per_thread,
                          std::uint64_t key_range) {
  std::atomic<std::int64_t> net{0};
  std::atomic<std::uint64_t> bad_values{0};
  auto poison_before = ledger::counters().poison_reads.load();
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(0x5eedULL * (t + 1));
      std::int64_t local = 0;
      for (int i = 0; i < ops_per_thread; ++i) {
        std::uint64_t k = rng() % key_range;
        switch (rng() % 4) {
          case 0:
          case 1:
            if (s.insert(k, k * 3 + 1)) ++local;
            break;
          case 2:
            if (s.remove(k)) --local;
            break;
          default: {
            auto v = s.lookup(k);
            if (v && *v != k * 3 + 1) bad_values.fetch_add(1);
            break;
          }
        }
      }
      net.fetch_add(local);
    });
  }
  for (auto& w : workers) w.join();
  CHECK(bad_values.load() == 0);
  CHECK(ledger::counters().poison_reads.load() == poison_before);
  // Conservation: successful inserts minus removes equal the final size.
  std::int64_t present = 0;
  for (std::uint64_t k = 0; k < key_range; ++k) {
    if (s.lookup(k)) ++present;
  }
  CHECK(present == net.load());
}

template <class Q>
void queue_oracle(Q& q, int ops, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::deque<std::uint64_t> oracle;
  for (int i = 0; i < ops; ++i) {
    if (rng() % 2) {
      std::uint64_t v = rng() | 1;  // nonzero, distinguishable
      q.enqueue(v);
      oracle.push_back(v);
    } else {
      auto got = q.dequeue();
      if (oracle.empty()) {
        REQUIRE(!got);
      } else {
        REQUIRE(got.has_value());
        REQUIRE(*got == oracle.front());
        oracle.pop_front();
      }
    }
  }
  while (!oracle.empty()) {
    auto got = q.dequeue();
    REQUIRE(got.has_value());
    REQUIRE(*got == oracle.front());
    oracle.pop_front();
  }
  REQUIRE(!q.dequeue());
}

// Pop-then-reinsert token conservation across threads.
template <class Q>
void queue_conservation(Q& q, int nthreads, int ops_per_thread, int ntokens) {
  for (int i = 0; i < ntokens; ++i) q.enqueue(1000 + i);
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&] {
      for (int i = 0; i < ops_per_thread; ++i) {
        auto v = q.dequeue();
        if (v) q.enqueue(*v);
      }
    });
  }
  for (auto& w : workers) w.join();
  std::vector<bool> seen(ntokens, false);
  int drained = 0;
  while (auto v = q.dequeue()) {
    REQUIRE(*v >= 1000);
    REQUIRE(*v < 1000 + static_cast<std::uint64_t>(ntokens));
    REQUIRE(!seen[*v - 1000]);
    seen[*v - 1000] = true;
    ++drained;
  }
  CHECK(drained == ntokens);
}

}  // namespace

// --- rc variants ----------------------------------------------------------

TEST_CASE_TEMPLATE("rc list matches the map oracle and drains the ledger", B,
                   EbrBackend, IbrBackend, HpBackend) {
  quiesce<B>();
  auto before = LedgerSnap::now();
  {
    RcHarrisList<B> list;
    map_oracle(list, 128, 3000, 1);
  }
  quiesce<B>();
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("rc hash matches the map oracle and drains the ledger", B,
                   EbrBackend, IbrBackend, HpBackend) {
  quiesce<B>();
  auto before = LedgerSnap::now();
  {
    RcMichaelHash<B> hash(64);
    map_oracle(hash, 512, 3000, 2);
  }
  quiesce<B>();
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("rc bst matches the map oracle and drains the ledger", B,
                   EbrBackend, IbrBackend, HpBackend) {
  quiesce<B>();
  auto before = LedgerSnap::now();
  {
    RcNatarajanBst<B> bst;
    map_oracle(bst, 128, 3000, 3);
  }
  quiesce<B>();
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("rc bst range_query matches the oracle at quiescence", B,
                   EbrBackend, IbrBackend, HpBackend) {
  RcNatarajanBst<B> bst;
  std::map<std::uint64_t, std::uint64_t> oracle;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 400; ++i) {
    std::uint64_t k = rng() % 1000;
    bst.insert(k, k + 7);
    oracle.emplace(k, k + 7);
  }
  CHECK(bst.range_query(2000, 50).empty());
  for (std::uint64_t lo = 0; lo < 1000; lo += 37) {
    auto got = bst.range_query(lo, 64);
    std::vector<std::uint64_t> want;
    for (auto it = oracle.lower_bound(lo); it != oracle.end() && it->first < lo + 64;
         ++it) {
      want.push_back(it->second);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    REQUIRE(got == want);
  }
  quiesce<B>();
}

TEST_CASE("rc bst range_query under hp spills to slow-path snapshots") {
  using B = HpBackend;
  RcNatarajanBst<B> bst;
  // Descending inserts grow a left spine; the DFS stack then holds one
  // pending snapshot per level, exhausting the K announcement slots.
  for (std::uint64_t k = 64; k-- > 0;) bst.insert(k, k);
  auto before = LedgerSnap::now();
  auto got = bst.range_query(0, 64);
  CHECK(got.size() == 64);
  CHECK(LedgerSnap::now().slow_snaps > before.slow_snaps);
  quiesce<B>();
}

TEST_CASE_TEMPLATE("read-only rc bst lookups perform zero strong-count updates", B,
                   EbrBackend, IbrBackend) {
  RcNatarajanBst<B> bst;
  for (std::uint64_t k = 0; k < 200; ++k) bst.insert(k * 2, k);
  auto before = ledger::counters().strong_updates.load();
  for (std::uint64_t k = 0; k < 400; ++k) {
    auto v = bst.lookup(k);
    CHECK(v.has_value() == (k % 2 == 0));
  }
  CHECK(ledger::counters().strong_updates.load() == before);
  quiesce<B>();
}

TEST_CASE_TEMPLATE("rc dlqueue is FIFO against the deque oracle", B, EbrBackend,
                   IbrBackend, HpBackend) {
  quiesce<B>();
  auto before = LedgerSnap::now();
  {
    RcDlQueue<B> q;
    queue_oracle(q, 3000, 5);
  }
  quiesce<B>();
  auto after = LedgerSnap::now();
  // Weak back-links must not keep dequeued nodes alive: the ledger drains
  // to baseline despite every node holding a prev reference.
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("rc structures survive a concurrent mixed workload", B,
                   EbrBackend, IbrBackend, HpBackend) {
  {
    RcMichaelHash<B> hash(32);
    concurrent_map_smoke(hash, 4, 2000, 64);
  }
  {
    RcNatarajanBst<B> bst;
    concurrent_map_smoke(bst, 4, 2000, 64);
  }
  quiesce<B>();
}

TEST_CASE_TEMPLATE("rc dlqueue conserves tokens under pop-reinsert", B, EbrBackend,
                   IbrBackend, HpBackend) {
  {
    RcDlQueue<B> q;
    queue_conservation(q, 4, 2000, 16);
  }
  quiesce<B>();
  CHECK(ledger::counters().poison_reads.load() == 0);
}

// Quiescent weak-count rule on the dlqueue: for every node still linked,
//   weak == #weak cells pointing at it + (strong > 0 ? 1 : 0) + pending weak
// (no weak_ptr objects exist here, and each node's strong count carries the
// +1 the paper assigns to any object with strong > 0).
TEST_CASE_TEMPLATE("rc dlqueue satisfies the weak-count rule at quiescence", B,
                   EbrBackend, IbrBackend, HpBackend) {
  {
    RcDlQueue<B> q;
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
      if (rng() % 3) {
        q.enqueue(rng() | 1);
      } else {
        q.dequeue();
      }
    }
    auto& d = rc::RcDomain<B>::instance();
    d.collect_all();
    auto nodes = q.quiescent_nodes();
    REQUIRE(!nodes.empty());
    for (Handle h : nodes) {
      std::uint64_t weak_cells = 0;
      for (Handle n : nodes) {
        using Node = typename RcDlQueue<B>::Node;
        if (n.template as<Node>()->prev.peek().canonical() == h) ++weak_cells;
      }
      std::uint64_t strong = header_of(h).strong.load();
      std::uint64_t want = weak_cells + (strong > 0 ? 1 : 0) + d.pending_weak(h);
      REQUIRE(header_of(h).weak.load() == want);
    }
  }
  quiesce<B>();
}

// --- manual variants ------------------------------------------------------

TEST_CASE_TEMPLATE("manual list matches the map oracle and frees everything", B,
                   EbrBackend, IbrBackend, HpBackend) {
  auto before = LedgerSnap::now();
  {
    ManualHarrisList<B> list;
    map_oracle(list, 128, 3000, 11);
  }
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("manual hash matches the map oracle and frees everything", B,
                   EbrBackend, IbrBackend, HpBackend) {
  auto before = LedgerSnap::now();
  {
    ManualMichaelHash<B> hash(64);
    map_oracle(hash, 512, 3000, 12);
  }
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("manual bst matches the map oracle and frees everything", B,
                   EbrBackend, IbrBackend) {
  auto before = LedgerSnap::now();
  {
    ManualNatarajanBst<B> bst;
    map_oracle(bst, 128, 3000, 13);
    auto rq = bst.range_query(0, 128);
    std::uint64_t present = 0;
    for (std::uint64_t k = 0; k < 128; ++k) present += bst.lookup(k).has_value();
    CHECK(rq.size() == present);
  }
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("manual queue is FIFO against the deque oracle", B, EbrBackend,
                   IbrBackend, HpBackend) {
  auto before = LedgerSnap::now();
  {
    ManualMsQueue<B> q;
    queue_oracle(q, 3000, 15);
  }
  auto after = LedgerSnap::now();
  CHECK(after.allocs - before.allocs == after.frees - before.frees);
  CHECK(after.poison == before.poison);
}

TEST_CASE_TEMPLATE("manual structures survive a concurrent mixed workload", B,
                   EbrBackend, IbrBackend, HpBackend) {
  {
    ManualMichaelHash<B> hash(32);
    concurrent_map_smoke(hash, 4, 2000, 64);
  }
  {
    ManualMsQueue<B> q;
    queue_conservation(q, 4, 2000, 16);
  }
  CHECK(ledger::counters().poison_reads.load() == 0);
}

TEST_CASE_TEMPLATE("manual bst survives a concurrent mixed workload", B, EbrBackend,
                   IbrBackend) {
  {
    ManualNatarajanBst<B> bst;
    concurrent_map_smoke(bst, 4, 2000, 64);
  }
  CHECK(ledger::counters().poison_reads.load() == 0);
}
