#pragma once

#include <atomic>
#include <cstdint>

#include "reclaim/assert.hpp"
#include "reclaim/handle.hpp"

// Global allocation/dispose/free accounting plus a poison canary, used by
// the leak-freedom and memory-safety checks. Counters are always compiled
// in (relaxed atomics); the poison-read *abort* is gated on debug asserts,
// but the violation counter is always maintained.

namespace reclaim::ledger {

struct Counters {
  std::atomic<std::uint64_t> allocs{0};
  std::atomic<std::uint64_t> disposes{0};
  std::atomic<std::uint64_t> frees{0};
  std::atomic<std::uint64_t> live_bytes{0};
  std::atomic<std::uint64_t> poison_reads{0};
  // Strong reference-count traffic (increments + decrements) performed by
  // the rc layer; snapshot fast paths must leave this untouched.
  std::atomic<std::uint64_t> strong_updates{0};
  // get_snapshot slow-path entries (try_acquire failed, counter bumped).
  std::atomic<std::uint64_t> slow_path_snapshots{0};
};

inline Counters& counters() {
  static Counters c;
  return c;
}

inline void on_alloc(std::size_t bytes) {
  counters().allocs.fetch_add(1, std::memory_order_relaxed);
  counters().live_bytes.fetch_add(bytes, std::memory_order_relaxed);
}

inline void on_dispose() { counters().disposes.fetch_add(1, std::memory_order_relaxed); }

inline void on_free(std::size_t bytes) {
  counters().frees.fetch_add(1, std::memory_order_relaxed);
  counters().live_bytes.fetch_sub(bytes, std::memory_order_relaxed);
}

inline std::uint64_t live_allocations() {
  return counters().allocs.load(std::memory_order_relaxed) -
         counters().frees.load(std::memory_order_relaxed);
}

inline std::uint64_t live_bytes() {
  return counters().live_bytes.load(std::memory_order_relaxed);
}

// Odd constant stamped over the payload's first word at dispose.
inline constexpr std::uint64_t kPoisonWord = 0xDEADDEADDEADDEADull | 1ull;

inline void stamp_poison(Handle h) {
  *h.as<std::uint64_t>() = kPoisonWord;
}

// Canary check performed on payload access paths. Counts the violation
// unconditionally and aborts under debug asserts.
inline void check_not_poisoned(Handle h) {
  if (*h.as<volatile std::uint64_t>() == kPoisonWord) {
    counters().poison_reads.fetch_add(1, std::memory_order_relaxed);
    RECLAIM_ASSERT(false, "payload read after dispose (poison canary)");
  }
}

}  // namespace reclaim::ledger
