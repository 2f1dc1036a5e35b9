#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reclaim/assert.hpp"
#include "reclaim/backends/config.hpp"
#include "reclaim/thread_registry.hpp"

// Hazard-slot backend. Each thread owns K+1 announcement slots per
// acquire-retire instance: slot 0 is reserved for the (single) plain
// acquire, slots 1..K serve try_acquire and can run out, in which case
// try_acquire fails. Critical sections are no-ops. A retired entry is
// withheld from eject while a slot announces its handle; with retire
// multiplicity m and s announcing slots, up to m - s entries per scan are
// ejectable.

namespace reclaim {

class HpBackend {
 public:
  static constexpr std::uintptr_t kFreeSlot = ~std::uintptr_t{0};

  // Shared part: only the critical-section debug state. Announcement slots
  // are per instance so that e.g. a dispose-instance guard never delays
  // weak-instance ejects.
  class Clock {
   public:
    explicit Clock(const BackendConfig&) : threads_(ThreadRegistry::max_threads()) {}

    void begin_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(!t.in_cs, "nested begin_critical_section");
      t.in_cs = true;
    }

    void end_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(t.in_cs, "end_critical_section without begin");
      t.in_cs = false;
    }

    bool in_critical_section() const {
      return threads_[ThreadRegistry::current_id()].in_cs;
    }

    std::uint64_t on_alloc() { return 0; }
    std::uint64_t current_epoch() const { return 0; }

   private:
    struct alignas(64) PerThread {
      bool in_cs = false;
    };
    std::vector<PerThread> threads_;
  };

  HpBackend(std::shared_ptr<Clock> clock, const BackendConfig& cfg)
      : clock_(std::move(clock)),
        num_slots_(cfg.hp_slots + 1),
        scan_threshold_(cfg.scan_threshold),
        slots_(std::make_unique<std::atomic<std::uintptr_t>[]>(
            static_cast<std::size_t>(ThreadRegistry::max_threads()) * num_slots_)) {
    const std::size_t n = static_cast<std::size_t>(ThreadRegistry::max_threads()) * num_slots_;
    for (std::size_t i = 0; i < n; ++i) slots_[i].store(kFreeSlot, std::memory_order_relaxed);
  }

  Clock& clock() { return *clock_; }

  std::uint64_t on_alloc() { return clock_->on_alloc(); }
  std::uint64_t retire_stamp() const { return 0; }

  // Announce-validate loop on the reserved slot; always succeeds.
  std::pair<Handle, Guard> acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "acquire outside critical section");
    auto* slot = slot_ptr(ThreadRegistry::current_id(), 0);
    RECLAIM_ASSERT(slot->load(std::memory_order_relaxed) == kFreeSlot,
                   "acquire while previous acquire still active");
    Handle h = src.load();
    while (true) {
      __builtin_prefetch(reinterpret_cast<const void*>(h.canonical().bits));
      slot->store(h.canonical().bits);
      Handle h2 = src.load();
      if (h2 == h) return {h, Guard{0, Guard::Kind::plain}};
      h = h2;
    }
  }

  std::optional<std::pair<Handle, Guard>> try_acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "try_acquire outside critical section");
    const std::uint32_t tid = ThreadRegistry::current_id();
    std::uint32_t idx = find_free_slot(tid);
    if (idx == 0) return std::nullopt;
    auto* slot = slot_ptr(tid, idx);
    Handle h = src.load();
    while (true) {
      __builtin_prefetch(reinterpret_cast<const void*>(h.canonical().bits));
      slot->store(h.canonical().bits);
      Handle h2 = src.load();
      if (h2 == h) return {{h, Guard{idx, Guard::Kind::multi}}};
      h = h2;
    }
  }

  // Directly announces an already-loaded handle value in a free slot, with
  // no validation loop (the caller revalidates through other means, e.g.
  // an expiry check ordered after the announcement).
  std::optional<Guard> try_protect(Handle h) {
    const std::uint32_t tid = ThreadRegistry::current_id();
    std::uint32_t idx = find_free_slot(tid);
    if (idx == 0) return std::nullopt;
    slot_ptr(tid, idx)->store(h.canonical().bits);
    return Guard{idx, Guard::Kind::multi};
  }

  void release(Guard& g) {
    RECLAIM_ASSERT(g.engaged, "double release of guard");
    g.engaged = false;
    slot_ptr(ThreadRegistry::current_id(), g.slot)->store(kFreeSlot);
  }

  bool scan_due(const PendingList& pending) const {
    std::uint32_t threshold = scan_threshold_;
    if (threshold == 0) threshold = 2 * ThreadRegistry::high_water() * num_slots_;
    return pending.size() > threshold;
  }

  void scan(PendingList& pending, std::vector<Handle>& out) {
    // Snapshot every announcement of this instance, then walk the list in
    // FIFO order retaining one entry per announcing slot of each handle.
    std::unordered_map<std::uintptr_t, std::uint32_t> announced;
    const std::uint32_t hw = ThreadRegistry::high_water();
    for (std::uint32_t tid = 0; tid < hw; ++tid) {
      for (std::uint32_t i = 0; i < num_slots_; ++i) {
        std::uintptr_t v = slot_ptr(tid, i)->load();
        if (v != kFreeSlot && v != 0) ++announced[v];
      }
    }
    PendingList kept;
    for (auto& e : pending) {
      auto it = announced.find(e.handle.canonical().bits);
      if (it != announced.end() && it->second > 0) {
        --it->second;
        kept.push_back(e);
      } else {
        out.push_back(e.handle);
      }
    }
    pending.swap(kept);
  }

 private:
  std::atomic<std::uintptr_t>* slot_ptr(std::uint32_t tid, std::uint32_t idx) {
    return &slots_[static_cast<std::size_t>(tid) * num_slots_ + idx];
  }

  // Returns a free slot index in [1, K], or 0 if none.
  std::uint32_t find_free_slot(std::uint32_t tid) {
    for (std::uint32_t i = 1; i < num_slots_; ++i) {
      if (slot_ptr(tid, i)->load(std::memory_order_relaxed) == kFreeSlot) return i;
    }
    return 0;
  }

  std::shared_ptr<Clock> clock_;
  std::uint32_t num_slots_;
  std::uint32_t scan_threshold_;
  std::unique_ptr<std::atomic<std::uintptr_t>[]> slots_;
};

}  // namespace reclaim
