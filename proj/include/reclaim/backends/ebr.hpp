#pragma once

#include <atomic>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "reclaim/assert.hpp"
#include "reclaim/backends/config.hpp"
#include "reclaim/thread_registry.hpp"

// Epoch-based reclamation backend. Critical sections announce the current
// global epoch; a retired entry with stamp r is ejectable once every
// announcement is either empty or greater than r. acquire/try_acquire are
// plain loads and release is a no-op: the critical section alone protects
// everything retired during it.

namespace reclaim {

class EbrBackend {
 public:
  static constexpr std::uint64_t kEmptyAnn = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint32_t kDefaultEpochFreq = 10;

  // Shared clock: global epoch plus per-thread announcements. One clock may
  // back several acquire-retire instances so that a single critical section
  // covers all of them.
  class Clock {
   public:
    explicit Clock(const BackendConfig& cfg)
        : epoch_freq_(cfg.epoch_freq ? cfg.epoch_freq : kDefaultEpochFreq),
          threads_(ThreadRegistry::max_threads()) {}

    void begin_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(!t.in_cs, "nested begin_critical_section");
      t.in_cs = true;
      t.ann.store(epoch_.load());
    }

    void end_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(t.in_cs, "end_critical_section without begin");
      t.in_cs = false;
      t.ann.store(kEmptyAnn);
    }

    bool in_critical_section() const {
      return threads_[ThreadRegistry::current_id()].in_cs;
    }

    // Alloc hook: returns the birth stamp and advances the global epoch
    // every epoch_freq allocations on this thread.
    std::uint64_t on_alloc() {
      auto& t = threads_[ThreadRegistry::current_id()];
      std::uint64_t birth = epoch_.load();
      if (++t.alloc_count % epoch_freq_ == 0) epoch_.fetch_add(1);
      return birth;
    }

    std::uint64_t current_epoch() const { return epoch_.load(); }

    std::uint64_t announcement(std::uint32_t tid) const { return threads_[tid].ann.load(); }

   private:
    struct alignas(64) PerThread {
      std::atomic<std::uint64_t> ann{kEmptyAnn};
      std::uint64_t alloc_count = 0;
      bool in_cs = false;
    };

    std::atomic<std::uint64_t> epoch_{0};
    std::uint32_t epoch_freq_;
    std::vector<PerThread> threads_;
  };

  EbrBackend(std::shared_ptr<Clock> clock, const BackendConfig& cfg)
      : clock_(std::move(clock)), scan_threshold_(cfg.scan_threshold) {}

  Clock& clock() { return *clock_; }

  std::uint64_t on_alloc() { return clock_->on_alloc(); }
  std::uint64_t retire_stamp() const { return clock_->current_epoch(); }

  std::pair<Handle, Guard> acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "acquire outside critical section");
    return {src.load(), Guard{0, Guard::Kind::plain}};
  }

  std::optional<std::pair<Handle, Guard>> try_acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "try_acquire outside critical section");
    return {{src.load(), Guard{0, Guard::Kind::multi}}};
  }

  // Protect an already-loaded handle value (region backends: trivially,
  // the critical section does the work). Never fails.
  std::optional<Guard> try_protect(Handle) {
    return Guard{0, Guard::Kind::multi};
  }

  void release(Guard& g) {
    RECLAIM_ASSERT(g.engaged, "double release of guard");
    g.engaged = false;
  }

  bool scan_due(const PendingList& pending) const {
    return pending.size() > scan_threshold_;
  }

  // Moves ejectable entries from pending (FIFO, retaining failures in
  // place) into out.
  void scan(PendingList& pending, std::vector<Handle>& out) {
    std::uint64_t min_ann = kEmptyAnn;
    const std::uint32_t hw = ThreadRegistry::high_water();
    for (std::uint32_t tid = 0; tid < hw; ++tid) {
      std::uint64_t a = clock_->announcement(tid);
      if (a < min_ann) min_ann = a;
    }
    PendingList kept;
    for (auto& e : pending) {
      if (e.stamp < min_ann) {
        out.push_back(e.handle);
      } else {
        kept.push_back(e);
      }
    }
    pending.swap(kept);
  }

 private:
  std::shared_ptr<Clock> clock_;
  std::uint32_t scan_threshold_;
};

}  // namespace reclaim
