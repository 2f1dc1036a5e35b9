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

// Interval-based reclamation backend (2GEIBR). Every allocation is stamped
// with a birth epoch; a thread in a critical section announces a
// reservation interval [beginAnn, endAnn] which acquire widens whenever it
// observes the global epoch moving. A retired entry with lifetime
// [birth, retire] is ejectable once no announced interval intersects it.

namespace reclaim {

class IbrBackend {
 public:
  static constexpr std::uint64_t kEmptyAnn = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint32_t kDefaultEpochFreq = 40;

  class Clock {
   public:
    explicit Clock(const BackendConfig& cfg)
        : epoch_freq_(cfg.epoch_freq ? cfg.epoch_freq : kDefaultEpochFreq),
          threads_(ThreadRegistry::max_threads()) {}

    void begin_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(!t.in_cs, "nested begin_critical_section");
      t.in_cs = true;
      std::uint64_t e = epoch_.load();
      t.begin_ann.store(e);
      t.end_ann.store(e);
      t.prev_epoch = e;
    }

    void end_critical_section() {
      auto& t = threads_[ThreadRegistry::current_id()];
      RECLAIM_ASSERT(t.in_cs, "end_critical_section without begin");
      t.in_cs = false;
      t.begin_ann.store(kEmptyAnn);
      t.end_ann.store(kEmptyAnn);
    }

    bool in_critical_section() const {
      return threads_[ThreadRegistry::current_id()].in_cs;
    }

    std::uint64_t on_alloc() {
      auto& t = threads_[ThreadRegistry::current_id()];
      std::uint64_t birth = epoch_.load();
      if (++t.alloc_count % epoch_freq_ == 0) epoch_.fetch_add(1);
      return birth;
    }

    std::uint64_t current_epoch() const { return epoch_.load(); }

    // Loads src in a confirmed-stable epoch, widening this thread's
    // reservation each time the epoch is seen to have moved.
    Handle stable_load(const std::atomic<Handle>& src) {
      auto& t = threads_[ThreadRegistry::current_id()];
      while (true) {
        Handle h = src.load();
        std::uint64_t cur = epoch_.load();
        if (t.prev_epoch == cur) return h;
        t.end_ann.store(cur);
        t.prev_epoch = cur;
      }
    }

    std::pair<std::uint64_t, std::uint64_t> reservation(std::uint32_t tid) const {
      return {threads_[tid].begin_ann.load(), threads_[tid].end_ann.load()};
    }

   private:
    struct alignas(64) PerThread {
      std::atomic<std::uint64_t> begin_ann{kEmptyAnn};
      std::atomic<std::uint64_t> end_ann{kEmptyAnn};
      std::uint64_t prev_epoch = kEmptyAnn;
      std::uint64_t alloc_count = 0;
      bool in_cs = false;
    };

    std::atomic<std::uint64_t> epoch_{0};
    std::uint32_t epoch_freq_;
    std::vector<PerThread> threads_;
  };

  IbrBackend(std::shared_ptr<Clock> clock, const BackendConfig& cfg)
      : clock_(std::move(clock)), scan_threshold_(cfg.scan_threshold) {}

  Clock& clock() { return *clock_; }

  std::uint64_t on_alloc() { return clock_->on_alloc(); }
  std::uint64_t retire_stamp() const { return clock_->current_epoch(); }

  std::pair<Handle, Guard> acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "acquire outside critical section");
    return {clock_->stable_load(src), Guard{0, Guard::Kind::plain}};
  }

  // Delegates to acquire; never fails.
  std::optional<std::pair<Handle, Guard>> try_acquire(const std::atomic<Handle>& src) {
    RECLAIM_ASSERT(clock_->in_critical_section(), "try_acquire outside critical section");
    return {{clock_->stable_load(src), Guard{0, Guard::Kind::multi}}};
  }

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

  void scan(PendingList& pending, std::vector<Handle>& out) {
    const std::uint32_t hw = ThreadRegistry::high_water();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> reservations;
    reservations.reserve(hw);
    for (std::uint32_t tid = 0; tid < hw; ++tid) {
      auto r = clock_->reservation(tid);
      if (r.first != kEmptyAnn) reservations.push_back(r);
    }
    auto protected_by_someone = [&](const RetiredEntry& e) {
      for (auto [b, en] : reservations) {
        if (b <= e.stamp && e.birth <= en) return true;
      }
      return false;
    };
    PendingList kept;
    for (auto& e : pending) {
      if (!protected_by_someone(e)) {
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
