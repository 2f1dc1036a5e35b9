#pragma once

#include <cstddef>
#include <vector>

#include "reclaim/acquire_retire.hpp"
#include "reclaim/control_block.hpp"
#include "reclaim/ledger.hpp"

// The reference-counting domain: three acquire-retire instances over one
// backend — strong decrements, weak decrements, and disposals — plus the
// deferral primitives they support.
//
// All three instances share a single backend clock (global epoch and
// per-thread announcements), so one begin/end critical section covers all
// of them; weak-pointer operations acquire on two instances inside one
// operation, which separate clocks would turn into nested sections.
// Announcement slots (for slot backends) stay per-instance, so e.g. a
// dispose-instance guard never withholds weak-instance ejects.
//
// A retired handle is a deferred action: a strong decrement, a weak
// decrement, or a dispose. After each retire the calling thread drains
// ejects and applies the actions iteratively; a thread-local flag makes
// nested delayed_* calls (e.g. a dispose destroying a payload whose
// members issue further delayed decrements) enqueue-only, so the cascade
// is a work loop rather than recursion.

namespace reclaim::rc {

template <class Backend>
class RcDomain {
 public:
  using AR = AcquireRetire<Backend>;

  explicit RcDomain(const BackendConfig& cfg = {})
      : strong_(cfg),
        weak_(strong_.clock_ptr(), cfg),
        dispose_(strong_.clock_ptr(), cfg) {}

  RcDomain(const RcDomain&) = delete;
  RcDomain& operator=(const RcDomain&) = delete;

  // Process-wide domain used by the pointer types. configure() must be
  // called before the first use, if at all.
  static RcDomain& instance() {
    static RcDomain d(config_storage());
    return d;
  }

  static void configure(const BackendConfig& cfg) { config_storage() = cfg; }

  AR& strong_ar() { return strong_; }
  AR& weak_ar() { return weak_; }
  AR& dispose_ar() { return dispose_; }

  void begin_critical_section() { strong_.begin_critical_section(); }
  void end_critical_section() { strong_.end_critical_section(); }
  bool in_critical_section() const { return strong_.in_critical_section(); }

  // Region backends require racy atomic-pointer accesses and snapshot
  // lifetimes to sit inside a critical section (slot backends do not).
  void assert_racy_access_in_cs() const {
    if constexpr (kRegionBackend) {
      RECLAIM_ASSERT(in_critical_section(),
                     "racy shared-pointer access outside critical section");
    }
  }

  static constexpr bool kRegionBackend = !std::is_same_v<Backend, HpBackend>;

  template <class T, class... Args>
  Handle make_managed(Args&&... args) {
    return strong_.template alloc<T>(std::forward<Args>(args)...);
  }

  // --- Fig. 7 primitives ---------------------------------------------------

  bool increment(Handle h) {
    ledger::counters().strong_updates.fetch_add(1, std::memory_order_relaxed);
    return header_of(h).strong.increment_if_not_zero();
  }

  void weak_increment(Handle h) {
    // No success check: a zero weak count frees the block immediately, so
    // a caller holding any reference proves it is nonzero.
    header_of(h).weak.increment_if_not_zero();
  }

  void decrement(Handle h) {
    ledger::counters().strong_updates.fetch_add(1, std::memory_order_relaxed);
    if (header_of(h).strong.decrement()) delayed_dispose(h);
  }

  void dispose(Handle h) {
    dispose_managed(h);  // payload destructor + poison stamp
    weak_decrement(h);
  }

  void weak_decrement(Handle h) {
    if (header_of(h).weak.decrement()) free_managed(h);
  }

  void delayed_decrement(Handle h) {
    strong_.retire(h);
    drain();
  }

  void delayed_weak_decrement(Handle h) {
    weak_.retire(h);
    drain();
  }

  void delayed_dispose(Handle h) {
    dispose_.retire(h);
    drain();
  }

  Handle load_and_increment(const std::atomic<Handle>& src) {
    auto [h, g] = strong_.acquire(src);
    if (h) {
      bool ok = increment(h);
      RECLAIM_ASSERT(ok, "load_and_increment on an expired strong cell");
      (void)ok;
    }
    strong_.release(g);
    return h;
  }

  Handle weak_load_and_increment(const std::atomic<Handle>& src) {
    auto [h, g] = weak_.acquire(src);
    if (h) weak_increment(h);
    weak_.release(g);
    return h;
  }

  bool expired(Handle h) { return header_of(h).strong.load() == 0; }

  // --- eject draining --------------------------------------------------

  // Applies every currently ejectable deferred action on this thread,
  // iteratively. Reentrant calls (from a dispose cascade) are no-ops.
  void drain() {
    if (draining_) return;
    draining_ = true;
    bool progress = true;
    while (progress) {
      progress = false;
      while (auto h = strong_.eject()) {
        decrement(*h);
        progress = true;
      }
      while (auto h = dispose_.eject()) {
        dispose(*h);
        progress = true;
      }
      while (auto h = weak_.eject()) {
        weak_decrement(*h);
        progress = true;
      }
    }
    draining_ = false;
  }

  // Quiescent-only teardown: scans every thread's retired lists on all
  // three instances and applies everything ejectable, until stable.
  // Returns the number of applied actions.
  std::size_t collect_all() {
    std::size_t applied = 0;
    draining_ = true;
    std::vector<Handle> out;
    while (true) {
      out.clear();
      strong_.collect_ready(out);
      if (!out.empty()) {
        for (Handle h : out) decrement(h);
        applied += out.size();
        continue;
      }
      dispose_.collect_ready(out);
      if (!out.empty()) {
        for (Handle h : out) dispose(h);
        applied += out.size();
        continue;
      }
      weak_.collect_ready(out);
      if (!out.empty()) {
        for (Handle h : out) weak_decrement(h);
        applied += out.size();
        continue;
      }
      break;
    }
    draining_ = false;
    return applied;
  }

  std::size_t pending_total() const {
    return strong_.pending_total() + weak_.pending_total() + dispose_.pending_total();
  }

  // Deferred actions still queued against h (used by quiescent checks).
  std::size_t pending_strong(Handle h) const { return strong_.pending_count(h); }
  std::size_t pending_weak(Handle h) const { return weak_.pending_count(h); }
  std::size_t pending_dispose(Handle h) const { return dispose_.pending_count(h); }

 private:
  static BackendConfig& config_storage() {
    static BackendConfig cfg;
    return cfg;
  }

  AR strong_;
  AR weak_;
  AR dispose_;

  static thread_local bool draining_;
};

template <class Backend>
thread_local bool RcDomain<Backend>::draining_ = false;

// RAII critical-section bracket over a domain.
template <class Backend>
class CriticalGuard {
 public:
  explicit CriticalGuard(RcDomain<Backend>& d = RcDomain<Backend>::instance()) : d_(d) {
    d_.begin_critical_section();
  }
  ~CriticalGuard() { d_.end_critical_section(); }
  CriticalGuard(const CriticalGuard&) = delete;
  CriticalGuard& operator=(const CriticalGuard&) = delete;

 private:
  RcDomain<Backend>& d_;
};

}  // namespace reclaim::rc
