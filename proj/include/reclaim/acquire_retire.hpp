#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "reclaim/assert.hpp"
#include "reclaim/backends/config.hpp"
#include "reclaim/backends/ebr.hpp"
#include "reclaim/backends/hp.hpp"
#include "reclaim/backends/ibr.hpp"
#include "reclaim/control_block.hpp"
#include "reclaim/thread_registry.hpp"

// The generalized acquire-retire interface: allocation with backend
// stamping, retire/eject with per-thread FIFO retired lists, critical
// sections and (try_)acquire/release protection. retire never applies the
// deferred action itself; eject hands back one unprotected handle at a
// time so the caller can apply it iteratively. A handle may be retired any
// number of times before each retirement is ejected once.

namespace reclaim {

template <class Backend>
class AcquireRetire {
 public:
  using Clock = typename Backend::Clock;

  explicit AcquireRetire(const BackendConfig& cfg = {})
      : clock_(std::make_shared<Clock>(cfg)),
        backend_(clock_, cfg),
        threads_(ThreadRegistry::max_threads()) {}

  AcquireRetire(std::shared_ptr<Clock> clock, const BackendConfig& cfg = {})
      : clock_(std::move(clock)),
        backend_(clock_, cfg),
        threads_(ThreadRegistry::max_threads()) {}

  AcquireRetire(const AcquireRetire&) = delete;
  AcquireRetire& operator=(const AcquireRetire&) = delete;

  Backend& backend() { return backend_; }
  std::shared_ptr<Clock> clock_ptr() const { return clock_; }

  void begin_critical_section() { clock_->begin_critical_section(); }
  void end_critical_section() { clock_->end_critical_section(); }
  bool in_critical_section() const { return clock_->in_critical_section(); }

  template <class T, class... Args>
  Handle alloc(Args&&... args) {
    return allocate_managed<T>(backend_.on_alloc(), std::forward<Args>(args)...);
  }

  void retire(Handle h) {
    RECLAIM_ASSERT(h.canonical(), "retire of null handle");
    if (!h.canonical()) return;
    auto& t = threads_[ThreadRegistry::current_id()];
    t.pending.push_back(
        {h.canonical(), header_of(h).birth_epoch, backend_.retire_stamp()});
  }

  // Returns one retired handle that is no longer protected, or empty.
  // Scanning is gated on the backend's amortization policy; eject_now()
  // always scans.
  std::optional<Handle> eject() { return eject_impl(false); }
  std::optional<Handle> eject_now() { return eject_impl(true); }

  std::pair<Handle, Guard> acquire(const std::atomic<Handle>& src) {
    return backend_.acquire(src);
  }

  std::optional<std::pair<Handle, Guard>> try_acquire(const std::atomic<Handle>& src) {
    return backend_.try_acquire(src);
  }

  std::optional<Guard> try_protect(Handle h) { return backend_.try_protect(h); }

  void release(Guard& g) { backend_.release(g); }

  // --- quiescent-only helpers -------------------------------------------

  // Scans every thread's retired list once and appends the ejectable
  // handles. Only safe when no other thread is operating on this instance.
  void collect_ready(std::vector<Handle>& out) {
    for (auto& t : threads_) {
      while (!t.ready.empty()) {
        out.push_back(t.ready.front());
        t.ready.pop_front();
      }
      if (!t.pending.empty()) backend_.scan(t.pending, out);
    }
  }

  std::size_t pending_count(Handle h) const {
    std::size_t n = 0;
    for (auto& t : threads_) {
      for (auto& e : t.pending) {
        if (e.handle == h.canonical()) ++n;
      }
      for (auto& r : t.ready) {
        if (r == h.canonical()) ++n;
      }
    }
    return n;
  }

  std::size_t pending_total() const {
    std::size_t n = 0;
    for (auto& t : threads_) n += t.pending.size() + t.ready.size();
    return n;
  }

 private:
  struct alignas(64) PerThread {
    PendingList pending;
    std::deque<Handle> ready;
    // After a scan that ejected nothing (e.g. a stalled thread pinning the
    // epoch), lazy scans pause until the list has grown past this gate, so
    // scan work stays amortized-constant per retire instead of quadratic.
    std::size_t scan_gate = 0;
    bool ejecting = false;
  };

  std::optional<Handle> eject_impl(bool force) {
    auto& t = threads_[ThreadRegistry::current_id()];
    RECLAIM_ASSERT(!t.ejecting, "reentrant eject");
    t.ejecting = true;
    if (t.ready.empty() && !t.pending.empty() &&
        (force || (backend_.scan_due(t.pending) && t.pending.size() >= t.scan_gate))) {
      std::vector<Handle> out;
      backend_.scan(t.pending, out);
      t.scan_gate = out.empty() ? t.pending.size() + t.pending.size() / 8 + 64 : 0;
      for (auto h : out) t.ready.push_back(h);
    }
    std::optional<Handle> result;
    if (!t.ready.empty()) {
      result = t.ready.front();
      t.ready.pop_front();
    }
    t.ejecting = false;
    return result;
  }

  std::shared_ptr<Clock> clock_;
  Backend backend_;
  std::vector<PerThread> threads_;
};

// RAII critical-section bracket.
template <class AR>
class CriticalSectionGuard {
 public:
  explicit CriticalSectionGuard(AR& ar) : ar_(ar) { ar_.begin_critical_section(); }
  ~CriticalSectionGuard() { ar_.end_critical_section(); }
  CriticalSectionGuard(const CriticalSectionGuard&) = delete;
  CriticalSectionGuard& operator=(const CriticalSectionGuard&) = delete;

 private:
  AR& ar_;
};

}  // namespace reclaim
