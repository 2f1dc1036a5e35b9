#pragma once

#include <atomic>
#include <utility>

#include "reclaim/rc/strong.hpp"

// Weak reference-counted pointers. A weak reference keeps the control
// block (and payload storage) from being freed but does not keep the
// payload from being disposed; the weak-count rule is
//
//   weak count = #weak references + #pending retired weak decrements
//                + (1 if strong count > 0)
//
// weak_snapshot_ptr protects the *payload* of a possibly-expired object:
// its fast path holds a dispose-instance guard (which withholds the
// deferred dispose), its slow path owns a strong unit obtained by a
// successful increment.

namespace reclaim::rc {

template <class T, class Backend>
class weak_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  weak_ptr() = default;
  weak_ptr(std::nullptr_t) {}  // NOLINT(google-explicit-constructor)

  weak_ptr(adopt_handle_t, Handle h) : h_(h) {}

  explicit weak_ptr(const shared_ptr<T, Backend>& sp) : h_(sp.handle()) { copy_unit(); }
  explicit weak_ptr(const snapshot_ptr<T, Backend>& sp) : h_(sp.handle()) { copy_unit(); }

  weak_ptr(const weak_ptr& o) : h_(o.handle()) { copy_unit(); }
  weak_ptr(weak_ptr&& o) noexcept : h_(o.detach()) {}

  weak_ptr& operator=(const weak_ptr& o) {
    if (this != &o) {
      weak_ptr tmp(o);
      Handle old = h_.exchange(tmp.detach(), std::memory_order_relaxed);
      tmp.h_.store(old, std::memory_order_relaxed);
    }
    return *this;
  }

  weak_ptr& operator=(weak_ptr&& o) noexcept {
    if (this != &o) {
      Handle old = h_.exchange(o.detach(), std::memory_order_relaxed);
      if (old) domain().delayed_weak_decrement(old);
    }
    return *this;
  }

  ~weak_ptr() {
    Handle h = h_.load(std::memory_order_relaxed);
    if (h) domain().delayed_weak_decrement(h);
  }

  Handle handle() const { return h_.load(std::memory_order_relaxed); }
  const std::atomic<Handle>& cell() const { return h_; }
  explicit operator bool() const { return static_cast<bool>(handle()); }

  bool expired() const {
    Handle h = handle();
    return !h || domain().expired(h);
  }

  // Upgrades to a strong reference; null if the object already expired.
  // A failed increment on the sticky counter requires no undo.
  shared_ptr<T, Backend> lock() const {
    Handle h = handle();
    if (!h || !domain().increment(h)) return {};
    return shared_ptr<T, Backend>(adopt_handle, h);
  }

  Handle detach() { return h_.exchange(kNullHandle, std::memory_order_relaxed); }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  void copy_unit() {
    Handle h = handle();
    if (h) domain().weak_increment(h);
  }

  std::atomic<Handle> h_{kNullHandle};
};

template <class T, class Backend>
class weak_snapshot_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  weak_snapshot_ptr() = default;

  // Fast path: guard on the dispose instance defers disposal.
  weak_snapshot_ptr(Handle h, Guard&& g) : h_(h), g_(std::move(g)) {}

  // Slow path: owns a strong unit.
  weak_snapshot_ptr(Handle h, detail::slow_path_t) : h_(h), slow_(true) {}

  weak_snapshot_ptr(weak_snapshot_ptr&& o) noexcept
      : h_(o.h_.load(std::memory_order_relaxed)),
        g_(std::move(o.g_)),
        slow_(o.slow_),
        live_(o.live_) {
    o.live_ = false;
    o.h_.store(kNullHandle, std::memory_order_relaxed);
  }

  weak_snapshot_ptr& operator=(weak_snapshot_ptr&& o) noexcept {
    if (this != &o) {
      if (live_) release();
      h_.store(o.h_.load(std::memory_order_relaxed), std::memory_order_relaxed);
      g_ = std::move(o.g_);
      slow_ = o.slow_;
      live_ = o.live_;
      o.live_ = false;
      o.h_.store(kNullHandle, std::memory_order_relaxed);
    }
    return *this;
  }

  weak_snapshot_ptr(const weak_snapshot_ptr&) = delete;
  weak_snapshot_ptr& operator=(const weak_snapshot_ptr&) = delete;

  ~weak_snapshot_ptr() {
    if (live_) release();
  }

  void release() {
    RECLAIM_ASSERT(live_, "weak snapshot released twice");
    live_ = false;
    Handle h = h_.load(std::memory_order_relaxed);
    auto& d = domain();
    if (g_.engaged) {
      d.dispose_ar().release(g_);
    } else if (slow_ && h) {
      d.decrement(h);
    }
    h_.store(kNullHandle, std::memory_order_relaxed);
  }

  Handle handle() const { return h_.load(std::memory_order_relaxed); }
  const std::atomic<Handle>& cell() const { return h_; }

  T* get() const { return handle().template as<T>(); }

  T* operator->() const {
    Handle h = handle();
    ledger::check_not_poisoned(h);
    return h.template as<T>();
  }

  T& operator*() const { return *operator->(); }

  explicit operator bool() const { return static_cast<bool>(handle()); }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  std::atomic<Handle> h_{kNullHandle};
  Guard g_;
  bool slow_ = false;
  bool live_ = true;
};

template <class T, class Backend>
class atomic_weak_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  atomic_weak_ptr() = default;
  explicit atomic_weak_ptr(weak_ptr<T, Backend> v) : cell_(v.detach()) {}

  atomic_weak_ptr(const atomic_weak_ptr&) = delete;
  atomic_weak_ptr& operator=(const atomic_weak_ptr&) = delete;

  ~atomic_weak_ptr() {
    Handle h = cell_.load(std::memory_order_relaxed);
    if (h) domain().delayed_weak_decrement(h);
  }

  weak_ptr<T, Backend> load() {
    domain().assert_racy_access_in_cs();
    return weak_ptr<T, Backend>(adopt_handle, domain().weak_load_and_increment(cell_));
  }

  Handle peek() const { return cell_.load(); }

  // Accepts any reference type (weak, strong, or snapshot): any unit the
  // caller holds proves the weak count is nonzero, so weak_increment is
  // safe.
  template <class Ref>
  void store(const Ref& desired) {
    domain().assert_racy_access_in_cs();
    Handle h = ref_handle(desired);
    if (h) domain().weak_increment(h);
    Handle old = cell_.exchange(h);
    if (old) domain().delayed_weak_decrement(old);
  }

  void store(weak_ptr<T, Backend>&& desired) {
    domain().assert_racy_access_in_cs();
    Handle old = cell_.exchange(desired.detach());
    if (old) domain().delayed_weak_decrement(old);
  }

  void store(std::nullptr_t) { store(weak_ptr<T, Backend>{}); }

  template <class RefE, class RefD>
  bool compare_and_swap(const RefE& expected, const RefD& desired) {
    domain().assert_racy_access_in_cs();
    auto [dptr, g] = domain().weak_ar().acquire(desired.cell());
    Handle exp = ref_handle(expected);
    bool ok = false;
    Handle cur = exp;
    if (cell_.compare_exchange_strong(cur, dptr)) {
      if (dptr) domain().weak_increment(dptr);
      if (exp) domain().delayed_weak_decrement(exp);
      ok = true;
    }
    domain().weak_ar().release(g);
    return ok;
  }

  // Protected snapshot of a possibly-expired cell. Returns a non-null
  // snapshot only for objects that were not expired at the check; returns
  // null only if the cell was null or still held the expired object after
  // the failed attempt (so the null result is linearizable); otherwise
  // retries. Lock-free, not wait-free.
  weak_snapshot_ptr<T, Backend> get_snapshot() {
    domain().assert_racy_access_in_cs();
    auto& d = domain();
    while (true) {
      auto [ptr, wg] = d.weak_ar().acquire(cell_);
      if (!ptr) {
        d.weak_ar().release(wg);
        return weak_snapshot_ptr<T, Backend>();
      }
      auto dg = d.dispose_ar().try_protect(ptr);
      bool incremented = false;
      if (!dg) {
        // Slot-exhaustion fallback: take a strong unit instead of a guard.
        incremented = d.increment(ptr);
      }
      const bool alive = incremented || (dg && !d.expired(ptr));
      if (alive) {
        d.weak_ar().release(wg);
        if (dg) return weak_snapshot_ptr<T, Backend>(ptr, std::move(*dg));
        ledger::counters().slow_path_snapshots.fetch_add(1, std::memory_order_relaxed);
        return weak_snapshot_ptr<T, Backend>(ptr, detail::slow_path);
      }
      if (dg) d.dispose_ar().release(*dg);
      d.weak_ar().release(wg);
      if (cell_.load() == ptr) return weak_snapshot_ptr<T, Backend>();
    }
  }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  std::atomic<Handle> cell_{kNullHandle};
};

}  // namespace reclaim::rc
