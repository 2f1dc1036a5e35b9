#pragma once

#include <atomic>
#include <cstddef>
#include <utility>

#include "reclaim/rc/domain.hpp"

// Strong reference-counted pointers over the acquire-retire domain:
//
//   shared_ptr         owning strong reference (not thread-safe itself)
//   atomic_shared_ptr  shared mutable cell holding one strong unit
//   snapshot_ptr       temporary protected reference; the fast path holds
//                      an acquire-retire guard and performs no counter
//                      traffic, the slow path owns a strong unit
//
// Handles may carry low-order mark bits (data-structure flags); all
// counter traffic targets the canonical handle while cells and
// comparisons keep the full bit pattern.

namespace reclaim::rc {

struct adopt_handle_t {
  explicit adopt_handle_t() = default;
};
inline constexpr adopt_handle_t adopt_handle{};

namespace detail {
struct slow_path_t {
  explicit slow_path_t() = default;
};
inline constexpr slow_path_t slow_path{};
}  // namespace detail

// Uniform access to the handle of any reference-like argument.
template <class Ref>
Handle ref_handle(const Ref& r) {
  return r.handle();
}
inline Handle ref_handle(Handle h) { return h; }
inline Handle ref_handle(std::nullptr_t) { return kNullHandle; }

template <class T, class Backend>
class shared_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  shared_ptr() = default;
  shared_ptr(std::nullptr_t) {}  // NOLINT(google-explicit-constructor)

  // Adopts an already-owned strong unit without touching the counter.
  shared_ptr(adopt_handle_t, Handle h) : h_(h) {}

  shared_ptr(const shared_ptr& o) : h_(o.handle()) { copy_unit(); }
  shared_ptr(shared_ptr&& o) noexcept : h_(o.detach()) {}

  shared_ptr& operator=(const shared_ptr& o) {
    if (this != &o) {
      Handle nh = o.handle();
      shared_ptr tmp(adopt_handle, nh);
      tmp.copy_unit();
      Handle old = h_.exchange(nh, std::memory_order_relaxed);
      tmp.h_.store(old, std::memory_order_relaxed);  // tmp's dtor drops old
    }
    return *this;
  }

  shared_ptr& operator=(shared_ptr&& o) noexcept {
    if (this != &o) {
      Handle old = h_.exchange(o.detach(), std::memory_order_relaxed);
      if (old) domain().delayed_decrement(old);
    }
    return *this;
  }

  ~shared_ptr() {
    Handle h = h_.load(std::memory_order_relaxed);
    if (h) domain().delayed_decrement(h);
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

  void reset() {
    Handle old = h_.exchange(kNullHandle, std::memory_order_relaxed);
    if (old) domain().delayed_decrement(old);
  }

  // Surrenders ownership of the strong unit to the caller.
  Handle detach() { return h_.exchange(kNullHandle, std::memory_order_relaxed); }

  friend bool operator==(const shared_ptr& a, const shared_ptr& b) {
    return a.handle() == b.handle();
  }
  friend bool operator==(const shared_ptr& a, std::nullptr_t) { return !a; }
  friend bool operator!=(const shared_ptr& a, const shared_ptr& b) { return !(a == b); }
  friend bool operator!=(const shared_ptr& a, std::nullptr_t) { return static_cast<bool>(a); }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  void copy_unit() {
    Handle h = handle();
    if (h) {
      bool ok = domain().increment(h);
      RECLAIM_ASSERT(ok, "shared_ptr copy of an expired reference");
      (void)ok;
    }
  }

  // Atomic only so the handle has a stable load/store location for the
  // compare-and-swap protection protocol; shared_ptr itself is not safe
  // for concurrent mutation.
  std::atomic<Handle> h_{kNullHandle};
};

template <class T, class Backend, class... Args>
shared_ptr<T, Backend> make_shared(Args&&... args) {
  Handle h =
      RcDomain<Backend>::instance().template make_managed<T>(std::forward<Args>(args)...);
  return shared_ptr<T, Backend>(adopt_handle, h);
}

template <class T, class Backend>
class snapshot_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  snapshot_ptr() = default;

  // Fast path: protected by an acquire-retire guard, no counter traffic.
  snapshot_ptr(Handle h, Guard&& g) : h_(h), g_(std::move(g)) {}

  // Slow path: owns a strong unit (if non-null).
  snapshot_ptr(Handle h, detail::slow_path_t) : h_(h), slow_(true) {}

  snapshot_ptr(snapshot_ptr&& o) noexcept
      : h_(o.h_.load(std::memory_order_relaxed)),
        g_(std::move(o.g_)),
        slow_(o.slow_),
        live_(o.live_) {
    o.live_ = false;
    o.h_.store(kNullHandle, std::memory_order_relaxed);
  }

  snapshot_ptr& operator=(snapshot_ptr&& o) noexcept {
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

  snapshot_ptr(const snapshot_ptr&) = delete;
  snapshot_ptr& operator=(const snapshot_ptr&) = delete;

  ~snapshot_ptr() {
    if (live_) release();
  }

  void release() {
    RECLAIM_ASSERT(live_, "snapshot released twice");
    live_ = false;
    Handle h = h_.load(std::memory_order_relaxed);
    auto& d = domain();
    if (g_.engaged) {
      d.strong_ar().release(g_);
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

  // Promotes the snapshot to an owning reference. Fails (returns null) if
  // the object's strong count already reached zero: the snapshot keeps the
  // payload from being disposed, not the count from expiring.
  shared_ptr<T, Backend> to_shared() const {
    Handle h = handle();
    if (!h || !domain().increment(h)) return {};
    return shared_ptr<T, Backend>(adopt_handle, h);
  }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  std::atomic<Handle> h_{kNullHandle};
  Guard g_;
  bool slow_ = false;
  bool live_ = true;
};

template <class T, class Backend>
class atomic_shared_ptr {
 public:
  using domain_type = RcDomain<Backend>;

  atomic_shared_ptr() = default;
  explicit atomic_shared_ptr(shared_ptr<T, Backend> v) : cell_(v.detach()) {}

  atomic_shared_ptr(const atomic_shared_ptr&) = delete;
  atomic_shared_ptr& operator=(const atomic_shared_ptr&) = delete;

  ~atomic_shared_ptr() {
    Handle h = cell_.load(std::memory_order_relaxed);
    if (h) domain().delayed_decrement(h);
  }

  shared_ptr<T, Backend> load() {
    domain().assert_racy_access_in_cs();
    return shared_ptr<T, Backend>(adopt_handle, domain().load_and_increment(cell_));
  }

  // Unprotected read of the raw handle bits (marks included). The result
  // must not be dereferenced without separate protection.
  Handle peek() const { return cell_.load(); }

  template <class Ref>
  void store(const Ref& desired) {
    domain().assert_racy_access_in_cs();
    Handle h = ref_handle(desired);
    if (h) {
      bool ok = domain().increment(h);
      RECLAIM_ASSERT(ok, "store of an expired reference");
      (void)ok;
    }
    Handle old = cell_.exchange(h);
    if (old) domain().delayed_decrement(old);
  }

  // Ownership-transferring store: no counter traffic for the new value.
  void store(shared_ptr<T, Backend>&& desired) {
    domain().assert_racy_access_in_cs();
    Handle old = cell_.exchange(desired.detach());
    if (old) domain().delayed_decrement(old);
  }

  void store(std::nullptr_t) { store(shared_ptr<T, Backend>{}); }

  // Single-shot CAS. The new value is re-read from `desired` under an
  // acquire on its cell, so the counter increment after a successful swap
  // cannot race with a deferred decrement destroying the object.
  template <class RefE, class RefD>
  bool compare_and_swap(const RefE& expected, const RefD& desired) {
    domain().assert_racy_access_in_cs();
    auto [dptr, g] = domain().strong_ar().acquire(desired.cell());
    Handle exp = ref_handle(expected);
    bool ok = false;
    Handle cur = exp;
    if (cell_.compare_exchange_strong(cur, dptr)) {
      if (dptr) {
        bool inc = domain().increment(dptr);
        RECLAIM_ASSERT(inc, "compare_and_swap installed an expired reference");
        (void)inc;
      }
      if (exp) domain().delayed_decrement(exp);
      ok = true;
    }
    domain().strong_ar().release(g);
    return ok;
  }

  // CAS variant that installs the desired handle with the given mark bits
  // instead of the bits currently on it. Needed when unlinking: the value
  // read from a deleted node's next cell carries that node's deletion
  // mark, which must not propagate into the predecessor's cell.
  template <class RefE, class RefD>
  bool compare_and_swap_masked(const RefE& expected, const RefD& desired,
                               std::uintptr_t marks) {
    domain().assert_racy_access_in_cs();
    auto [dptr, g] = domain().strong_ar().acquire(desired.cell());
    Handle install = dptr.with_marks(marks);
    Handle exp = ref_handle(expected);
    bool ok = false;
    Handle cur = exp;
    if (cell_.compare_exchange_strong(cur, install)) {
      if (install) {
        bool inc = domain().increment(install);
        RECLAIM_ASSERT(inc, "compare_and_swap installed an expired reference");
        (void)inc;
      }
      if (exp) domain().delayed_decrement(exp);
      ok = true;
    }
    domain().strong_ar().release(g);
    return ok;
  }

  // Sets mark bits on the stored handle without changing its canonical
  // value; the cell keeps its single strong unit, so no counter traffic.
  bool try_mark(Handle expected, std::uintptr_t mark) {
    Handle want = expected.with_marks(expected.marks() | mark);
    Handle cur = expected;
    return cell_.compare_exchange_strong(cur, want);
  }

  snapshot_ptr<T, Backend> get_snapshot() {
    domain().assert_racy_access_in_cs();
    auto& d = domain();
    if constexpr (domain_type::kRegionBackend) {
      // Region backends protect through the critical section alone:
      // try_acquire is a plain load with an always-engaged guard.
      return snapshot_ptr<T, Backend>(cell_.load(), Guard{0, Guard::Kind::multi});
    }
    if (auto r = d.strong_ar().try_acquire(cell_)) {
      return snapshot_ptr<T, Backend>(r->first, std::move(r->second));
    }
    ledger::counters().slow_path_snapshots.fetch_add(1, std::memory_order_relaxed);
    auto [h, g] = d.strong_ar().acquire(cell_);
    if (h) {
      bool ok = d.increment(h);
      RECLAIM_ASSERT(ok, "slow-path snapshot of an expired cell");
      (void)ok;
    }
    d.strong_ar().release(g);
    return snapshot_ptr<T, Backend>(h, detail::slow_path);
  }

  static domain_type& domain() { return domain_type::instance(); }

 private:
  std::atomic<Handle> cell_{kNullHandle};
};

}  // namespace reclaim::rc
