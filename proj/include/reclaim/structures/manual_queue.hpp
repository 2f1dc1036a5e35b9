#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "reclaim/structures/manual_domain.hpp"

// Michael-Scott lock-free FIFO queue with explicit manual reclamation:
// the thread whose CAS swings the head retires the old sentinel. This is
// the singly-linked manual baseline the doubly-linked rc queue is compared
// against; backward links only exist in the rc variant, where weak
// references break the resulting cycles.

namespace reclaim::structures {

template <class Backend>
class ManualMsQueue {
 public:
  struct Node {
    std::uint64_t value;  // first word: poison canary target
    std::atomic<Handle> next{kNullHandle};

    explicit Node(std::uint64_t v) : value(v) {}
  };

  explicit ManualMsQueue(const BackendConfig& cfg = {}) : dom_(cfg) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    Handle sentinel = dom_.ar().template alloc<Node>(0);
    head_.store(sentinel);
    tail_.store(sentinel);
  }

  ~ManualMsQueue() {
    dom_.collect_all();
    Handle h = head_.load().canonical();
    while (h) {
      Handle next = node(h)->next.load().canonical();
      dispose_managed(h);
      free_managed(h);
      h = next;
    }
  }

  void enqueue(std::uint64_t v) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    Handle n = dom_.ar().template alloc<Node>(v);
    while (true) {
      Prot tail = protect(tail_);
      if (tail_.load() != tail.h) continue;
      Handle next = node(tail.h)->next.load().canonical();
      if (next) {  // tail is lagging: help it forward
        Handle expected = tail.h;
        tail_.compare_exchange_strong(expected, next);
        continue;
      }
      Handle expected = kNullHandle;
      if (node(tail.h)->next.compare_exchange_strong(expected, n)) {
        expected = tail.h;
        tail_.compare_exchange_strong(expected, n);
        return;
      }
    }
  }

  std::optional<std::uint64_t> dequeue() {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    while (true) {
      Prot head = protect(head_);
      Prot next = protect(node(head.h)->next);
      if (head_.load() != head.h) continue;
      if (next.h.canonical().is_null()) return std::nullopt;  // queue is empty
      Handle ltail = tail_.load();
      if (ltail == head.h) {  // keep tail from falling behind head
        Handle expected = ltail;
        tail_.compare_exchange_strong(expected, next.h.canonical());
      }
      Handle expected = head.h;
      if (head_.compare_exchange_strong(expected, next.h.canonical())) {
        std::uint64_t v = node(next.h.canonical())->value;
        dom_.retire(head.h);
        return v;
      }
    }
  }

  ManualDomain<Backend>& domain() { return dom_; }

 private:
  static Node* node(Handle h) { return h.template as<Node>(); }

  struct Prot {
    AcquireRetire<Backend>* ar = nullptr;
    Handle h;
    Guard g;

    Prot() = default;
    Prot(Prot&&) noexcept = default;
    Prot& operator=(Prot&&) noexcept = default;
    Prot(const Prot&) = delete;
    Prot& operator=(const Prot&) = delete;
    ~Prot() {
      if (g.engaged) ar->release(g);
    }
  };

  Prot protect(const std::atomic<Handle>& cell) {
    auto res = dom_.ar().try_acquire(cell);
    RECLAIM_ASSERT(res, "announcement slots exhausted in queue operation");
    Prot p;
    p.ar = &dom_.ar();
    p.h = res->first;
    p.g = std::move(res->second);
    return p;
  }

  ManualDomain<Backend> dom_;
  std::atomic<Handle> head_{kNullHandle}, tail_{kNullHandle};
};

}  // namespace reclaim::structures
