#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "reclaim/rc/weak.hpp"

// Ramalhete-Correia doubly-linked queue over reference-counted pointers.
// Forward (next) links are strong; backward (prev) links are weak, which
// breaks the reference cycle between adjacent nodes: a dequeued node's
// strong count drains even though its successor still points back at it.

namespace reclaim::structures {

template <class Backend>
class RcDlQueue {
 public:
  struct Node {
    std::uint64_t value;  // first word: poison canary target
    rc::atomic_shared_ptr<Node, Backend> next;
    rc::atomic_weak_ptr<Node, Backend> prev;

    explicit Node(std::uint64_t v) : value(v) {}
  };

  RcDlQueue() {
    rc::CriticalGuard<Backend> cs;
    auto sentinel = rc::make_shared<Node, Backend>(0);
    head_.store(sentinel);
    tail_.store(std::move(sentinel));
  }

  void enqueue(std::uint64_t v) {
    auto new_node = rc::make_shared<Node, Backend>(v);
    rc::CriticalGuard<Backend> cs;
    while (true) {
      auto ltail = tail_.get_snapshot();
      new_node->prev.store(ltail);
      // Help the previous enqueue set its next pointer.
      auto lprev = ltail->prev.get_snapshot();
      if (lprev && lprev->next.peek().is_null()) lprev->next.store(ltail);
      if (tail_.compare_and_swap(ltail, new_node)) {
        ltail->next.store(std::move(new_node));
        return;
      }
    }
  }

  std::optional<std::uint64_t> dequeue() {
    rc::CriticalGuard<Backend> cs;
    while (true) {
      auto lhead = head_.get_snapshot();
      auto lnext = lhead->next.get_snapshot();
      if (!lnext) return std::nullopt;  // queue is empty
      if (head_.compare_and_swap(lhead, lnext)) return lnext->value;
    }
  }

  // Quiescent-only: handles of every node reachable from head (the head
  // sentinel first). Used by the weak-count-rule checks.
  std::vector<Handle> quiescent_nodes() {
    std::vector<Handle> out;
    Handle h = head_.peek().canonical();
    while (h) {
      out.push_back(h);
      h = h.template as<Node>()->next.peek().canonical();
    }
    return out;
  }

 private:
  rc::atomic_shared_ptr<Node, Backend> head_, tail_;
};

}  // namespace reclaim::structures
