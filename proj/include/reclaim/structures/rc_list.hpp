#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "reclaim/rc/strong.hpp"

// Harris-Michael lock-free sorted linked list over reference-counted
// pointers, plus the Michael hash table built from one list per bucket.
// Unlinking a node is just a CAS on the predecessor's cell: the cell's
// strong unit moves to a deferred decrement automatically, so there are
// no retire calls anywhere in this file.
//
// Mark bit 0 on a node's next cell means the node is logically deleted.

namespace reclaim::structures {

template <class Backend>
class RcHarrisList {
 public:
  struct Node {
    std::uint64_t key;  // first word: poison canary target
    std::uint64_t value;
    rc::atomic_shared_ptr<Node, Backend> next;

    Node(std::uint64_t k, std::uint64_t v) : key(k), value(v) {}
  };

  using Cell = rc::atomic_shared_ptr<Node, Backend>;
  using Snapshot = rc::snapshot_ptr<Node, Backend>;

  static constexpr std::uintptr_t kDeleted = 0x1;

  RcHarrisList() = default;

  bool insert(std::uint64_t key, std::uint64_t value) {
    rc::CriticalGuard<Backend> cs;
    return insert_at(head_, key, value);
  }

  bool remove(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    return remove_at(head_, key);
  }

  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    return lookup_at(head_, key);
  }

  // --- bucket-level entry points (shared with the hash table); the caller
  // must already hold a critical section -------------------------------

  static bool insert_at(Cell& head, std::uint64_t key, std::uint64_t value) {
    while (true) {
      Pos p = find(head, key);
      if (p.curr && p.curr->key == key) return false;
      auto n = rc::make_shared<Node, Backend>(key, value);
      n->next.store(p.curr);
      if (p.prev_cell->compare_and_swap(p.curr, n)) return true;
      // lost a race: rescan
    }
  }

  static bool remove_at(Cell& head, std::uint64_t key) {
    while (true) {
      Pos p = find(head, key);
      if (!p.curr || p.curr->key != key) return false;
      Handle next_h = p.curr->next.peek();
      if (next_h.marks() & kDeleted) continue;  // racing delete: re-verify
      if (!p.curr->next.try_mark(next_h, kDeleted)) continue;
      // Logically deleted; physically unlink (best effort, helpers finish).
      auto succ = p.curr->next.get_snapshot();
      p.prev_cell->compare_and_swap_masked(p.curr.handle().canonical(), succ, 0);
      return true;
    }
  }

  // Read-only: traverses with snapshots and never helps, so it performs
  // zero strong-count updates on the fast path.
  static std::optional<std::uint64_t> lookup_at(Cell& head, std::uint64_t key) {
    Snapshot prev;
    Cell* cell = &head;
    Snapshot curr = cell->get_snapshot();
    while (curr) {
      std::uint64_t k = curr->key;
      if (k > key) return std::nullopt;
      Handle next_h = curr->next.peek();
      if (k == key) {
        if (next_h.marks() & kDeleted) return std::nullopt;
        return curr->value;
      }
      prev = std::move(curr);
      cell = &prev->next;
      curr = cell->get_snapshot();
    }
    return std::nullopt;
  }

 private:
  struct Pos {
    Snapshot prev;   // keeps *prev_cell's owner alive; empty when at head
    Cell* prev_cell = nullptr;
    Snapshot curr;   // first node with key >= target, or empty at end
  };

  // Michael-style find: unlinks marked nodes encountered on the way.
  // Structured restart only (no goto): jumping backward past Pos's
  // declaration would need the compiler to destroy and re-construct the
  // named return value, which g++ 11 gets wrong and leaks the guards
  // held by the snapshots.
  static Pos find(Cell& head, std::uint64_t key) {
    while (true) {
      Pos p;
      p.prev_cell = &head;
      p.curr = p.prev_cell->get_snapshot();
      bool restart = false;
      while (p.curr) {
        Handle next_h = p.curr->next.peek();
        if (next_h.marks() & kDeleted) {
          auto succ = p.curr->next.get_snapshot();
          if (!p.prev_cell->compare_and_swap_masked(p.curr.handle().canonical(), succ,
                                                    0)) {
            restart = true;
            break;
          }
          p.curr = p.prev_cell->get_snapshot();
          continue;
        }
        if (p.curr->key >= key) return p;
        p.prev = std::move(p.curr);
        p.prev_cell = &p.prev->next;
        p.curr = p.prev_cell->get_snapshot();
      }
      if (!restart) return p;
    }
  }

  Cell head_;
};

template <class Backend>
class RcMichaelHash {
 public:
  using List = RcHarrisList<Backend>;
  using Cell = typename List::Cell;

  explicit RcMichaelHash(std::size_t buckets)
      : nbuckets_(buckets ? buckets : 1), table_(new Cell[nbuckets_]) {}

  bool insert(std::uint64_t key, std::uint64_t value) {
    rc::CriticalGuard<Backend> cs;
    return List::insert_at(bucket(key), key, value);
  }

  bool remove(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    return List::remove_at(bucket(key), key);
  }

  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    return List::lookup_at(bucket(key), key);
  }

 private:
  Cell& bucket(std::uint64_t key) {
    // Fibonacci multiplicative hash.
    std::uint64_t h = key * 0x9E3779B97F4A7C15ull;
    return table_[(h >> 32) % nbuckets_];
  }

  std::size_t nbuckets_;
  std::unique_ptr<Cell[]> table_;
};

}  // namespace reclaim::structures
