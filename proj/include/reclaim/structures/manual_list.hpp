#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "reclaim/structures/manual_domain.hpp"

// Harris-Michael sorted linked list and Michael hash table with explicit
// manual reclamation: the thread whose CAS physically unlinks a node
// retires it. Traversal protects prev and curr with acquire-retire guards
// (announcement slots under hp, reservation bookkeeping under ebr/ibr)
// and restarts from the head whenever the predecessor changes underneath
// it, following Michael's hazard-pointer algorithm.

namespace reclaim::structures {

template <class Backend>
class ManualListOps {
 public:
  static constexpr std::uintptr_t kDeleted = 0x1;

  struct Node {
    std::uint64_t key;  // first word: poison canary target
    std::uint64_t value;
    std::atomic<Handle> next{kNullHandle};

    Node(std::uint64_t k, std::uint64_t v) : key(k), value(v) {}
  };

  using Cell = std::atomic<Handle>;
  using Dom = ManualDomain<Backend>;

  static Node* node(Handle h) { return h.template as<Node>(); }

  // Guard-owning search position; releases its guards on destruction.
  struct Pos {
    AcquireRetire<Backend>* ar = nullptr;
    Cell* prev_cell = nullptr;
    Handle curr;  // unmarked; null past the end
    Guard prev_g, curr_g;

    Pos() = default;
    Pos(Pos&& o) noexcept = default;
    Pos& operator=(Pos&& o) noexcept = default;
    Pos(const Pos&) = delete;
    Pos& operator=(const Pos&) = delete;

    ~Pos() {
      if (prev_g.engaged) ar->release(prev_g);
      if (curr_g.engaged) ar->release(curr_g);
    }
  };

  // Returns the position of the first node with key >= target, unlinking
  // (and retiring) marked nodes on the way. Caller must be in a critical
  // section.
  static Pos find(Dom& dom, Cell& head, std::uint64_t key) {
    auto& ar = dom.ar();
    while (true) {
      Pos p;
      p.ar = &ar;
      p.prev_cell = &head;
      if (!protect(ar, p, *p.prev_cell)) continue;
      bool restart = false;
      while (p.curr) {
        Handle next = node(p.curr)->next.load();
        if (next.marks() & kDeleted) {
          // curr is logically deleted: unlink it from prev_cell.
          Handle expected = p.curr;
          if (!p.prev_cell->compare_exchange_strong(expected, next.canonical())) {
            restart = true;
            break;
          }
          dom.retire(p.curr);
          ar.release(p.curr_g);
          if (!protect(ar, p, *p.prev_cell)) {
            restart = true;
            break;
          }
          continue;
        }
        if (node(p.curr)->key >= key) return p;
        if (p.prev_g.engaged) ar.release(p.prev_g);
        p.prev_g = std::move(p.curr_g);
        p.prev_cell = &node(p.curr)->next;
        if (!protect(ar, p, *p.prev_cell)) {
          restart = true;
          break;
        }
      }
      if (!restart) return p;  // end of list
    }
  }

  static bool insert(Dom& dom, Cell& head, std::uint64_t key, std::uint64_t value) {
    while (true) {
      Pos p = find(dom, head, key);
      if (p.curr && node(p.curr)->key == key) return false;
      Handle n = dom.ar().template alloc<Node>(key, value);
      node(n)->next.store(p.curr);
      Handle expected = p.curr;
      if (p.prev_cell->compare_exchange_strong(expected, n)) return true;
      dispose_managed(n);  // never published
      free_managed(n);
    }
  }

  static bool remove(Dom& dom, Cell& head, std::uint64_t key) {
    while (true) {
      Pos p = find(dom, head, key);
      if (!p.curr || node(p.curr)->key != key) return false;
      Handle next = node(p.curr)->next.load();
      if (next.marks() & kDeleted) continue;  // racing delete: re-verify
      Handle exp_next = next;
      if (!node(p.curr)->next.compare_exchange_strong(
              exp_next, next.with_marks(next.marks() | kDeleted))) {
        continue;
      }
      Handle exp_curr = p.curr;
      if (p.prev_cell->compare_exchange_strong(exp_curr, next.canonical())) {
        dom.retire(p.curr);
      } else {
        // Let a helper unlink and retire it before we report completion.
        Pos helper = find(dom, head, key);
        (void)helper;
      }
      return true;
    }
  }

  static std::optional<std::uint64_t> lookup(Dom& dom, Cell& head, std::uint64_t key) {
    Pos p = find(dom, head, key);
    if (p.curr && node(p.curr)->key == key) return node(p.curr)->value;
    return std::nullopt;
  }

  // Quiescent-only: dispose and free every node still linked from head.
  static void destroy_chain(Cell& head) {
    Handle h = head.load().canonical();
    head.store(kNullHandle);
    while (h) {
      Handle next = node(h)->next.load().canonical();
      dispose_managed(h);
      free_managed(h);
      h = next;
    }
  }

 private:
  // Announce-and-validate the cell into p.curr/p.curr_g. Returns false
  // (forcing a restart) if the value is marked, i.e. the cell's owner was
  // deleted underneath us.
  static bool protect(AcquireRetire<Backend>& ar, Pos& p, Cell& cell) {
    auto res = ar.try_acquire(cell);
    RECLAIM_ASSERT(res, "announcement slots exhausted in list traversal");
    if (!res) return false;
    if (res->first.marks() & kDeleted) {
      ar.release(res->second);
      return false;
    }
    p.curr = res->first;
    p.curr_g = std::move(res->second);
    return true;
  }
};

template <class Backend>
class ManualHarrisList {
 public:
  using Ops = ManualListOps<Backend>;

  explicit ManualHarrisList(const BackendConfig& cfg = {}) : dom_(cfg) {}

  ~ManualHarrisList() {
    dom_.collect_all();
    Ops::destroy_chain(head_);
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::insert(dom_, head_, key, value);
  }

  bool remove(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::remove(dom_, head_, key);
  }

  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::lookup(dom_, head_, key);
  }

  ManualDomain<Backend>& domain() { return dom_; }

 private:
  ManualDomain<Backend> dom_;
  typename Ops::Cell head_{kNullHandle};
};

template <class Backend>
class ManualMichaelHash {
 public:
  using Ops = ManualListOps<Backend>;

  explicit ManualMichaelHash(std::size_t buckets, const BackendConfig& cfg = {})
      : dom_(cfg),
        nbuckets_(buckets ? buckets : 1),
        table_(std::make_unique<typename Ops::Cell[]>(nbuckets_)) {
    for (std::size_t i = 0; i < nbuckets_; ++i) table_[i].store(kNullHandle);
  }

  ~ManualMichaelHash() {
    dom_.collect_all();
    for (std::size_t i = 0; i < nbuckets_; ++i) Ops::destroy_chain(table_[i]);
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::insert(dom_, bucket(key), key, value);
  }

  bool remove(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::remove(dom_, bucket(key), key);
  }

  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    return Ops::lookup(dom_, bucket(key), key);
  }

  ManualDomain<Backend>& domain() { return dom_; }

 private:
  typename Ops::Cell& bucket(std::uint64_t key) {
    std::uint64_t h = key * 0x9E3779B97F4A7C15ull;  // Fibonacci hash
    return table_[(h >> 32) % nbuckets_];
  }

  ManualDomain<Backend> dom_;
  std::size_t nbuckets_;
  std::unique_ptr<typename Ops::Cell[]> table_;
};

}  // namespace reclaim::structures
