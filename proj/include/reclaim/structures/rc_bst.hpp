#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "reclaim/rc/strong.hpp"

// Natarajan-Mittal external (leaf-oriented) lock-free BST over
// reference-counted pointers. Child edges carry two mark bits: FLAG
// (bit 0) on the edge to a leaf under deletion, TAG (bit 1) on the
// sibling edge to freeze it during cleanup. The cleanup CAS swings the
// ancestor's child pointer from the successor directly to the sibling;
// every node on the unlinked path is reclaimed automatically by the
// dropped reference counts — the manual variant's retire loop has no
// counterpart here.

namespace reclaim::structures {

template <class Backend>
class RcNatarajanBst {
 public:
  static constexpr std::uintptr_t kFlag = 0x1;
  static constexpr std::uintptr_t kTag = 0x2;

  // Sentinel keys; all user keys must be < kInf0.
  static constexpr std::uint64_t kInf0 = ~std::uint64_t{0} - 2;
  static constexpr std::uint64_t kInf1 = ~std::uint64_t{0} - 1;
  static constexpr std::uint64_t kInf2 = ~std::uint64_t{0};

  struct Node {
    std::uint64_t key;  // first word: poison canary target
    std::uint64_t value;
    rc::atomic_shared_ptr<Node, Backend> left, right;

    Node(std::uint64_t k, std::uint64_t v) : key(k), value(v) {}
  };

  using Cell = rc::atomic_shared_ptr<Node, Backend>;
  using Snapshot = rc::snapshot_ptr<Node, Backend>;

  RcNatarajanBst() {
    rc::CriticalGuard<Backend> cs;
    auto r = rc::make_shared<Node, Backend>(kInf2, 0);
    auto s = rc::make_shared<Node, Backend>(kInf1, 0);
    s->left.store(rc::make_shared<Node, Backend>(kInf0, 0));
    s->right.store(rc::make_shared<Node, Backend>(kInf1, 0));
    r->left.store(std::move(s));
    r->right.store(rc::make_shared<Node, Backend>(kInf2, 0));
    root_.store(std::move(r));
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    RECLAIM_ASSERT(key < kInf0, "bst key collides with a sentinel");
    rc::CriticalGuard<Backend> cs;
    while (true) {
      Seek s = seek(key);
      if (s.leaf->key == key) return false;
      Cell* child_cell = key < s.par->key ? &s.par->left : &s.par->right;
      if (s.leaf.handle().marks()) {  // edge under deletion: help, rescan
        cleanup(key, s);
        continue;
      }
      std::uint64_t leaf_key = s.leaf->key;
      auto new_leaf = rc::make_shared<Node, Backend>(key, value);
      auto new_internal =
          rc::make_shared<Node, Backend>(key < leaf_key ? leaf_key : key, 0);
      if (key < leaf_key) {
        new_internal->left.store(std::move(new_leaf));
        new_internal->right.store(s.leaf);
      } else {
        new_internal->left.store(s.leaf);
        new_internal->right.store(std::move(new_leaf));
      }
      if (child_cell->compare_and_swap(s.leaf, new_internal)) return true;
      Handle now = child_cell->peek();
      if (now.canonical() == s.leaf.handle().canonical() && now.marks()) {
        cleanup(key, s);
      }
    }
  }

  bool remove(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    bool injecting = true;
    Handle target;
    while (true) {
      Seek s = seek(key);
      if (injecting) {
        if (s.leaf->key != key) return false;
        Cell* child_cell = key < s.par->key ? &s.par->left : &s.par->right;
        Handle lf = s.leaf.handle();
        if (lf.marks()) {  // racing deletion on this edge: help, rescan
          cleanup(key, s);
          continue;
        }
        if (child_cell->try_mark(lf, kFlag)) {
          injecting = false;
          target = lf.canonical();
          if (cleanup(key, s)) return true;
        } else {
          Handle now = child_cell->peek();
          if (now.canonical() == lf.canonical() && now.marks()) cleanup(key, s);
        }
      } else {
        if (s.leaf.handle().canonical() != target) return true;  // helped away
        if (cleanup(key, s)) return true;
      }
    }
  }

  // Read-only: descends with snapshots only; zero strong-count updates on
  // the fast path.
  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    rc::CriticalGuard<Backend> cs;
    Snapshot n = root_.get_snapshot();
    while (true) {
      Cell& child = key < n->key ? n->left : n->right;
      Snapshot c = child.get_snapshot();
      if (!c) break;  // n is a leaf
      n = std::move(c);
    }
    if (n->key == key) return n->value;
    return std::nullopt;
  }

  // Best-effort (non-linearizable) range query over [lo, lo+len); the
  // pending subtree roots are held as snapshots, so on slot backends a
  // deep tree spills into slow-path snapshots but still completes.
  std::vector<std::uint64_t> range_query(std::uint64_t lo, std::uint64_t len) {
    rc::CriticalGuard<Backend> cs;
    std::vector<std::uint64_t> out;
    const std::uint64_t hi = lo + len;  // exclusive; no user key overflows
    std::vector<Snapshot> stack;
    stack.push_back(root_.get_snapshot());
    while (!stack.empty()) {
      Snapshot n = std::move(stack.back());
      stack.pop_back();
      if (!n) continue;
      Snapshot left = n->left.get_snapshot();
      if (!left) {  // leaf
        if (n->key >= lo && n->key < hi && n->key < kInf0) out.push_back(n->value);
        continue;
      }
      if (hi > n->key) stack.push_back(n->right.get_snapshot());
      if (lo < n->key) stack.push_back(std::move(left));
    }
    return out;
  }

 private:
  struct Seek {
    Snapshot anc;      // internal node whose child edge gets swung
    Handle successor;  // canonical expected value of that edge
    Snapshot par;      // parent of leaf
    Snapshot leaf;     // handle carries the edge's FLAG/TAG bits
  };

  Seek seek(std::uint64_t key) {
    Seek s;
    s.anc = root_.get_snapshot();
    s.par = s.anc->left.get_snapshot();
    s.successor = s.par.handle().canonical();
    s.leaf = s.par->left.get_snapshot();
    Handle parent_field = s.leaf.handle();  // edge par -> leaf
    while (true) {
      Cell& child_cell = key < s.leaf->key ? s.leaf->left : s.leaf->right;
      Snapshot child = child_cell.get_snapshot();
      if (!child) break;  // s.leaf is a leaf
      if (!(parent_field.marks() & kTag)) {
        s.anc = std::move(s.par);
        s.successor = s.leaf.handle().canonical();
      }
      s.par = std::move(s.leaf);
      parent_field = child.handle();
      s.leaf = std::move(child);
    }
    return s;
  }

  bool cleanup(std::uint64_t key, Seek& s) {
    Cell* successor_cell = key < s.anc->key ? &s.anc->left : &s.anc->right;
    Cell *child_cell, *sibling_cell;
    if (key < s.par->key) {
      child_cell = &s.par->left;
      sibling_cell = &s.par->right;
    } else {
      child_cell = &s.par->right;
      sibling_cell = &s.par->left;
    }
    if (!(child_cell->peek().marks() & kFlag)) {
      // The flagged (deleted) leaf is on the other side.
      sibling_cell = child_cell;
    }
    // Freeze the sibling edge so no insert slips underneath it.
    while (true) {
      Handle sf = sibling_cell->peek();
      if (sf.marks() & kTag) break;
      if (sibling_cell->try_mark(sf, kTag)) break;
    }
    auto sib = sibling_cell->get_snapshot();  // tagged: address + flag frozen
    // Swing the ancestor's edge to the sibling, keeping the sibling's FLAG
    // (a pending deletion of the sibling leaf) but dropping the TAG.
    return successor_cell->compare_and_swap_masked(s.successor, sib,
                                                   sib.handle().marks() & kFlag);
  }

  Cell root_;
};

}  // namespace reclaim::structures
