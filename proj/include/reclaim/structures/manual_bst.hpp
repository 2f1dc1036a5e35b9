#pragma once

#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "reclaim/structures/manual_domain.hpp"

// Natarajan-Mittal external lock-free BST with explicit manual
// reclamation. The deleting thread's cleanup CAS unlinks a whole path
// (successor .. sibling's parent) in one step, then walks that path and
// retires every node on it plus the flagged leaf.
//
// This variant is restricted to the region backends (ebr, ibr): seek
// traverses through nodes that may already be unlinked and retired, which
// announcement-slot protection cannot validate on this tree. The bench
// rejects the bst/hp manual combination for the same reason.

namespace reclaim::structures {

template <class Backend>
class ManualNatarajanBst {
  static_assert(!std::is_same_v<Backend, HpBackend>,
                "the manual Natarajan-Mittal tree is only safe under region "
                "backends (ebr, ibr)");

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
    std::atomic<Handle> left{kNullHandle}, right{kNullHandle};

    Node(std::uint64_t k, std::uint64_t v) : key(k), value(v) {}
  };

  using Cell = std::atomic<Handle>;

  explicit ManualNatarajanBst(const BackendConfig& cfg = {}) : dom_(cfg) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    Handle r = dom_.ar().template alloc<Node>(kInf2, 0);
    Handle s = dom_.ar().template alloc<Node>(kInf1, 0);
    node(s)->left.store(dom_.ar().template alloc<Node>(kInf0, 0));
    node(s)->right.store(dom_.ar().template alloc<Node>(kInf1, 0));
    node(r)->left.store(s);
    node(r)->right.store(dom_.ar().template alloc<Node>(kInf2, 0));
    root_ = r;
  }

  ~ManualNatarajanBst() {
    dom_.collect_all();
    // Free everything still linked (retired nodes are disjoint from it).
    std::vector<Handle> stack{root_};
    while (!stack.empty()) {
      Handle h = stack.back().canonical();
      stack.pop_back();
      if (!h) continue;
      stack.push_back(node(h)->left.load().canonical());
      stack.push_back(node(h)->right.load().canonical());
      dispose_managed(h);
      free_managed(h);
    }
  }

  bool insert(std::uint64_t key, std::uint64_t value) {
    RECLAIM_ASSERT(key < kInf0, "bst key collides with a sentinel");
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    while (true) {
      Seek s = seek(key);
      Node* leaf = node(s.leaf.canonical());
      if (leaf->key == key) return false;
      Node* par = node(s.par);
      Cell* child_cell = key < par->key ? &par->left : &par->right;
      if (s.leaf.marks()) {  // edge under deletion: help, rescan
        cleanup(key, s);
        continue;
      }
      std::uint64_t leaf_key = leaf->key;
      Handle new_leaf = dom_.ar().template alloc<Node>(key, value);
      Handle new_internal = dom_.ar().template alloc<Node>(
          key < leaf_key ? leaf_key : key, 0);
      if (key < leaf_key) {
        node(new_internal)->left.store(new_leaf);
        node(new_internal)->right.store(s.leaf.canonical());
      } else {
        node(new_internal)->left.store(s.leaf.canonical());
        node(new_internal)->right.store(new_leaf);
      }
      Handle expected = s.leaf;  // unmarked
      if (child_cell->compare_exchange_strong(expected, new_internal)) return true;
      // Never published: free both directly.
      dispose_managed(new_leaf);
      free_managed(new_leaf);
      dispose_managed(new_internal);
      free_managed(new_internal);
      Handle now = child_cell->load();
      if (now.canonical() == s.leaf.canonical() && now.marks()) cleanup(key, s);
    }
  }

  bool remove(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    bool injecting = true;
    Handle target;
    while (true) {
      Seek s = seek(key);
      if (injecting) {
        if (node(s.leaf.canonical())->key != key) return false;
        Node* par = node(s.par);
        Cell* child_cell = key < par->key ? &par->left : &par->right;
        Handle lf = s.leaf;
        if (lf.marks()) {  // racing deletion on this edge: help, rescan
          cleanup(key, s);
          continue;
        }
        Handle expected = lf;
        if (child_cell->compare_exchange_strong(expected,
                                                lf.canonical().with_marks(kFlag))) {
          injecting = false;
          target = lf.canonical();
          if (cleanup(key, s)) return true;
        } else {
          Handle now = child_cell->load();
          if (now.canonical() == lf.canonical() && now.marks()) cleanup(key, s);
        }
      } else {
        if (s.leaf.canonical() != target) return true;  // helped away
        if (cleanup(key, s)) return true;
      }
    }
  }

  std::optional<std::uint64_t> lookup(std::uint64_t key) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    Handle n = root_;
    while (true) {
      Node* nn = node(n.canonical());
      Handle child =
          read_edge(key < nn->key ? nn->left : nn->right);
      if (child.canonical().is_null()) {
        if (nn->key == key) return nn->value;
        return std::nullopt;
      }
      n = child;
    }
  }

  // Best-effort (non-linearizable) range query over [lo, lo+len).
  std::vector<std::uint64_t> range_query(std::uint64_t lo, std::uint64_t len) {
    CriticalSectionGuard<AcquireRetire<Backend>> cs(dom_.ar());
    std::vector<std::uint64_t> out;
    const std::uint64_t hi = lo + len;  // exclusive; no user key overflows
    std::vector<Handle> stack{root_};
    while (!stack.empty()) {
      Handle h = stack.back().canonical();
      stack.pop_back();
      if (!h) continue;
      Node* n = node(h);
      Handle left = read_edge(n->left);
      if (left.canonical().is_null()) {  // leaf
        if (n->key >= lo && n->key < hi && n->key < kInf0) out.push_back(n->value);
        continue;
      }
      if (hi > n->key) stack.push_back(read_edge(n->right));
      if (lo < n->key) stack.push_back(left);
    }
    return out;
  }

  ManualDomain<Backend>& domain() { return dom_; }

 private:
  struct Seek {
    Handle anc;        // internal node whose child edge gets swung
    Handle successor;  // canonical expected value of that edge
    Handle par;        // canonical parent of leaf
    Handle leaf;       // carries the edge's FLAG/TAG bits
  };

  static Node* node(Handle h) { return h.template as<Node>(); }

  // Region-backend read of a child edge: acquire routes the load through
  // the backend (extending the reservation under ibr) and the value stays
  // valid for the rest of the critical section, so the guard is released
  // immediately.
  Handle read_edge(const Cell& cell) {
    auto [h, g] = dom_.ar().acquire(cell);
    dom_.ar().release(g);
    return h;
  }

  Seek seek(std::uint64_t key) {
    Seek s;
    s.anc = root_;
    s.par = read_edge(node(s.anc)->left).canonical();
    s.successor = s.par;
    s.leaf = read_edge(node(s.par)->left);
    Handle parent_field = s.leaf;  // edge par -> leaf
    while (true) {
      Node* l = node(s.leaf.canonical());
      Handle child = read_edge(key < l->key ? l->left : l->right);
      if (child.canonical().is_null()) break;  // s.leaf is a leaf
      if (!(parent_field.marks() & kTag)) {
        s.anc = s.par;
        s.successor = s.leaf.canonical();
      }
      s.par = s.leaf.canonical();
      parent_field = child;
      s.leaf = child;
    }
    return s;
  }

  bool cleanup(std::uint64_t key, const Seek& s) {
    Node* anc = node(s.anc.canonical());
    Cell* successor_cell = key < anc->key ? &anc->left : &anc->right;
    Node* par = node(s.par);
    Cell *child_cell, *sibling_cell;
    if (key < par->key) {
      child_cell = &par->left;
      sibling_cell = &par->right;
    } else {
      child_cell = &par->right;
      sibling_cell = &par->left;
    }
    if (!(child_cell->load().marks() & kFlag)) {
      // The flagged (deleted) leaf is on the other side.
      sibling_cell = child_cell;
    }
    // Freeze the sibling edge so no insert slips underneath it.
    while (true) {
      Handle sf = sibling_cell->load();
      if (sf.marks() & kTag) break;
      Handle expected = sf;
      if (sibling_cell->compare_exchange_strong(
              expected, sf.with_marks(sf.marks() | kTag))) {
        break;
      }
    }
    Handle sib = read_edge(*sibling_cell);  // tagged: address + flag frozen
    // Swing the ancestor's edge to the sibling, keeping the sibling's FLAG
    // (a pending deletion of the sibling leaf) but dropping the TAG.
    Handle expected = s.successor;
    Handle install = sib.canonical().with_marks(sib.marks() & kFlag);
    if (!successor_cell->compare_exchange_strong(expected, install)) return false;
    retire_path(s.successor, sib.canonical());
    return true;
  }

  // Retire every node on the unlinked path from the successor down to (but
  // excluding) the sibling, plus the flagged leaf hanging off it.
  void retire_path(Handle from, Handle sibling) {
    Handle n = from.canonical();
    while (n.canonical() != sibling) {
      Handle tmp = n.canonical();
      Node* nn = node(tmp);
      Handle l = nn->left.load();
      if (l.marks() & kFlag) {
        dom_.retire(l.canonical());
        n = nn->right.load();
      } else {
        dom_.retire(nn->right.load().canonical());
        n = l;
      }
      dom_.retire(tmp);
    }
  }

  ManualDomain<Backend> dom_;
  Handle root_;
};

}  // namespace reclaim::structures
