#pragma once

#include <cstddef>
#include <vector>

#include "reclaim/acquire_retire.hpp"

// Manual-reclamation companion to the rc domain: retire defers a
// dispose-and-free of the whole node, applied on eject. Each manual
// structure owns one of these.

namespace reclaim::structures {

template <class Backend>
class ManualDomain {
 public:
  explicit ManualDomain(const BackendConfig& cfg = {}) : ar_(cfg) {}

  AcquireRetire<Backend>& ar() { return ar_; }

  void retire(Handle h) {
    ar_.retire(h);
    drain();
  }

  void drain() {
    while (auto h = ar_.eject()) {
      dispose_managed(*h);
      free_managed(*h);
    }
  }

  // Quiescent-only teardown of everything still pending.
  std::size_t collect_all() {
    std::vector<Handle> out;
    ar_.collect_ready(out);
    for (Handle h : out) {
      dispose_managed(h);
      free_managed(h);
    }
    return out.size();
  }

  std::size_t pending_total() const { return ar_.pending_total(); }

 private:
  AcquireRetire<Backend> ar_;
};

}  // namespace reclaim::structures
