#pragma once

#include <cstdint>
#include <vector>

#include "reclaim/assert.hpp"

// Process-wide registry handing out stable small thread ids in [0, P).
// Ids are recycled when a thread exits. All backend announcement arrays
// are indexed by these ids; scans iterate up to high_water(), the largest
// id ever handed out plus one.

namespace reclaim {

class ThreadRegistry {
 public:
  static constexpr std::uint32_t kDefaultMaxThreads = 128;

  // Must be called before the first registration to change P.
  static void configure(std::uint32_t max_threads);
  static std::uint32_t max_threads();

  // Registers the calling thread on first use.
  static std::uint32_t current_id();
  static bool is_registered();

  // One past the largest id ever handed out.
  static std::uint32_t high_water();

  // Test/simulation support: make current_id() report a specific id on this
  // thread while the object is alive. The ids themselves should be claimed
  // via ClaimedIds so that they are marked in use.
  class ScopedId {
   public:
    explicit ScopedId(std::uint32_t id);
    ~ScopedId();
    ScopedId(const ScopedId&) = delete;
    ScopedId& operator=(const ScopedId&) = delete;

   private:
    std::uint32_t saved_;
    bool saved_active_;
  };

  // Claims n fresh ids (for simulated threads); releases them on destruction.
  class ClaimedIds {
   public:
    explicit ClaimedIds(std::uint32_t n);
    ~ClaimedIds();
    ClaimedIds(const ClaimedIds&) = delete;
    ClaimedIds& operator=(const ClaimedIds&) = delete;
    std::uint32_t operator[](std::size_t i) const { return ids_[i]; }
    std::size_t size() const { return ids_.size(); }

   private:
    std::vector<std::uint32_t> ids_;
  };

  // Registration plumbing, public for the thread-exit hook.
  static std::uint32_t acquire_id();
  static void release_id(std::uint32_t id);
};

}  // namespace reclaim
