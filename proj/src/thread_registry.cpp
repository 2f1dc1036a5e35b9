#include "reclaim/thread_registry.hpp"

#include <atomic>
#include <mutex>

namespace reclaim {
namespace {

struct RegistryState {
  std::mutex mu;
  std::uint32_t max_threads = ThreadRegistry::kDefaultMaxThreads;
  bool frozen = false;  // set once the first id is handed out
  std::vector<std::uint32_t> free_ids;
  std::uint32_t next_fresh = 0;
  std::atomic<std::uint32_t> high_water{0};
};

RegistryState& state() {
  static RegistryState s;
  return s;
}

struct Registration {
  std::uint32_t id = 0;
  bool active = false;
  ~Registration() {
    if (active) ThreadRegistry::release_id(id);
  }
};

thread_local Registration tl_registration;
thread_local std::uint32_t tl_override_id = 0;
thread_local bool tl_override_active = false;

}  // namespace

void ThreadRegistry::configure(std::uint32_t max_threads) {
  auto& s = state();
  std::lock_guard lock(s.mu);
  RECLAIM_ASSERT(!s.frozen, "ThreadRegistry::configure after first registration");
  RECLAIM_ASSERT(max_threads > 0, "ThreadRegistry: max_threads must be positive");
  s.max_threads = max_threads;
}

std::uint32_t ThreadRegistry::max_threads() {
  auto& s = state();
  std::lock_guard lock(s.mu);
  return s.max_threads;
}

std::uint32_t ThreadRegistry::acquire_id() {
  auto& s = state();
  std::lock_guard lock(s.mu);
  s.frozen = true;
  std::uint32_t id;
  if (!s.free_ids.empty()) {
    id = s.free_ids.back();
    s.free_ids.pop_back();
  } else {
    RECLAIM_ASSERT(s.next_fresh < s.max_threads, "ThreadRegistry: more than P concurrent threads");
    if (s.next_fresh >= s.max_threads) {
      // keep going in release builds rather than corrupt state
      return s.max_threads - 1;
    }
    id = s.next_fresh++;
    std::uint32_t hw = s.high_water.load(std::memory_order_relaxed);
    if (id + 1 > hw) s.high_water.store(id + 1, std::memory_order_relaxed);
  }
  return id;
}

void ThreadRegistry::release_id(std::uint32_t id) {
  auto& s = state();
  std::lock_guard lock(s.mu);
  s.free_ids.push_back(id);
}

std::uint32_t ThreadRegistry::current_id() {
  if (tl_override_active) return tl_override_id;
  if (!tl_registration.active) {
    tl_registration.id = acquire_id();
    tl_registration.active = true;
  }
  return tl_registration.id;
}

bool ThreadRegistry::is_registered() {
  return tl_override_active || tl_registration.active;
}

std::uint32_t ThreadRegistry::high_water() {
  return state().high_water.load(std::memory_order_acquire);
}

ThreadRegistry::ScopedId::ScopedId(std::uint32_t id)
    : saved_(tl_override_id), saved_active_(tl_override_active) {
  tl_override_id = id;
  tl_override_active = true;
}

ThreadRegistry::ScopedId::~ScopedId() {
  tl_override_id = saved_;
  tl_override_active = saved_active_;
}

ThreadRegistry::ClaimedIds::ClaimedIds(std::uint32_t n) {
  ids_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) ids_.push_back(acquire_id());
}

ThreadRegistry::ClaimedIds::~ClaimedIds() {
  for (auto id : ids_) release_id(id);
}

}  // namespace reclaim
