#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "reclaim/handle.hpp"

namespace reclaim {

enum class BackendKind { ebr, ibr, hp };

struct BackendConfig {
  // Allocations per global-epoch advance; 0 picks the backend default
  // (10 for ebr, 40 for ibr; ignored by hp).
  std::uint32_t epoch_freq = 0;
  // K: try_acquire announcement slots per thread (hp only).
  std::uint32_t hp_slots = 8;
  // Retired-list length above which a lazy eject() actually scans;
  // 0 picks the backend default (always scan for ebr/ibr, 2*P*(K+1) for hp).
  std::uint32_t scan_threshold = 0;
};

inline BackendKind parse_backend_name(const std::string& name) {
  if (name == "ebr") return BackendKind::ebr;
  if (name == "ibr") return BackendKind::ibr;
  if (name == "hp") return BackendKind::hp;
  if (name == "hyaline") throw std::invalid_argument("backend not implemented: hyaline");
  throw std::invalid_argument("unknown backend: " + name);
}

inline const char* backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::ebr: return "ebr";
    case BackendKind::ibr: return "ibr";
    case BackendKind::hp: return "hp";
  }
  return "?";
}

// Token proving a handle is protected. Released at most once; region
// backends use it purely as a bookkeeping value, slot backends carry the
// announcement slot index.
struct Guard {
  enum class Kind : std::uint8_t { plain, multi };

  std::uint32_t slot = 0;
  Kind kind = Kind::multi;
  bool engaged = false;

  Guard() = default;
  Guard(std::uint32_t s, Kind k) : slot(s), kind(k), engaged(true) {}
  Guard(Guard&& o) noexcept : slot(o.slot), kind(o.kind), engaged(o.engaged) {
    o.engaged = false;
  }
  Guard& operator=(Guard&& o) noexcept {
    slot = o.slot;
    kind = o.kind;
    engaged = o.engaged;
    o.engaged = false;
    return *this;
  }
  Guard(const Guard&) = delete;
  Guard& operator=(const Guard&) = delete;
};

// One queued deferred action: a retired handle plus the backend timestamps
// needed to decide when it is no longer protected.
struct RetiredEntry {
  Handle handle;
  std::uint64_t birth;
  std::uint64_t stamp;
};

using PendingList = std::deque<RetiredEntry>;

}  // namespace reclaim
