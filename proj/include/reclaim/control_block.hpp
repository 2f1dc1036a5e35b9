#pragma once

#include <cstddef>
#include <cstdint>
#include <new>
#include <type_traits>
#include <utility>

#include "reclaim/handle.hpp"
#include "reclaim/ledger.hpp"
#include "reclaim/sticky_counter.hpp"

// Every managed allocation is laid out as [ControlHeader | payload], with
// the payload at a fixed offset so the header is recoverable from a
// canonical Handle. The header carries the strong and weak sticky
// counters, the backend birth stamp (used by IBR) and the type-erased
// payload destructor. Manual (non-reference-counted) builds use the same
// layout and simply never touch the counters.

namespace reclaim {

struct alignas(16) ControlHeader {
  StickyCounter strong;
  StickyCounter weak;
  std::uint64_t birth_epoch;
  void (*dispose_payload)(Handle);  // runs the payload destructor in place
  std::uint32_t alloc_size;
  std::uint32_t reserved = 0;

  ControlHeader(std::uint64_t birth, void (*dispose)(Handle), std::uint32_t size)
      : strong(1), weak(1), birth_epoch(birth), dispose_payload(dispose), alloc_size(size) {}
};

inline constexpr std::size_t kPayloadOffset = 48;
static_assert(sizeof(ControlHeader) <= kPayloadOffset);
static_assert(alignof(ControlHeader) == 16);

inline ControlHeader& header_of(Handle h) {
  return *reinterpret_cast<ControlHeader*>(h.canonical().bits - kPayloadOffset);
}

namespace detail {

template <class T>
void dispose_payload_impl(Handle h) {
  h.as<T>()->~T();
}

}  // namespace detail

// Allocates a managed [header | T] block. Both counters start at 1: the
// strong unit belongs to the creating reference, the weak unit is the
// "+1 while strong > 0" unit of the weak-count rule.
template <class T, class... Args>
Handle allocate_managed(std::uint64_t birth_epoch, Args&&... args) {
  static_assert(alignof(T) <= 16, "payload alignment beyond 16 is unsupported");
  static_assert(sizeof(T) >= sizeof(std::uint64_t),
                "payload must be at least one word (poison canary)");
  const std::size_t size = kPayloadOffset + sizeof(T);
  void* raw = ::operator new(size, std::align_val_t{16});
  new (raw) ControlHeader(birth_epoch, &detail::dispose_payload_impl<T>,
                          static_cast<std::uint32_t>(size));
  void* payload = static_cast<char*>(raw) + kPayloadOffset;
  try {
    new (payload) T(std::forward<Args>(args)...);
  } catch (...) {
    ::operator delete(raw, std::align_val_t{16});
    throw;
  }
  ledger::on_alloc(size);
  return Handle{payload};
}

// Destroys the payload and stamps the poison canary. Does not free.
inline void dispose_managed(Handle h) {
  auto& hdr = header_of(h);
  hdr.dispose_payload(h.canonical());
  ledger::stamp_poison(h.canonical());
  ledger::on_dispose();
}

// Frees the whole allocation (header + payload). The payload must already
// have been disposed.
inline void free_managed(Handle h) {
  auto& hdr = header_of(h);
  const std::size_t size = hdr.alloc_size;
  hdr.~ControlHeader();
  ::operator delete(static_cast<void*>(&hdr), std::align_val_t{16});
  ledger::on_free(size);
}

}  // namespace reclaim
