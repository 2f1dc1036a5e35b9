#pragma once

#include <cstdint>
#include <functional>

namespace reclaim {

// Address-sized identifier of a managed allocation's payload. The low two
// bits are reserved for data-structure mark/tag flags; all protection and
// retirement bookkeeping operates on the canonical (mask-cleared) value.
struct Handle {
  static constexpr std::uintptr_t kMarkMask = 0x3;

  std::uintptr_t bits = 0;

  constexpr Handle() = default;
  constexpr explicit Handle(std::uintptr_t b) : bits(b) {}
  explicit Handle(const void* p) : bits(reinterpret_cast<std::uintptr_t>(p)) {}

  [[nodiscard]] constexpr Handle canonical() const { return Handle{bits & ~kMarkMask}; }
  [[nodiscard]] constexpr std::uintptr_t marks() const { return bits & kMarkMask; }
  [[nodiscard]] constexpr Handle with_marks(std::uintptr_t m) const {
    return Handle{(bits & ~kMarkMask) | (m & kMarkMask)};
  }

  [[nodiscard]] constexpr bool is_null() const { return (bits & ~kMarkMask) == 0; }
  constexpr explicit operator bool() const { return !is_null(); }

  template <class T>
  [[nodiscard]] T* as() const {
    return reinterpret_cast<T*>(bits & ~kMarkMask);
  }

  friend constexpr bool operator==(Handle a, Handle b) { return a.bits == b.bits; }
  friend constexpr bool operator!=(Handle a, Handle b) { return a.bits != b.bits; }
};

inline constexpr Handle kNullHandle{};

}  // namespace reclaim

template <>
struct std::hash<reclaim::Handle> {
  std::size_t operator()(reclaim::Handle h) const noexcept {
    return std::hash<std::uintptr_t>{}(h.bits);
  }
};
