#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>

// A wait-free atomic counter whose zero state is absorbing ("sticky"):
// once the counter is observed at zero it can never be incremented back
// up, and increment_if_not_zero reports the failure. Supports a
// linearizable constant-time load.
//
// The top two bits of the word are bookkeeping flags: the highest bit
// marks the counter as (stuck at) zero, the second-highest is a helper
// bit set by a load that installed the zero flag on behalf of a racing
// decrement. Any stored value with the zero flag set reads as logical 0.
// Logical values are therefore confined to [0, 2^62).

namespace reclaim {

class StickyCounter {
 public:
  static constexpr std::uint64_t kZeroFlag = 1ull << 63;
  static constexpr std::uint64_t kHelpFlag = 1ull << 62;
  static constexpr std::uint64_t kMaxValue = kHelpFlag - 1;

  explicit StickyCounter(std::uint64_t initial) : word_(initial) {
    if (initial > kMaxValue) {
      throw std::invalid_argument("StickyCounter: initial value exceeds 2^62 - 1");
    }
  }

  StickyCounter(const StickyCounter&) = delete;
  StickyCounter& operator=(const StickyCounter&) = delete;

  // Returns true and increments iff the counter was logically nonzero.
  // A post-zero call may still bump the low bits; the zero flag keeps the
  // logical value at 0.
  bool increment_if_not_zero() {
    auto val = word_.fetch_add(1);
    return (val & kZeroFlag) == 0;
  }

  // Returns true iff this call is uniquely credited with bringing the
  // counter to zero: either its CAS installs the zero flag, or it removes
  // a help flag installed by a concurrent load.
  bool decrement() {
    if (word_.fetch_sub(1) == 1) {
      std::uint64_t expected = 0;
      if (word_.compare_exchange_strong(expected, kZeroFlag)) return true;
      if ((expected & kHelpFlag) && (word_.exchange(kZeroFlag) & kHelpFlag)) return true;
    }
    return false;
  }

  // Linearizable read of the logical value. A read of physical 0 helps a
  // pending decrement by installing zero|help before reporting 0.
  std::uint64_t load() const {
    auto val = word_.load();
    if (val == 0 && word_.compare_exchange_strong(val, kZeroFlag | kHelpFlag)) return 0;
    return (val & kZeroFlag) ? 0 : val;
  }

  // Raw physical word, for tests.
  std::uint64_t raw() const { return word_.load(); }

 private:
  mutable std::atomic<std::uint64_t> word_;
};

}  // namespace reclaim
