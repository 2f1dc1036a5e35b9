#pragma once

#include <cstdio>
#include <cstdlib>

// Precondition / proper-usage checks. Enabled by default; define
// RECLAIM_NO_DEBUG_ASSERTS (or build with -DRECLAIM_NO_DEBUG_ASSERTS)
// to compile them out for benchmarking builds.
//
// Tests can install a handler that throws instead of aborting, so that
// precondition violations are observable without killing the process.

namespace reclaim::detail {

using assert_handler_t = void (*)(const char* msg, const char* file, int line);

inline assert_handler_t& assert_handler() {
  static assert_handler_t handler = nullptr;
  return handler;
}

inline void set_assert_handler(assert_handler_t h) { assert_handler() = h; }

[[noreturn]] inline void default_assert_fail(const char* msg, const char* file, int line) {
  std::fprintf(stderr, "reclaim: assertion failed: %s (%s:%d)\n", msg, file, line);
  std::abort();
}

inline void assert_fail(const char* msg, const char* file, int line) {
  if (auto h = assert_handler()) {
    h(msg, file, line);
    return;  // handler may throw; if it returns we continue (test mode)
  }
  default_assert_fail(msg, file, line);
}

}  // namespace reclaim::detail

#ifndef RECLAIM_NO_DEBUG_ASSERTS
#define RECLAIM_ASSERT(cond, msg)                                   \
  do {                                                              \
    if (!(cond)) ::reclaim::detail::assert_fail(msg, __FILE__, __LINE__); \
  } while (0)
#else
#define RECLAIM_ASSERT(cond, msg) ((void)0)
#endif
