#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Exhaustive interleaving exploration of the sticky counter. Each
// operation is decomposed into its atomic steps (fetch_add, CAS,
// exchange, load) and every step interleaving of small thread programs is
// enumerated. Each history is checked for linearizability against an
// independent value-level sequential model, plus the stickiness and
// exactly-once-zero-credit properties. The model assumes sequential
// consistency.

namespace reclaim::verify {

// Independent sequential specification of the sticky counter: a logical
// value plus a "stuck" bit. Zero becomes absorbing when it is reached by
// a decrement or observed by a load — not at construction, so the
// test-only stored-0 start state can still be incremented before any
// load settles it (mirroring that the zero flag is only ever installed
// by decrement's CAS or load's help CAS).
class SequentialModel {
 public:
  explicit SequentialModel(std::uint64_t initial) : v_(initial) {}

  bool increment_if_not_zero() {
    if (stuck_) return false;
    ++v_;
    return true;
  }

  // Precondition: v >= 1. Returns true iff this decrement reaches zero.
  bool decrement() {
    --v_;
    if (v_ == 0) stuck_ = true;
    return v_ == 0;
  }

  std::uint64_t load() {
    if (v_ == 0) stuck_ = true;
    return v_;
  }

 private:
  std::uint64_t v_;
  bool stuck_ = false;
};

enum class CounterOp : std::uint8_t { inc = 0, dec = 1, load = 2 };

struct ExploreReport {
  std::uint64_t assignments = 0;  // op assignments explored
  std::uint64_t states = 0;       // distinct interleaving states visited
  std::uint64_t linearizability_violations = 0;
  std::uint64_t stickiness_violations = 0;
  std::uint64_t credit_violations = 0;
  bool budget_exhausted = false;  // state budget hit: coverage is partial
  std::string first_violation;    // repro description of the first failure

  bool clean() const {
    return linearizability_violations == 0 && stickiness_violations == 0 &&
           credit_violations == 0;
  }
};

// Exhaustive sweep over every assignment of at most max_ops operations to
// each of max_threads threads (threads may have fewer or zero ops, which
// covers all smaller thread counts), for each start value. Assignments
// whose total decrement count exceeds the start value are skipped: some
// schedule of such an assignment would invoke decrement on a logically
// zero counter, violating its precondition. state_budget = 0 means the
// built-in default cap.
ExploreReport explore_counter(unsigned max_threads, unsigned max_ops,
                              const std::vector<std::uint64_t>& start_values,
                              std::uint64_t state_budget = 0);

struct AssignmentReport {
  std::uint64_t histories = 0;                // complete schedules enumerated
  std::uint64_t help_exchange_histories = 0;  // decrement took the exchange path
  std::uint64_t linearizability_violations = 0;
  std::uint64_t stickiness_violations = 0;
  std::uint64_t credit_violations = 0;

  bool clean() const {
    return linearizability_violations == 0 && stickiness_violations == 0 &&
           credit_violations == 0;
  }
};

// Full path enumeration (no state merging) of one fixed assignment, so
// tests can count schedules. Intended for tiny programs only.
AssignmentReport explore_assignment(std::uint64_t start,
                                    const std::vector<std::vector<CounterOp>>& programs);

}  // namespace reclaim::verify
