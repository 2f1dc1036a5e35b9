#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "reclaim/sticky_counter.hpp"
#include "reclaim/verify/interleave.hpp"

using namespace reclaim::verify;

namespace {
constexpr CounterOp I = CounterOp::inc;
constexpr CounterOp D = CounterOp::dec;
constexpr CounterOp L = CounterOp::load;
}  // namespace

TEST_CASE("single-thread sequences match the sequential model") {
  // Any single-threaded interleaving is the sequential execution; the
  // explorer must find it linearizable with no property violations.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::uint64_t start = 1 + rng() % 3;
    std::vector<CounterOp> prog;
    std::uint64_t decs = 0;
    for (int i = 0; i < 4; ++i) {
      auto op = static_cast<CounterOp>(rng() % 3);
      if (op == D) {
        if (decs == start) op = L;
        else ++decs;
      }
      prog.push_back(op);
    }
    auto rep = explore_assignment(start, {prog});
    CHECK(rep.clean());
    CHECK(rep.histories == 1);
  }
}

TEST_CASE("dec vs load from 1: all interleavings pass, one help-exchange schedule") {
  auto rep = explore_assignment(1, {{D}, {L}});
  CHECK(rep.clean());
  // Step decomposition gives exactly 4 schedules; exactly one drives the
  // decrement through the HELP-flag exchange path.
  CHECK(rep.histories == 4);
  CHECK(rep.help_exchange_histories == 1);
}

TEST_CASE("inc vs dec vs dec from 2: exactly one credited decrement everywhere") {
  auto rep = explore_assignment(2, {{I}, {D}, {D}});
  CHECK(rep.clean());
  CHECK(rep.histories > 0);
}

TEST_CASE("resurrection race: inc linearizes before a slower dec") {
  // dec performs its FAA first (1 -> 0), the inc then fetch_adds 0 -> 1
  // and succeeds; the dec's CAS fails and it reports false. Linearizable
  // only with the inc ordered first — the monitor must accept it.
  auto rep = explore_assignment(1, {{D}, {I}});
  CHECK(rep.clean());
}

TEST_CASE("loads after zero stay zero") {
  auto rep = explore_assignment(1, {{D, L}, {L, L}});
  CHECK(rep.clean());
}

TEST_CASE("explorer sweep at reduced bounds is exhaustive and clean") {
  auto rep = explore_counter(2, 2, {0, 1, 2});
  CHECK_FALSE(rep.budget_exhausted);
  CHECK(rep.clean());
  CHECK(rep.assignments > 0);
  INFO(rep.first_violation);
  CHECK(rep.first_violation.empty());
}

TEST_CASE("explorer detects injected misbehavior") {
  // Sanity that the oracle can fail: a history from start=2 with two
  // decrements must credit exactly one; corrupt expectations by running
  // three decrements against start=2 through the raw enumerator. The
  // assignment filter normally forbids this; calling explore_assignment
  // directly exposes the precondition violation as a monitor failure.
  auto rep = explore_assignment(1, {{D}, {D}});
  CHECK_FALSE(rep.clean());
}

TEST_CASE("full acceptance-scale sweep parameters are accepted") {
  // The 5-minute full sweep lives in the acceptance binary; here we only
  // check the entry point validates its bounds.
  auto rep = explore_counter(3, 4, {}, 1000);
  CHECK(rep.assignments == 0);
  auto bad = explore_counter(4, 4, {0});
  CHECK_FALSE(bad.clean());
}
