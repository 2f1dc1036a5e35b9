#include "reclaim/verify/interleave.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <sstream>
#include <tuple>
#include <unordered_set>

// Step-level exploration of the sticky counter. The implementation's
// operations decompose into at most three shared-memory steps each:
//
//   increment_if_not_zero:  [FAA]
//   decrement:              [FAA] ([CAS 0->ZERO] ([exchange ZERO]))
//   load:                   [read] ([CAS 0->ZERO|HELP])
//
// The explorer replays these steps under every schedule and feeds each
// operation's invocation and response into a linearizability monitor: a
// set of sequential-model configurations, where a pending operation may
// linearize at any point between its invocation and its response. A
// history is linearizable iff the configuration set stays nonempty.

namespace reclaim::verify {
namespace {

constexpr std::uint64_t kZero = 1ull << 63;
constexpr std::uint64_t kHelp = 1ull << 62;

// --- thread program encoding ---------------------------------------------
// prog: bits 0..2 = remaining length, then 2 bits per op in execution
// order starting at bit 3. Max 4 ops -> 11 bits.

using Prog = std::uint16_t;

Prog pack_program(const std::vector<CounterOp>& ops) {
  Prog p = static_cast<Prog>(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    p = static_cast<Prog>(p | (static_cast<Prog>(ops[i]) << (3 + 2 * i)));
  }
  return p;
}

unsigned prog_len(Prog p) { return p & 7; }
CounterOp prog_head(Prog p) { return static_cast<CounterOp>((p >> 3) & 3); }

Prog prog_pop(Prog p) {
  unsigned len = prog_len(p);
  Prog ops = static_cast<Prog>((p >> 5) << 3);  // shift ops down one slot
  return static_cast<Prog>(ops | (len - 1));
}

// --- linearizability-monitor configuration encoding -----------------------
// Config: bits 0..5 = sequential-model value, bit 7 = the model's stuck
// flag; per thread t, 6 bits at 8 + 6t: status (2 bits: 0 = no pending
// op, 1 = pending un-linearized, 2 = linearized) then the recorded
// result (4 bits).

using Config = std::uint32_t;

unsigned cfg_value(Config c) { return c & 0x3F; }
bool cfg_stuck(Config c) { return (c & 0x80) != 0; }
unsigned cfg_status(Config c, int t) { return (c >> (8 + 6 * t)) & 3; }
unsigned cfg_result(Config c, int t) { return (c >> (10 + 6 * t)) & 15; }

Config cfg_with_value(Config c, unsigned v, bool stuck) {
  return (c & ~0xFFu) | v | (stuck ? 0x80u : 0u);
}

Config cfg_set(Config c, int t, unsigned status, unsigned result) {
  Config mask = 0x3Fu << (8 + 6 * t);
  Config field = (status | (result << 2)) << (8 + 6 * t);
  return (c & ~mask) | field;
}

void sort_unique(std::vector<Config>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// --- explorer state -------------------------------------------------------

struct ThreadState {
  Prog prog = 0;
  std::uint8_t phase = 0;  // 0 between steps; 1 dec-CAS; 2 dec-exchange; 3 load-CAS

  bool active() const { return prog_len(prog) > 0 || phase != 0; }
  friend bool operator<(ThreadState a, ThreadState b) {
    return std::tie(a.prog, a.phase) < std::tie(b.prog, b.phase);
  }
  friend bool operator==(ThreadState a, ThreadState b) {
    return a.prog == b.prog && a.phase == b.phase;
  }
};

struct State {
  std::uint64_t word = 0;
  bool zero_observed = false;  // some completed load has returned 0
  std::uint8_t credited = 0;   // decrements credited with reaching zero
  std::array<ThreadState, 3> ts;
  std::vector<Config> configs;  // sorted, unique
};

// Once the zero flag is set no decrement can still perform its FAA (all
// decrements have; see the assignment filter), so the low junk bits left
// by failed post-zero increments are behaviorally inert and can be
// canonicalized away. This collapses the post-zero state space.
void canonicalize_word(std::uint64_t& w) {
  if (w & kZero) w &= kZero | kHelp;
}

enum class Violation { linearizability, stickiness, credit };

struct Ctx {
  bool memoize = false;
  std::uint64_t start = 0;
  const std::vector<std::vector<CounterOp>>* programs = nullptr;
  std::vector<std::uint8_t> trace;
  std::unordered_set<std::string>* visited = nullptr;
  std::uint64_t budget = 0;
  bool budget_exhausted = false;
  bool help_on_path = false;

  std::uint64_t histories = 0;
  std::uint64_t help_histories = 0;
  std::uint64_t lin_violations = 0;
  std::uint64_t stick_violations = 0;
  std::uint64_t credit_violations = 0;
  std::string first_violation;
};

const char* op_name(CounterOp op) {
  switch (op) {
    case CounterOp::inc: return "inc";
    case CounterOp::dec: return "dec";
    default: return "load";
  }
}

void record_violation(Ctx& ctx, Violation kind) {
  const char* name = kind == Violation::linearizability ? "linearizability"
                     : kind == Violation::stickiness    ? "stickiness"
                                                        : "zero-credit";
  switch (kind) {
    case Violation::linearizability: ++ctx.lin_violations; break;
    case Violation::stickiness: ++ctx.stick_violations; break;
    case Violation::credit: ++ctx.credit_violations; break;
  }
  if (!ctx.first_violation.empty()) return;
  std::ostringstream os;
  os << name << " violation, start=" << ctx.start << ", programs=[";
  for (std::size_t t = 0; t < ctx.programs->size(); ++t) {
    if (t) os << " | ";
    const auto& p = (*ctx.programs)[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) os << ",";
      os << op_name(p[i]);
    }
  }
  os << "], schedule=";
  for (auto t : ctx.trace) os << static_cast<int>(t);
  ctx.first_violation = os.str();
}

// --- monitor --------------------------------------------------------------

void monitor_invoke(State& s, int t) {
  for (auto& c : s.configs) c = cfg_set(c, t, 1, 0);
  sort_unique(s.configs);
}

// Closes the configuration set under linearizing any pending operation.
void monitor_closure(State& s) {
  auto& work = s.configs;
  for (std::size_t i = 0; i < work.size(); ++i) {
    Config c = work[i];
    for (int t = 0; t < 3; ++t) {
      if (cfg_status(c, t) != 1) continue;
      CounterOp op = prog_head(s.ts[t].prog);
      unsigned v = cfg_value(c);
      bool stuck = cfg_stuck(c);
      unsigned v2 = v, res = 0;
      bool stuck2 = stuck;
      switch (op) {
        case CounterOp::inc:
          if (!stuck) { v2 = v + 1; res = 1; }
          break;
        case CounterOp::dec:
          if (v == 0) continue;  // precondition: no legal linearization here
          v2 = v - 1;
          res = (v2 == 0) ? 1 : 0;
          if (v2 == 0) stuck2 = true;
          break;
        case CounterOp::load:
          res = v;
          if (v == 0) stuck2 = true;
          break;
      }
      Config n = cfg_set(cfg_with_value(c, v2, stuck2), t, 2, res);
      if (std::find(work.begin(), work.end(), n) == work.end()) work.push_back(n);
    }
  }
  sort_unique(work);
}

// Returns false (and records a violation) if the path is dead.
bool monitor_respond(State& s, int t, CounterOp op, unsigned actual, Ctx& ctx) {
  monitor_closure(s);
  std::vector<Config> kept;
  for (Config c : s.configs) {
    if (cfg_status(c, t) == 2 && cfg_result(c, t) == actual) {
      kept.push_back(cfg_set(c, t, 0, 0));
    }
  }
  if (kept.empty()) {
    record_violation(ctx, Violation::linearizability);
    return false;
  }
  sort_unique(kept);
  s.configs = std::move(kept);

  if (s.zero_observed &&
      ((op == CounterOp::load && actual > 0) || (op == CounterOp::inc && actual == 1))) {
    record_violation(ctx, Violation::stickiness);
    return false;
  }
  if (op == CounterOp::load && actual == 0) s.zero_observed = true;
  if (op == CounterOp::dec && actual == 1 && ++s.credited > 1) {
    record_violation(ctx, Violation::credit);
    return false;
  }
  return true;
}

// --- step machine ---------------------------------------------------------

bool finish_op(State& s, int t, CounterOp op, unsigned actual, Ctx& ctx) {
  if (!monitor_respond(s, t, op, actual, ctx)) return false;
  s.ts[t].prog = prog_pop(s.ts[t].prog);
  s.ts[t].phase = 0;
  return true;
}

// Applies one atomic step of thread t. Returns false if the path was
// pruned by a violation.
bool apply_step(State& s, int t, Ctx& ctx) {
  ThreadState& th = s.ts[t];
  std::uint64_t& w = s.word;
  if (th.phase == 0) {
    CounterOp op = prog_head(th.prog);
    monitor_invoke(s, t);
    switch (op) {
      case CounterOp::inc: {
        std::uint64_t old = w;
        w += 1;
        canonicalize_word(w);
        return finish_op(s, t, op, (old & kZero) == 0 ? 1 : 0, ctx);
      }
      case CounterOp::dec: {
        std::uint64_t old = w;
        w -= 1;
        if (old != 1) return finish_op(s, t, op, 0, ctx);
        th.phase = 1;
        return true;
      }
      default: {  // load
        std::uint64_t val = w;
        if (val == 0) {
          th.phase = 3;
          return true;
        }
        unsigned res = (val & kZero) ? 0 : static_cast<unsigned>(val);
        return finish_op(s, t, op, res, ctx);
      }
    }
  }
  if (th.phase == 1) {  // dec: CAS(0 -> ZERO)
    if (w == 0) {
      w = kZero;
      return finish_op(s, t, CounterOp::dec, 1, ctx);
    }
    std::uint64_t e = w;
    if (e & kHelp) {
      th.phase = 2;
      return true;
    }
    return finish_op(s, t, CounterOp::dec, 0, ctx);
  }
  if (th.phase == 2) {  // dec: exchange(ZERO), the help path
    std::uint64_t old = w;
    w = kZero;
    ctx.help_on_path = true;
    return finish_op(s, t, CounterOp::dec, (old & kHelp) ? 1 : 0, ctx);
  }
  // phase 3 — load: CAS(0 -> ZERO|HELP); on failure rereads and returns
  if (w == 0) {
    w = kZero | kHelp;
    return finish_op(s, t, CounterOp::load, 0, ctx);
  }
  std::uint64_t val = w;
  unsigned res = (val & kZero) ? 0 : static_cast<unsigned>(val);
  return finish_op(s, t, CounterOp::load, res, ctx);
}

// --- canonicalization + memo key ------------------------------------------

void canonicalize(State& s) {
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return s.ts[a] < s.ts[b]; });
  if (order != std::array<int, 3>{0, 1, 2}) {
    std::array<ThreadState, 3> nts;
    for (int i = 0; i < 3; ++i) nts[i] = s.ts[order[i]];
    for (auto& c : s.configs) {
      Config n = cfg_with_value(0, cfg_value(c), cfg_stuck(c));
      for (int i = 0; i < 3; ++i) {
        n = cfg_set(n, i, cfg_status(c, order[i]), cfg_result(c, order[i]));
      }
      c = n;
    }
    s.ts = nts;
    sort_unique(s.configs);
  }
}

std::string serialize(const State& s) {
  std::string key;
  key.reserve(8 + 4 * s.configs.size());
  std::uint8_t wb = static_cast<std::uint8_t>((s.word & 0x3F) |
                                              ((s.word & kHelp) ? 0x40 : 0) |
                                              ((s.word & kZero) ? 0x80 : 0));
  key.push_back(static_cast<char>(wb));
  key.push_back(static_cast<char>(s.zero_observed | (s.credited << 1)));
  for (const auto& t : s.ts) {
    std::uint16_t v = static_cast<std::uint16_t>(t.prog | (t.phase << 11));
    key.push_back(static_cast<char>(v & 0xFF));
    key.push_back(static_cast<char>(v >> 8));
  }
  for (Config c : s.configs) {
    for (int i = 0; i < 4; ++i) key.push_back(static_cast<char>((c >> (8 * i)) & 0xFF));
  }
  return key;
}

// --- search ---------------------------------------------------------------

void terminal(const State& s, Ctx& ctx) {
  std::uint64_t logical = (s.word & kZero) ? 0 : s.word;
  std::uint8_t expected = (ctx.start > 0 && logical == 0) ? 1 : 0;
  if (s.credited != expected) {
    record_violation(ctx, Violation::credit);
    return;
  }
  ++ctx.histories;
  if (ctx.help_on_path) ++ctx.help_histories;
}

void explore(State& s, Ctx& ctx) {
  if (ctx.budget_exhausted) return;
  if (ctx.memoize) {
    canonicalize(s);
    if (!ctx.visited->insert(serialize(s)).second) return;
    if (ctx.visited->size() >= ctx.budget) {
      ctx.budget_exhausted = true;
      return;
    }
  }
  bool any_active = false;
  for (int t = 0; t < 3; ++t) {
    if (!s.ts[t].active()) continue;
    any_active = true;
    State next = s;
    bool saved_help = ctx.help_on_path;
    ctx.trace.push_back(static_cast<std::uint8_t>(t));
    if (apply_step(next, t, ctx)) explore(next, ctx);
    ctx.trace.pop_back();
    ctx.help_on_path = saved_help;
  }
  if (!any_active) terminal(s, ctx);
}

State make_root(std::uint64_t start, const std::vector<std::vector<CounterOp>>& programs) {
  State s;
  s.word = start;
  for (std::size_t t = 0; t < programs.size() && t < 3; ++t) {
    s.ts[t].prog = pack_program(programs[t]);
  }
  s.configs = {cfg_with_value(0, static_cast<unsigned>(start), false)};
  return s;
}

}  // namespace

ExploreReport explore_counter(unsigned max_threads, unsigned max_ops,
                              const std::vector<std::uint64_t>& start_values,
                              std::uint64_t state_budget) {
  ExploreReport report;
  if (max_threads > 3 || max_ops > 4) {
    report.first_violation = "explorer bound exceeded: supports <=3 threads x <=4 ops";
    ++report.linearizability_violations;
    return report;
  }
  if (state_budget == 0) state_budget = 60'000'000;

  // All op sequences of length 0..max_ops, with their decrement counts.
  std::vector<std::vector<CounterOp>> programs{{}};
  for (unsigned len = 1; len <= max_ops; ++len) {
    std::size_t begin = 0, end = programs.size();
    // extend every sequence of length len-1 (they sit at the tail)
    for (std::size_t i = begin; i < end; ++i) {
      if (programs[i].size() != len - 1) continue;
      for (int op = 0; op < 3; ++op) {
        auto seq = programs[i];
        seq.push_back(static_cast<CounterOp>(op));
        programs.push_back(std::move(seq));
      }
    }
  }
  std::vector<unsigned> dec_count(programs.size(), 0);
  for (std::size_t i = 0; i < programs.size(); ++i) {
    for (auto op : programs[i]) {
      if (op == CounterOp::dec) ++dec_count[i];
    }
  }

  std::unordered_set<std::string> visited;
  for (std::uint64_t start : start_values) {
    visited.clear();
    const std::size_t n = programs.size();

    auto run_assignment = [&](const std::vector<std::size_t>& idx) {
      unsigned decs = 0;
      for (auto i : idx) decs += dec_count[i];
      if (decs > start) return;
      std::vector<std::vector<CounterOp>> assignment;
      assignment.reserve(idx.size());
      for (auto i : idx) assignment.push_back(programs[i]);

      Ctx ctx;
      ctx.memoize = true;
      ctx.start = start;
      ctx.programs = &assignment;
      ctx.visited = &visited;
      ctx.budget = state_budget;
      State root = make_root(start, assignment);
      explore(root, ctx);

      ++report.assignments;
      report.linearizability_violations += ctx.lin_violations;
      report.stickiness_violations += ctx.stick_violations;
      report.credit_violations += ctx.credit_violations;
      if (report.first_violation.empty() && !ctx.first_violation.empty()) {
        report.first_violation = ctx.first_violation;
      }
      if (ctx.budget_exhausted) report.budget_exhausted = true;
    };

    // Thread symmetry: enumerate non-decreasing index tuples (the empty
    // program is included, covering all smaller thread counts).
    for (std::size_t i = 0; i < n && !report.budget_exhausted; ++i) {
      if (max_threads == 1) {
        run_assignment({i});
        continue;
      }
      for (std::size_t j = i; j < n && !report.budget_exhausted; ++j) {
        if (max_threads == 2) {
          run_assignment({i, j});
          continue;
        }
        for (std::size_t k = j; k < n && !report.budget_exhausted; ++k) {
          run_assignment({i, j, k});
        }
      }
    }
    report.states += visited.size();
    if (report.budget_exhausted) break;
  }
  return report;
}

AssignmentReport explore_assignment(std::uint64_t start,
                                    const std::vector<std::vector<CounterOp>>& programs) {
  AssignmentReport report;
  Ctx ctx;
  ctx.memoize = false;
  ctx.start = start;
  ctx.programs = &programs;
  State root = make_root(start, programs);
  explore(root, ctx);
  report.histories = ctx.histories;
  report.help_exchange_histories = ctx.help_histories;
  report.linearizability_violations = ctx.lin_violations;
  report.stickiness_violations = ctx.stick_violations;
  report.credit_violations = ctx.credit_violations;
  return report;
}

}  // namespace reclaim::verify
