#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reclaim/acquire_retire.hpp"
#include "reclaim/control_block.hpp"
#include "reclaim/thread_registry.hpp"

// Bounded-schedule contract checking for the acquire-retire interface.
//
// A ContractRunner executes a deterministic interleaving of per-thread
// actions on one real thread (simulated thread identities via
// ThreadRegistry::ScopedId), logging every acquire/release/retire/eject
// with a global step stamp. The log is then checked against the
// acquire-retire sequential specification:
//
//   For every f mapping each acquire returning p to a later retire(p) or
//   bottom, there exists an injective g mapping each eject returning p to
//   an earlier retire(p), such that whenever f(A) = g(E) the acquire A is
//   inactive by the time eject E executes.
//
// The universal over f is checked by enumeration (the adversary tries
// every assignment of acquires to later retires); the existential over g
// by maximum bipartite matching. Schedules are small, so both are cheap.

namespace reclaim::verify {

inline constexpr std::uint64_t kOpenRelease = std::numeric_limits<std::uint64_t>::max();

struct AcquireEvent {
  std::uint64_t t_invoke;
  std::uint64_t t_release = kOpenRelease;
  Handle handle;
};

struct TimedEvent {
  std::uint64_t t;
  Handle handle;
};

struct ContractLog {
  std::vector<AcquireEvent> acquires;  // plain + successful try_acquires
  std::vector<TimedEvent> retires;
  std::vector<TimedEvent> ejects;
};

// #ejects(h) <= #retires(h) at every prefix of the history.
inline bool check_multiplicity(const ContractLog& log, std::string* diag = nullptr) {
  struct Ev {
    std::uint64_t t;
    Handle h;
    bool is_eject;
  };
  std::vector<Ev> evs;
  for (const auto& r : log.retires) evs.push_back({r.t, r.handle, false});
  for (const auto& e : log.ejects) evs.push_back({e.t, e.handle, true});
  std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
  std::vector<std::pair<Handle, std::int64_t>> counts;
  auto slot = [&](Handle h) -> std::int64_t& {
    for (auto& [k, v] : counts) {
      if (k == h.canonical()) return v;
    }
    counts.emplace_back(h.canonical(), 0);
    return counts.back().second;
  };
  for (const auto& ev : evs) {
    auto& c = slot(ev.h);
    c += ev.is_eject ? -1 : 1;
    if (c < 0) {
      if (diag) {
        std::ostringstream os;
        os << "multiplicity violation: eject at t=" << ev.t
           << " exceeds prior retires of handle " << ev.h.canonical().bits;
        *diag = os.str();
      }
      return false;
    }
  }
  return true;
}

namespace detail {

// Kuhn's augmenting-path maximum matching: ejects on the left, retires on
// the right, allowed[i] = retire indices usable by eject i.
inline bool perfect_matching(const std::vector<std::vector<int>>& allowed, std::size_t retires) {
  std::vector<int> match_of_retire(retires, -1);
  std::vector<char> visited;
  std::function<bool(int)> augment = [&](int e) -> bool {
    for (int r : allowed[e]) {
      if (visited[r]) continue;
      visited[r] = 1;
      if (match_of_retire[r] < 0 || augment(match_of_retire[r])) {
        match_of_retire[r] = e;
        return true;
      }
    }
    return false;
  };
  for (std::size_t e = 0; e < allowed.size(); ++e) {
    visited.assign(retires, 0);
    if (!augment(static_cast<int>(e))) return false;
  }
  return true;
}

}  // namespace detail

// Definition-3 check: for all f, exists injective g.
inline bool check_definition3(const ContractLog& log, std::string* diag = nullptr) {
  const auto& acqs = log.acquires;
  const auto& rets = log.retires;
  const auto& ejs = log.ejects;

  // Options for f per acquire: -1 (bottom) or a later retire of its handle.
  std::vector<std::vector<int>> f_options(acqs.size());
  std::uint64_t product = 1;
  auto ever_ejected = [&](Handle h) {
    for (const auto& e : ejs) {
      if (e.handle.canonical() == h.canonical()) return true;
    }
    return false;
  };
  for (std::size_t a = 0; a < acqs.size(); ++a) {
    f_options[a].push_back(-1);
    // Mapping an acquire to a retire only constrains ejects of the same
    // handle; acquires of never-ejected handles can stay at bottom.
    if (acqs[a].handle.canonical() && ever_ejected(acqs[a].handle)) {
      for (std::size_t r = 0; r < rets.size(); ++r) {
        if (rets[r].handle.canonical() == acqs[a].handle.canonical() &&
            rets[r].t > acqs[a].t_invoke) {
          f_options[a].push_back(static_cast<int>(r));
        }
      }
    }
    product *= f_options[a].size();
    if (product > 20'000'000) {
      if (diag) *diag = "definition-3 check: schedule too large to enumerate f";
      return false;
    }
  }

  std::vector<std::size_t> choice(acqs.size(), 0);
  while (true) {
    // retire r is blocked for eject e if some acquire mapped onto r is
    // still active when e executes
    std::vector<std::vector<int>> allowed(ejs.size());
    std::vector<std::vector<int>> mapped_acquires(rets.size());
    for (std::size_t a = 0; a < acqs.size(); ++a) {
      int r = f_options[a][choice[a]];
      if (r >= 0) mapped_acquires[r].push_back(static_cast<int>(a));
    }
    for (std::size_t e = 0; e < ejs.size(); ++e) {
      for (std::size_t r = 0; r < rets.size(); ++r) {
        if (rets[r].handle.canonical() != ejs[e].handle.canonical()) continue;
        if (rets[r].t >= ejs[e].t) continue;
        bool blocked = false;
        for (int a : mapped_acquires[r]) {
          if (acqs[a].t_release >= ejs[e].t) {  // not inactive before e
            blocked = true;
            break;
          }
        }
        if (!blocked) allowed[e].push_back(static_cast<int>(r));
      }
    }
    if (!detail::perfect_matching(allowed, rets.size())) {
      if (diag) {
        std::ostringstream os;
        os << "definition-3 violation: adversarial f = {";
        for (std::size_t a = 0; a < acqs.size(); ++a) {
          if (a) os << ", ";
          os << "A" << a << "->";
          int r = f_options[a][choice[a]];
          if (r < 0) os << "bottom";
          else os << "R" << r;
        }
        os << "} admits no injective eject->retire mapping";
        *diag = os.str();
      }
      return false;
    }
    // next f
    std::size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < f_options[i].size()) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
    if (choice.empty()) break;
  }
  return true;
}

// Deterministic schedule runner over one acquire-retire instance.
template <class AR>
class ContractRunner {
 public:
  using Cell = std::atomic<Handle>;

  ContractRunner(AR& ar, std::uint32_t threads) : ar_(ar), ids_(threads) {}

  ContractRunner(const ContractRunner&) = delete;
  ContractRunner& operator=(const ContractRunner&) = delete;

  ~ContractRunner() {
    // The runner owns every allocation it made; eject never frees, so
    // reclaim them here to keep the ledger balanced.
    for (Handle h : allocated_) {
      dispose_managed(h);
      free_managed(h);
    }
  }

  void begin_cs(std::uint32_t tid) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    ar_.begin_critical_section();
    ++now_;
  }

  void end_cs(std::uint32_t tid) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    ar_.end_critical_section();
    ++now_;
  }

  Handle alloc(std::uint32_t tid, std::uint64_t value = 0) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    Handle h = ar_.template alloc<std::uint64_t>(value);
    allocated_.push_back(h);
    ++now_;
    return h;
  }

  // Plain acquire; returns an index into the log's acquire list.
  std::size_t acquire(std::uint32_t tid, Cell& cell) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    std::uint64_t t = ++now_;
    auto [h, g] = ar_.acquire(cell);
    log_.acquires.push_back({t, kOpenRelease, h.canonical()});
    guards_.push_back(std::move(g));
    guard_tid_.push_back(tid);
    return log_.acquires.size() - 1;
  }

  std::optional<std::size_t> try_acquire(std::uint32_t tid, Cell& cell) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    std::uint64_t t = ++now_;
    auto res = ar_.try_acquire(cell);
    if (!res) return std::nullopt;
    log_.acquires.push_back({t, kOpenRelease, res->first.canonical()});
    guards_.push_back(std::move(res->second));
    guard_tid_.push_back(tid);
    return log_.acquires.size() - 1;
  }

  void release(std::size_t acquire_index) {
    ThreadRegistry::ScopedId sid(ids_[guard_tid_[acquire_index]]);
    ar_.release(guards_[acquire_index]);
    log_.acquires[acquire_index].t_release = ++now_;
  }

  void retire(std::uint32_t tid, Handle h) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    std::uint64_t t = ++now_;
    ar_.retire(h);
    log_.retires.push_back({t, h.canonical()});
  }

  // Forced-scan eject, logged when it returns a handle.
  std::optional<Handle> eject(std::uint32_t tid) {
    ThreadRegistry::ScopedId sid(ids_[tid]);
    std::uint64_t t = ++now_;
    auto h = ar_.eject_now();
    if (h) log_.ejects.push_back({t, h->canonical()});
    return h;
  }

  // Drains one thread's ejects to empty; returns how many were ejected.
  std::size_t drain(std::uint32_t tid) {
    std::size_t n = 0;
    while (eject(tid)) ++n;
    return n;
  }

  std::uint32_t id(std::uint32_t tid) const { return ids_[tid]; }
  const ContractLog& log() const { return log_; }

 private:
  AR& ar_;
  ThreadRegistry::ClaimedIds ids_;
  ContractLog log_;
  std::vector<Guard> guards_;
  std::vector<std::uint32_t> guard_tid_;
  std::vector<Handle> allocated_;
  std::uint64_t now_ = 0;
};

}  // namespace reclaim::verify
