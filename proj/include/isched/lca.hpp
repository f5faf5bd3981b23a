#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "isched/core.hpp"
#include "isched/job_tree.hpp"

namespace isched {

// Probe-access oracle over a static instance. Every call that touches the
// underlying structure counts as exactly one probe; answers depend only on
// the instance, never on the approximation parameter.
class SuccessorOracle {
 public:
  using ProbeLog = std::function<void(Time, const std::optional<Job>&)>;

  explicit SuccessorOracle(std::span<const Job> jobs) {
    for (const Job& j : jobs) tree_.insert(j);
  }

  std::size_t size() const { return tree_.size(); }
  bool contains(JobId id) const { return tree_.contains(id); }

  // Earliest-ending job with start >= x.
  std::optional<Job> successor(Time x) const {
    ++probes_;
    auto r = tree_.successor(x);
    if (log_) log_(x, r);
    return r;
  }

  // Same, skipping ignored ids. Each underlying walk step is one probe.
  std::optional<Job> successor_excluding(
      Time x, const std::unordered_set<JobId>& ignore) const {
    auto r = successor(x);
    while (r && ignore.count(r->id)) {
      ++probes_;
      r = tree_.successor_after(x, {r->end(), r->start, r->id});
      if (log_) log_(x, r);
    }
    return r;
  }

  std::uint64_t probes() const { return probes_; }
  void reset_probes() const { probes_ = 0; }
  void set_probe_log(ProbeLog log) { log_ = std::move(log); }

 private:
  JobTree tree_;
  mutable std::uint64_t probes_ = 0;
  ProbeLog log_;
};

// Node of the halving tree over the padded horizon [0, 2^h).
struct TreeNode {
  TimeRange range;

  Time mid() const { return (range.lo + range.hi) / 2; }
  bool leaf() const { return range.length() <= 1; }
  TreeNode left() const { return TreeNode{{range.lo, mid()}}; }
  TreeNode right() const { return TreeNode{{mid(), range.hi}}; }

  static Time pad_horizon(Time n) {
    Time p = 1;
    while (p < n) p *= 2;
    return p;
  }
  static TreeNode root(Time horizon) {
    return TreeNode{{0, pad_horizon(horizon)}};
  }
};

// Result of simulating the earliest-end greedy inside a range through
// successor probes. `pending` is the candidate the terminating probe saw
// (earliest-ending job with start >= the final position), which callers can
// reuse instead of probing again; it is unknown when the run stopped at a
// pick cap.
struct ProbeRun {
  std::vector<Job> picks;
  Time last_end = 0;            // end of last pick, or `earliest` unchanged
  std::uint64_t probes = 0;
  std::optional<Job> pending;
  Time pending_from = 0;        // x the terminal probe used
  bool pending_known = false;
};

// Greedy inside `range` starting no earlier than `earliest`; stops after
// `cap` picks when given. Uses picks+1 probes at most.
inline ProbeRun probe_based_opt(const SuccessorOracle& o, TimeRange range,
                                Time earliest,
                                std::optional<int> cap = std::nullopt) {
  ProbeRun run;
  run.last_end = earliest;
  std::uint64_t before = o.probes();
  Time x = std::max(earliest, range.lo);
  for (;;) {
    if (cap && (int)run.picks.size() >= *cap) break;  // size test satisfied
    auto cand = o.successor(x);
    if (!cand || cand->end() > range.hi) {
      run.pending = cand;
      run.pending_from = x;
      run.pending_known = true;
      break;
    }
    run.picks.push_back(*cand);
    run.last_end = cand->end();
    x = cand->end();
  }
  run.probes = o.probes() - before;
  return run;
}

namespace detail {

// Shared body of the exact and approximate hierarchical greedy. The
// approximate version draws a border at the midpoint whenever both children
// hold more than K picks on their own, and then solves them independently.
//
// `on_pick` sees every selected job exactly once, in greedy order.
class HierarchicalGreedy {
 public:
  HierarchicalGreedy(const SuccessorOracle& o, std::function<void(const Job&)> on_pick)
      : o_(o), on_pick_(std::move(on_pick)) {}

  struct Ret {
    Time last_end;
    std::optional<Job> pending;
    Time pending_from = 0;
    bool pending_known = false;
  };

  // Exact: never draws borders; equals the classic greedy.
  Ret run_exact(const TreeNode& q, Time earliest) {
    return run(q, earliest, std::nullopt, nullptr);
  }

  // Approximate with threshold K; `descend` (optional) restricts the border
  // case to the child containing the queried job, for the local variant.
  Ret run_approx(const TreeNode& q, Time earliest, int k, const Job* target) {
    return run(q, earliest, k, target);
  }

 private:
  Ret run(const TreeNode& q, Time earliest, std::optional<int> k,
          const Job* target) {
    if (earliest >= q.range.hi)
      return Ret{earliest, std::nullopt, 0, false};
    if (q.leaf()) {
      auto r = probe_based_opt(o_, q.range, earliest);
      for (const Job& j : r.picks) on_pick_(j);
      return Ret{r.last_end, r.pending, r.pending_from, r.pending_known};
    }
    const TreeNode left = q.left(), right = q.right();
    const Time mid = q.mid();

    std::optional<ProbeRun> test_l, test_r;
    bool large_l = false, large_r = false;
    if (k) {
      if (earliest < mid) {
        test_l = probe_based_opt(o_, left.range, earliest, *k + 1);
        large_l = (int)test_l->picks.size() > *k;
      }
      test_r = probe_based_opt(o_, right.range, mid, *k + 1);
      large_r = (int)test_r->picks.size() > *k;

      if (large_l && large_r) {
        // Border at mid: both children are solved independently and any job
        // crossing mid is ignored.
        if (target) {
          // Only the child holding the target matters for the answer.
          if (target->start >= left.range.lo && target->end() <= mid)
            return run(left, earliest, k, target);
          return run(right, mid, k, target);
        }
        run(left, earliest, k, target);
        return run(right, mid, k, target);
      }
    }

    // Left part: exact replay when small, recursion otherwise.
    Ret l;
    if (k && !large_l) {
      if (test_l) {
        for (const Job& j : test_l->picks) on_pick_(j);
        l = Ret{test_l->picks.empty() ? earliest : test_l->picks.back().end(),
                test_l->pending, test_l->pending_from, test_l->pending_known};
      } else {
        l = Ret{earliest, std::nullopt, 0, false};  // earliest >= mid
      }
    } else if (!k) {
      l = run(left, earliest, std::nullopt, target);
    } else {
      l = run(left, earliest, k, target);
    }

    // Midpoint step: the next greedy candidate from the left pass either
    // crosses mid (take it; the guard probe confirms nothing is contained
    // in it) or belongs to the right child (defer).
    Time x_need = std::max(l.last_end, q.range.lo);
    std::optional<Job> cand;
    if (l.pending_known &&
        (l.pending_from == x_need ||
         (l.pending_from <= x_need &&
          (!l.pending || l.pending->start >= x_need)))) {
      cand = l.pending;
    } else {
      cand = o_.successor(x_need);
    }
    Time am = l.last_end;
    if (cand && cand->end() <= q.range.hi && crosses(*cand, mid)) {
      auto guard = o_.successor(cand->start);
      if (guard && guard->id == cand->id) {
        on_pick_(*cand);
        am = cand->end();
      }
    }

    // Right part.
    if (k && !large_r) {
      Time xr = std::max(am, mid);
      if (xr == mid && test_r) {
        for (const Job& j : test_r->picks) on_pick_(j);
        return Ret{test_r->picks.empty() ? am : test_r->picks.back().end(),
                   test_r->pending, test_r->pending_from,
                   test_r->pending_known};
      }
      auto r = probe_based_opt(o_, right.range, am);
      for (const Job& j : r.picks) on_pick_(j);
      return Ret{r.picks.empty() ? am : r.picks.back().end(), r.pending,
                 r.pending_from, r.pending_known};
    }
    if (!k) {
      auto r = run(right, am, std::nullopt, target);
      return r;
    }
    auto r = run(right, am, k, target);
    return r;
  }

  const SuccessorOracle& o_;
  std::function<void(const Job&)> on_pick_;
};

}  // namespace detail

// Exact hierarchical greedy over the whole instance; selection equals the
// classic earliest-end greedy.
inline std::vector<Job> exact_global_schedule(const SuccessorOracle& o,
                                              Time horizon) {
  std::vector<Job> out;
  detail::HierarchicalGreedy g(o, [&](const Job& j) { out.push_back(j); });
  g.run_exact(TreeNode::root(horizon), 0);
  return out;
}

// Approximate hierarchical greedy; the selection is a valid independent set
// of size at least K/(K+1) of the optimum.
inline std::vector<Job> approx_global_schedule(const SuccessorOracle& o,
                                               Time horizon,
                                               const ApproxParams& params) {
  std::vector<Job> out;
  detail::HierarchicalGreedy g(o, [&](const Job& j) { out.push_back(j); });
  g.run_approx(TreeNode::root(horizon), 0, params.k, nullptr);
  return out;
}

// Membership query answered by walking one root-leaf path of the approximate
// hierarchical greedy. All answers are consistent with
// approx_global_schedule on the same instance and parameters.
struct LcaAnswer {
  bool in_solution = false;
  std::uint64_t probes = 0;
};

inline LcaAnswer lca_query(const Job& job, const ApproxParams& params,
                           const SuccessorOracle& o, Time horizon) {
  if (!o.contains(job.id))
    throw std::invalid_argument("job " + std::to_string(job.id) +
                                " is not part of the instance");
  std::uint64_t before = o.probes();
  bool found = false;
  detail::HierarchicalGreedy g(o, [&](const Job& j) {
    if (j.id == job.id) found = true;
  });
  g.run_approx(TreeNode::root(horizon), 0, params.k, &job);
  return LcaAnswer{found, o.probes() - before};
}

// ---------------------------------------------------------------------------
// Multi-machine variant. The free time of every machine is tracked through
// the recursion; borders are drawn when both children hold more than M*K
// picks. Jobs contained inside other jobs only become reachable through the
// exclusion-probe walk, which is why the oracle exposes successor_excluding.

namespace detail {

struct MultiState {
  std::vector<Time> free;  // per machine

  Time min_free() const { return *std::min_element(free.begin(), free.end()); }
  // Latest-free machine that can take the job; lowest index on ties.
  int assignable(const Job& j) const {
    int best = -1;
    for (int m = 0; m < (int)free.size(); ++m)
      if (free[m] <= j.start && (best < 0 || free[m] > free[best])) best = m;
    return best;
  }
};

class MultiHierarchicalGreedy {
 public:
  MultiHierarchicalGreedy(const SuccessorOracle& o, int machines, int k,
                          std::function<void(const Job&, int)> on_pick)
      : o_(o), machines_(machines), k_(k), on_pick_(std::move(on_pick)) {}

  // Simulates the M-machine greedy restricted to jobs contained in `range`
  // that are not in `ignore`, mutating `st`. Stops after `cap` picks if set.
  int run_pbo(TimeRange range, MultiState& st, std::optional<int> cap,
              std::unordered_set<JobId>& ignore, bool commit) {
    int picks = 0;
    for (;;) {
      if (cap && picks >= *cap) return picks;
      Time x = st.min_free();
      if (x >= range.hi) return picks;
      auto cand = o_.successor_excluding(std::max(x, range.lo), ignore);
      if (!cand || cand->end() > range.hi) return picks;
      int m = st.assignable(*cand);
      st.free[m] = cand->end();
      ignore.insert(cand->id);
      if (commit) on_pick_(*cand, m);
      ++picks;
    }
  }

  MultiState run(const TreeNode& q, MultiState st,
                 std::unordered_set<JobId>& ignore, const Job* target) {
    if (st.min_free() >= q.range.hi) return st;
    if (q.leaf()) {
      run_pbo(q.range, st, std::nullopt, ignore, true);
      return st;
    }
    const TreeNode left = q.left(), right = q.right();
    const Time mid = q.mid();
    const int threshold = machines_ * k_;

    bool large_l = false, large_r = false;
    {
      std::unordered_set<JobId> scratch = ignore;
      MultiState probe_st = st;
      large_l = run_pbo(left.range, probe_st, threshold + 1, scratch, false) >
                threshold;
    }
    {
      std::unordered_set<JobId> scratch = ignore;
      MultiState probe_st{std::vector<Time>((std::size_t)machines_, mid)};
      large_r = run_pbo(right.range, probe_st, threshold + 1, scratch, false) >
                threshold;
    }

    if (large_l && large_r) {
      // Border at mid.
      if (target) {
        if (target->start >= left.range.lo && target->end() <= mid)
          return run(left, std::move(st), ignore, target);
        MultiState rst{std::vector<Time>((std::size_t)machines_, mid)};
        return run(right, std::move(rst), ignore, target);
      }
      run(left, std::move(st), ignore, target);
      MultiState rst{std::vector<Time>((std::size_t)machines_, mid)};
      return run(right, std::move(rst), ignore, target);
    }

    if (!large_l) {
      run_pbo(left.range, st, std::nullopt, ignore, true);
    } else {
      st = run(left, std::move(st), ignore, target);
    }

    if (!large_r) {
      // Remainder of the node (crossing jobs plus the small right child) is
      // one bounded exact simulation.
      run_pbo(q.range, st, std::nullopt, ignore, true);
      return st;
    }

    // Right child is large: resolve crossing candidates while they lead the
    // greedy order, then descend.
    for (;;) {
      Time x = st.min_free();
      if (x >= mid) break;  // no machine can take a crossing job anymore
      auto cand = o_.successor_excluding(std::max(x, q.range.lo), ignore);
      if (!cand || cand->end() > q.range.hi)
        return st;  // nothing contained in q remains
      if (!crosses(*cand, mid)) break;  // a right-child job leads; defer
      int m = st.assignable(*cand);
      st.free[m] = cand->end();
      ignore.insert(cand->id);
      on_pick_(*cand, m);
    }
    return run(right, std::move(st), ignore, target);
  }

 private:
  const SuccessorOracle& o_;
  int machines_;
  int k_;
  std::function<void(const Job&, int)> on_pick_;
};

}  // namespace detail

// Global approximate M-machine schedule (for tests and sweeps).
inline Schedule approx_global_schedule_multi(const SuccessorOracle& o,
                                             Time horizon, int machines,
                                             const ApproxParams& params) {
  Schedule s;
  detail::MultiHierarchicalGreedy g(
      o, machines, params.k,
      [&](const Job& j, int m) { s.assignment[j.id] = m; });
  std::unordered_set<JobId> ignore;
  detail::MultiState st{std::vector<Time>((std::size_t)machines, 0)};
  g.run(TreeNode::root(horizon), std::move(st), ignore, nullptr);
  return s;
}

struct LcaMultiAnswer {
  std::optional<int> machine;
  std::uint64_t probes = 0;
};

inline LcaMultiAnswer lca_query_multi(const Job& job, int machines,
                                      const ApproxParams& params,
                                      const SuccessorOracle& o, Time horizon) {
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  if (!o.contains(job.id))
    throw std::invalid_argument("job " + std::to_string(job.id) +
                                " is not part of the instance");
  std::uint64_t before = o.probes();
  std::optional<int> got;
  detail::MultiHierarchicalGreedy g(
      o, machines, params.k, [&](const Job& j, int m) {
        if (j.id == job.id) got = m;
      });
  std::unordered_set<JobId> ignore;
  detail::MultiState st{std::vector<Time>((std::size_t)machines, 0)};
  g.run(TreeNode::root(horizon), std::move(st), ignore, &job);
  return LcaMultiAnswer{got, o.probes() - before};
}

}  // namespace isched
