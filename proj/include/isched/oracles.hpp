#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "isched/core.hpp"

namespace isched {

// Exact reference solvers. These are the ground truth the approximation
// structures are tested against; they favor clarity over speed and are only
// meant for desk-scale instances.

struct OracleResult {
  Rat value = Rat(0);
  Schedule solution;
  std::uint64_t node_visits = 0;
};

namespace detail {

inline std::vector<Job> contained_sorted(std::span<const Job> jobs,
                                         const TimeRange& range) {
  std::vector<Job> v;
  v.reserve(jobs.size());
  for (const Job& j : jobs)
    if (range.contains(j)) v.push_back(j);
  std::sort(v.begin(), v.end(), EndOrderLess{});
  return v;
}

}  // namespace detail

// Classic earliest-end greedy, exact for the unweighted single machine case.
// Ties broken by (end, start, id).
inline OracleResult greedy_unweighted_1m(std::span<const Job> jobs,
                                         const TimeRange& range) {
  OracleResult res;
  Time free_at = range.lo;
  for (const Job& j : detail::contained_sorted(jobs, range)) {
    ++res.node_visits;
    if (j.start >= free_at) {
      res.solution.assignment[j.id] = 0;
      res.value += j.weight;
      free_at = j.end();
    }
  }
  return res;
}

// Exact M-machine greedy for unweighted jobs: take jobs in earliest-end
// order; assign to the machine that becomes free at the latest time among
// those already free, lowest index on ties.
inline OracleResult greedy_unweighted_Mm(std::span<const Job> jobs,
                                         int machines) {
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  OracleResult res;
  std::vector<Time> free_at(machines, 0);
  std::vector<Job> sorted(jobs.begin(), jobs.end());
  std::sort(sorted.begin(), sorted.end(), EndOrderLess{});
  for (const Job& j : sorted) {
    ++res.node_visits;
    int best = -1;
    for (int m = 0; m < machines; ++m) {
      if (free_at[m] <= j.start && (best < 0 || free_at[m] > free_at[best]))
        best = m;
    }
    if (best >= 0) {
      res.solution.assignment[j.id] = best;
      res.value += j.weight;
      free_at[best] = j.end();
    }
  }
  return res;
}

// Weighted interval scheduling DP on one machine, exact.
inline OracleResult exact_weighted_1m(std::span<const Job> jobs,
                                      const TimeRange& range) {
  OracleResult res;
  std::vector<Job> v = detail::contained_sorted(jobs, range);
  const int n = (int)v.size();
  if (n == 0) return res;

  // pred[i]: last index (in end order) whose end <= v[i].start, or -1.
  std::vector<int> pred(n, -1);
  std::vector<Time> ends(n);
  for (int i = 0; i < n; ++i) ends[i] = v[i].end();
  for (int i = 0; i < n; ++i) {
    auto it = std::upper_bound(ends.begin(), ends.begin() + i, v[i].start);
    pred[i] = (int)(it - ends.begin()) - 1;
  }

  std::vector<Rat> dp(n + 1, Rat(0));
  for (int i = 1; i <= n; ++i) {
    ++res.node_visits;
    Rat take = v[i - 1].weight + dp[pred[i - 1] + 1];
    dp[i] = std::max(dp[i - 1], take);
  }
  res.value = dp[n];

  for (int i = n; i >= 1;) {
    if (dp[i] == dp[i - 1]) { --i; continue; }
    res.solution.assignment[v[i - 1].id] = 0;
    i = pred[i - 1] + 1;
  }
  return res;
}

// Exact weighted optimum over M machines via a DP on machine-availability
// profiles. Capped at 18 jobs / 3 machines; larger instances are refused.
inline OracleResult exact_weighted_Mm_bruteforce(std::span<const Job> jobs,
                                                 int machines) {
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  if (jobs.size() > 18)
    throw std::invalid_argument("exact_weighted_Mm_bruteforce: instance too large (" +
                                std::to_string(jobs.size()) + " jobs > 18)");
  if (machines > 3)
    throw std::invalid_argument("exact_weighted_Mm_bruteforce: too many machines (" +
                                std::to_string(machines) + " > 3)");
  OracleResult res;
  std::vector<Job> v(jobs.begin(), jobs.end());
  std::sort(v.begin(), v.end(), EndOrderLess{});
  const int n = (int)v.size();

  using Profile = std::vector<Time>;  // machine free times, sorted ascending
  struct Entry {
    Rat value;
    int parent = -1;  // slot in previous layer
    bool took = false;
  };
  std::vector<std::vector<std::pair<Profile, Entry>>> layers(n + 1);
  std::map<Profile, int> slot_of;
  layers[0].push_back({Profile(machines, 0), Entry{Rat(0), -1, false}});

  for (int i = 0; i < n; ++i) {
    std::map<Profile, Entry> next;
    auto relax = [&](const Profile& p, const Entry& e) {
      auto it = next.find(p);
      if (it == next.end() || e.value > it->second.value) next[p] = e;
    };
    for (int s = 0; s < (int)layers[i].size(); ++s) {
      const auto& [prof, ent] = layers[i][s];
      ++res.node_visits;
      relax(prof, Entry{ent.value, s, false});
      Time last_tried = -1;
      for (int m = 0; m < machines; ++m) {
        if (prof[m] > v[i].start || prof[m] == last_tried) continue;
        last_tried = prof[m];
        Profile np = prof;
        np[m] = v[i].end();
        std::sort(np.begin(), np.end());
        relax(np, Entry{ent.value + v[i].weight, s, true});
      }
    }
    layers[i + 1].assign(next.begin(), next.end());
  }

  int best = 0;
  for (int s = 1; s < (int)layers[n].size(); ++s)
    if (layers[n][s].second.value > layers[n][best].second.value) best = s;
  res.value = layers[n][best].second.value;

  // Walk parents to recover the chosen set, then color it by start order.
  std::vector<const Job*> chosen;
  int slot = best;
  for (int i = n; i > 0; --i) {
    const Entry& e = layers[i][slot].second;
    if (e.took) chosen.push_back(&v[i - 1]);
    slot = e.parent;
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Job* a, const Job* b) { return a->start < b->start; });
  std::vector<Time> free_at(machines, 0);
  for (const Job* j : chosen) {
    for (int m = 0; m < machines; ++m) {
      if (free_at[m] <= j->start) {
        res.solution.assignment[j->id] = m;
        free_at[m] = j->end();
        break;
      }
    }
  }
  return res;
}

// Exact maximum-weight schedule in `range` using at most k jobs.
inline OracleResult exact_sparse_opt(std::span<const Job> jobs,
                                     const TimeRange& range, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  OracleResult res;
  std::vector<Job> v = detail::contained_sorted(jobs, range);
  const int n = (int)v.size();
  if (n == 0 || k == 0) return res;
  k = std::min(k, n);

  std::vector<int> pred(n, -1);
  std::vector<Time> ends(n);
  for (int i = 0; i < n; ++i) ends[i] = v[i].end();
  for (int i = 0; i < n; ++i) {
    auto it = std::upper_bound(ends.begin(), ends.begin() + i, v[i].start);
    pred[i] = (int)(it - ends.begin()) - 1;
  }

  // dp[i][c]: best value among first i jobs (end order) using <= c of them.
  std::vector<std::vector<Rat>> dp(n + 1, std::vector<Rat>(k + 1, Rat(0)));
  for (int i = 1; i <= n; ++i) {
    for (int c = 1; c <= k; ++c) {
      ++res.node_visits;
      Rat take = v[i - 1].weight + dp[pred[i - 1] + 1][c - 1];
      dp[i][c] = std::max(dp[i - 1][c], take);
    }
  }
  res.value = dp[n][k];

  int i = n, c = k;
  while (i >= 1 && c >= 1) {
    if (dp[i][c] == dp[i - 1][c]) { --i; continue; }
    res.solution.assignment[v[i - 1].id] = 0;
    i = pred[i - 1] + 1;
    --c;
  }
  return res;
}

}  // namespace isched
