#pragma once

// Test-only reference solvers, independent of the library's solver paths.
// Everything here enumerates, so keep instances small.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "isched/core.hpp"
#include "isched/rng.hpp"

namespace isched::testutil {

// Best total weight over all valid subsets contained in range, at most
// max_jobs of them (-1 = unlimited). Enumerates 2^n subsets.
inline Rat brute_best_1m(std::span<const Job> jobs, const TimeRange& range,
                         int max_jobs = -1) {
  std::vector<Job> v;
  for (const Job& j : jobs)
    if (range.contains(j)) v.push_back(j);
  const int n = (int)v.size();
  Rat best(0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (max_jobs >= 0 && __builtin_popcount(mask) > max_jobs) continue;
    Rat total(0);
    bool ok = true;
    for (int i = 0; ok && i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      for (int j = i + 1; ok && j < n; ++j)
        if ((mask >> j & 1) && conflicts(v[i], v[j])) ok = false;
      total += v[i].weight;
    }
    if (ok && total > best) best = total;
  }
  return best;
}

// Best total weight over all machine assignments. Enumerates (m+1)^n.
inline Rat brute_best_Mm(std::span<const Job> jobs, int machines) {
  std::vector<Job> v(jobs.begin(), jobs.end());
  const int n = (int)v.size();
  std::vector<int> assign(n, -1);  // -1 = skipped
  Rat best(0);
  auto valid_on_machine = [&](int i) {
    for (int j = 0; j < i; ++j)
      if (assign[j] == assign[i] && conflicts(v[i], v[j])) return false;
    return true;
  };
  std::function<void(int, Rat)> rec = [&](int i, Rat total) {
    if (i == n) {
      if (total > best) best = total;
      return;
    }
    assign[i] = -1;
    rec(i + 1, total);
    for (int m = 0; m < machines; ++m) {
      assign[i] = m;
      if (valid_on_machine(i)) rec(i + 1, total + v[i].weight);
    }
    assign[i] = -1;
  };
  rec(0, Rat(0));
  return best;
}

// Seeded random instance helpers shared by the unit tests.
inline std::vector<Job> random_jobs(SplitMix64& rng, int n, Time horizon,
                                    Time max_len, std::int64_t max_weight = 1,
                                    JobId first_id = 0) {
  std::vector<Job> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    Time len = rng.range(1, std::min<Time>(max_len, horizon));
    Time start = rng.range(0, horizon - len);
    Rat w = max_weight <= 1 ? Rat(1) : Rat(rng.range(1, max_weight));
    v.push_back(Job{first_id + (JobId)i, start, len, w});
  }
  return v;
}

}  // namespace isched::testutil
