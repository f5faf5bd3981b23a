#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "isched/rational.hpp"

namespace isched {

using Time = std::int64_t;
using JobId = std::uint64_t;

// A job occupies the half-open interval [start, start + length). Jobs that
// share only an endpoint do not conflict, so a greedy pick may start exactly
// where the previous one ended.
struct Job {
  JobId id = 0;
  Time start = 0;
  Time length = 1;
  Rat weight = Rat(1);

  Time end() const { return start + length; }
};

// Greedy tie-break order used everywhere: (end, start, id) ascending.
inline std::tuple<Time, Time, JobId> end_order_key(const Job& j) {
  return {j.end(), j.start, j.id};
}
struct EndOrderLess {
  bool operator()(const Job& a, const Job& b) const {
    return end_order_key(a) < end_order_key(b);
  }
};

struct TimeRange {
  Time lo = 0;
  Time hi = 0;

  Time length() const { return hi - lo; }
  bool contains(const Job& j) const { return j.start >= lo && j.end() <= hi; }
  bool contains_point(Time t) const { return lo <= t && t <= hi; }
};

inline bool conflicts(const Job& a, const Job& b) {
  return a.start < b.end() && b.start < a.end();
}

// True iff the border time b falls strictly inside the job.
inline bool crosses(const Job& a, Time b) {
  return a.start < b && a.end() > b;
}

// Approximation parameter pair. K defaults to ceil(1/epsilon); tests may pass
// an explicit K to probe the rounding machinery at other settings.
struct ApproxParams {
  Rat epsilon;
  int k = 1;

  static ApproxParams from_epsilon(Rat eps) {
    if (!(eps > Rat(0))) throw std::invalid_argument("epsilon must be > 0");
    // ceil(num/den) for positive rationals
    std::int64_t k = (eps.num() >= eps.den())
                         ? 1
                         : (eps.den() + eps.num() - 1) / eps.num();
    return ApproxParams{eps, (int)k};
  }
  static ApproxParams make(Rat eps, int k) {
    if (!(eps > Rat(0)) || k < 1) throw std::invalid_argument("bad ApproxParams");
    return ApproxParams{eps, k};
  }
};

// Assignment of job ids to machine indices in [0, M).
struct Schedule {
  std::unordered_map<JobId, int> assignment;

  bool scheduled(JobId id) const { return assignment.count(id) != 0; }
  std::size_t size() const { return assignment.size(); }
};

inline Rat schedule_value(std::span<const Job> jobs, const Schedule& s) {
  Rat total(0);
  for (const Job& j : jobs)
    if (s.scheduled(j.id)) total += j.weight;
  return total;
}

// Checks machine indices, id existence, and pairwise non-conflict per
// machine. On failure and if `why` is given, stores the offending detail.
inline bool validate_schedule(std::span<const Job> jobs, const Schedule& s,
                              int machines, std::string* why = nullptr) {
  std::unordered_map<JobId, const Job*> by_id;
  by_id.reserve(jobs.size());
  for (const Job& j : jobs) by_id[j.id] = &j;

  std::unordered_map<int, std::vector<const Job*>> per_machine;
  for (const auto& [id, m] : s.assignment) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      if (why) *why = "unknown job id " + std::to_string(id);
      return false;
    }
    if (m < 0 || m >= machines) {
      if (why) *why = "job " + std::to_string(id) + " on machine " + std::to_string(m);
      return false;
    }
    per_machine[m].push_back(it->second);
  }
  for (auto& [m, list] : per_machine) {
    std::sort(list.begin(), list.end(),
              [](const Job* a, const Job* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (conflicts(*list[i - 1], *list[i])) {
        if (why)
          *why = "jobs " + std::to_string(list[i - 1]->id) + " and " +
                 std::to_string(list[i]->id) + " conflict on machine " +
                 std::to_string(m);
        return false;
      }
    }
  }
  return true;
}

}  // namespace isched
