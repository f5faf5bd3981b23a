// Answers per-job membership queries against a static instance through
// successor probes only, printing the probe count per query.

#include <cstdio>

#include "isched/lca.hpp"
#include "isched/rng.hpp"

using namespace isched;

int main() {
  const Time horizon = 1 << 12;
  auto params = ApproxParams::from_epsilon(Rat(1, 4));

  SplitMix64 rng(7);
  std::vector<Job> jobs;
  for (int i = 0; i < 48; ++i) {
    Time len = rng.range(1, horizon / 16);
    jobs.push_back(Job{(JobId)i, rng.range(0, horizon - len), len, Rat(1)});
  }
  SuccessorOracle oracle(jobs);

  std::size_t scheduled = 0;
  std::uint64_t max_probes = 0;
  for (const Job& j : jobs) {
    auto ans = lca_query(j, params, oracle, horizon);
    if (ans.in_solution) ++scheduled;
    max_probes = std::max(max_probes, ans.probes);
    std::printf("job %2llu [%4lld, %4lld)  %-3s  %3llu probes\n",
                (unsigned long long)j.id, (long long)j.start,
                (long long)j.end(), ans.in_solution ? "yes" : "no",
                (unsigned long long)ans.probes);
  }
  std::printf("scheduled %zu of %zu jobs; max probes per query %llu\n",
              scheduled, jobs.size(), (unsigned long long)max_probes);
  return 0;
}
