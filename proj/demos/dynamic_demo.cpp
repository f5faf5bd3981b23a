// Maintains an approximate schedule under inserts and deletes and prints the
// solution size next to the exact optimum after every operation.

#include <cstdio>

#include "isched/dynamic_unweighted.hpp"
#include "isched/oracles.hpp"
#include "isched/rng.hpp"

using namespace isched;

int main() {
  const Time horizon = 256;
  auto params = ApproxParams::from_epsilon(Rat(1, 4));
  DynamicScheduler scheduler(params, horizon);

  SplitMix64 rng(2024);
  std::vector<Job> live;
  JobId next_id = 0;

  std::printf("%-6s %-10s %-9s %-9s %s\n", "op", "kind", "solution", "optimum",
              "borders");
  for (int op = 0; op < 40; ++op) {
    bool insert = live.empty() || rng.below(100) < 70;
    if (insert) {
      Time len = rng.range(1, 24);
      Job j{next_id++, rng.range(0, horizon - len), len, Rat(1)};
      scheduler.insert(j);
      live.push_back(j);
    } else {
      std::size_t pick = rng.below(live.size());
      scheduler.erase(live[pick].id);
      live.erase(live.begin() + pick);
    }
    auto opt = greedy_unweighted_1m(live, TimeRange{0, horizon});
    std::printf("%-6d %-10s %-9zu %-9s %zu\n", op, insert ? "insert" : "delete",
                scheduler.solution_size(), opt.value.to_string().c_str(),
                scheduler.borders().size() - 2);
  }
  return 0;
}
