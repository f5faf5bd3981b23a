#include "isched/core.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "brute.hpp"
#include "isched/rng.hpp"

using namespace isched;

namespace {
Job mk(JobId id, Time s, Time e, std::int64_t w = 1) {
  return Job{id, s, e - s, Rat(w)};
}
}  // namespace

TEST_CASE("rational arithmetic is exact and normalized") {
  CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-3, -6) == Rat(1, 2));
  CHECK(Rat(1, -2) < Rat(0));
  CHECK(Rat(7, 3) * Rat(3, 7) == Rat(1));
  CHECK(Rat(5) / Rat(2) == Rat(5, 2));
  CHECK(Rat::parse("3/2") == Rat(3, 2));
  CHECK(Rat::parse("-4") == Rat(-4));
  CHECK(Rat(3, 2).to_string() == "3/2");
  CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rat(INT64_MAX, 1) + Rat(INT64_MAX, 1), std::overflow_error);
}

TEST_CASE("conflicts uses half-open semantics") {
  CHECK_FALSE(conflicts(mk(0, 0, 2), mk(1, 2, 4)));  // touching endpoints
  CHECK(conflicts(mk(0, 0, 3), mk(1, 1, 2)));        // containment
  CHECK(conflicts(mk(0, 0, 2), mk(1, 1, 3)));        // partial overlap
}

TEST_CASE("crosses is strict at both endpoints") {
  Job j = mk(0, 1, 4);
  CHECK(crosses(j, 2));
  CHECK_FALSE(crosses(j, 1));
  CHECK_FALSE(crosses(j, 4));
}

TEST_CASE("conflicts properties") {
  SplitMix64 rng(7);
  auto jobs = testutil::random_jobs(rng, 64, 40, 10);
  for (const Job& a : jobs) {
    CHECK(conflicts(a, a));  // any job with length >= 1 overlaps itself
    for (const Job& b : jobs) CHECK(conflicts(a, b) == conflicts(b, a));
    for (Time t = a.start - 1; t <= a.end() + 1; ++t)
      if (crosses(a, t)) CHECK((a.start < t && t < a.end()));
  }
}

TEST_CASE("validate_schedule basics") {
  std::vector<Job> jobs = {mk(0, 0, 2), mk(1, 2, 4)};
  Schedule s;
  s.assignment = {{0, 0}, {1, 0}};
  CHECK(validate_schedule(jobs, s, 1));

  std::vector<Job> overlap = {mk(0, 0, 3), mk(1, 1, 2)};
  Schedule bad;
  bad.assignment = {{0, 0}, {1, 0}};
  CHECK_FALSE(validate_schedule(overlap, bad, 1));

  Schedule split;
  split.assignment = {{0, 0}, {1, 1}};
  CHECK(validate_schedule(overlap, split, 2));

  Schedule unknown;
  unknown.assignment = {{42, 0}};
  std::string why;
  CHECK_FALSE(validate_schedule(jobs, unknown, 1, &why));
  CHECK(why.find("42") != std::string::npos);
}

TEST_CASE("validate_schedule agrees with pairwise conflicts exhaustively") {
  // All schedules of up to 6 jobs drawn from a fixed pool, one machine.
  std::vector<Job> pool = {mk(0, 0, 2), mk(1, 1, 3), mk(2, 2, 4),
                           mk(3, 3, 5), mk(4, 0, 5), mk(5, 4, 6)};
  for (std::uint32_t mask = 0; mask < (1u << pool.size()); ++mask) {
    Schedule s;
    std::vector<Job> used;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask >> i & 1) {
        s.assignment[pool[i].id] = 0;
        used.push_back(pool[i]);
      }
    bool pairwise_ok = true;
    for (std::size_t i = 0; i < used.size(); ++i)
      for (std::size_t j = i + 1; j < used.size(); ++j)
        if (conflicts(used[i], used[j])) pairwise_ok = false;
    CHECK(validate_schedule(pool, s, 1) == pairwise_ok);
  }
}

TEST_CASE("ApproxParams computes K = ceil(1/epsilon)") {
  CHECK(ApproxParams::from_epsilon(Rat(1)).k == 1);
  CHECK(ApproxParams::from_epsilon(Rat(1, 2)).k == 2);
  CHECK(ApproxParams::from_epsilon(Rat(3, 10)).k == 4);
  CHECK(ApproxParams::from_epsilon(Rat(1, 4)).k == 4);
  CHECK(ApproxParams::from_epsilon(Rat(2, 7)).k == 4);
  CHECK_THROWS_AS(ApproxParams::from_epsilon(Rat(0)), std::invalid_argument);
}

TEST_CASE("TimeRange containment matches job bounds") {
  TimeRange r{2, 6};
  CHECK(r.contains(mk(0, 2, 6)));
  CHECK(r.contains(mk(0, 3, 5)));
  CHECK_FALSE(r.contains(mk(0, 1, 3)));
  CHECK_FALSE(r.contains(mk(0, 5, 7)));
}
