#include "isched/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "brute.hpp"
#include "isched/rng.hpp"

using namespace isched;
using namespace isched::testutil;

namespace {
Job mk(JobId id, Time s, Time e, std::int64_t w = 1) {
  return Job{id, s, e - s, Rat(w)};
}
const TimeRange kAll{0, 1'000'000};
}  // namespace

TEST_CASE("greedy_unweighted_1m worked examples") {
  std::vector<Job> a = {mk(0, 0, 2), mk(1, 1, 3), mk(2, 2, 4)};
  CHECK(brute_best_1m(a, kAll) == Rat(2));
  auto ra = greedy_unweighted_1m(a, kAll);
  CHECK(ra.value == Rat(2));
  CHECK(ra.solution.scheduled(0));
  CHECK(ra.solution.scheduled(2));

  CHECK(greedy_unweighted_1m({}, kAll).value == Rat(0));

  std::vector<Job> b = {mk(0, 0, 5), mk(1, 1, 2), mk(2, 3, 4)};
  CHECK(brute_best_1m(b, kAll) == Rat(2));
  CHECK(greedy_unweighted_1m(b, kAll).value == Rat(2));
}

TEST_CASE("greedy_unweighted_1m equals brute force on random instances") {
  SplitMix64 rng(11);
  for (int iter = 0; iter < 400; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 12), 30, 8);
    TimeRange r{rng.range(0, 5), rng.range(20, 30)};
    auto got = greedy_unweighted_1m(jobs, r);
    CHECK(got.value == brute_best_1m(jobs, r));
    CHECK(validate_schedule(jobs, got.solution, 1));
    CHECK(got.value == schedule_value(jobs, got.solution));
    for (const auto& [id, m] : got.solution.assignment) {
      auto it = std::find_if(jobs.begin(), jobs.end(),
                             [&](const Job& j) { return j.id == id; });
      CHECK(r.contains(*it));
    }
  }
}

TEST_CASE("greedy_unweighted_Mm worked examples") {
  std::vector<Job> a = {mk(0, 0, 2), mk(1, 1, 3), mk(2, 2, 4)};
  CHECK(brute_best_Mm(a, 2) == Rat(3));
  CHECK(greedy_unweighted_Mm(a, 2).value == Rat(3));

  std::vector<Job> chain;
  for (int i = 0; i < 4; ++i) chain.push_back(mk(i, i, i + 2));
  CHECK(brute_best_Mm(chain, 2) == Rat(4));
  CHECK(greedy_unweighted_Mm(chain, 2).value == Rat(4));
}

TEST_CASE("greedy_unweighted_Mm reduces to 1m and matches brute force") {
  SplitMix64 rng(12);
  for (int iter = 0; iter < 200; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 9), 24, 7);
    CHECK(greedy_unweighted_Mm(jobs, 1).value ==
          greedy_unweighted_1m(jobs, kAll).value);
    for (int m = 2; m <= 3; ++m) {
      auto got = greedy_unweighted_Mm(jobs, m);
      CHECK(got.value == brute_best_Mm(jobs, m));
      CHECK(validate_schedule(jobs, got.solution, m));
    }
  }
}

TEST_CASE("exact_weighted_1m worked examples") {
  std::vector<Job> a = {mk(0, 0, 4, 3), mk(1, 0, 2, 2), mk(2, 2, 4, 2)};
  CHECK(brute_best_1m(a, kAll) == Rat(4));
  CHECK(exact_weighted_1m(a, kAll).value == Rat(4));

  std::vector<Job> single = {mk(0, 3, 9, 5)};
  CHECK(exact_weighted_1m(single, kAll).value == Rat(5));
  CHECK(exact_weighted_1m({}, kAll).value == Rat(0));
}

TEST_CASE("exact_weighted_1m equals brute force on random weighted instances") {
  SplitMix64 rng(13);
  for (int iter = 0; iter < 300; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 12), 30, 9, 20);
    TimeRange r{rng.range(0, 4), rng.range(18, 30)};
    auto got = exact_weighted_1m(jobs, r);
    CHECK(got.value == brute_best_1m(jobs, r));
    CHECK(validate_schedule(jobs, got.solution, 1));
    CHECK(got.value == schedule_value(jobs, got.solution));
  }
}

TEST_CASE("exact_weighted_Mm_bruteforce worked examples and cross-checks") {
  std::vector<Job> nested = {mk(0, 0, 6, 5), mk(1, 1, 2, 1), mk(2, 3, 4, 1)};
  CHECK(brute_best_Mm(nested, 2) == Rat(7));
  CHECK(exact_weighted_Mm_bruteforce(nested, 2).value == Rat(7));
  CHECK(exact_weighted_Mm_bruteforce({}, 2).value == Rat(0));

  SplitMix64 rng(14);
  for (int iter = 0; iter < 200; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 12), 26, 8, 9);
    CHECK(exact_weighted_Mm_bruteforce(jobs, 1).value ==
          exact_weighted_1m(jobs, kAll).value);
  }
  for (int iter = 0; iter < 120; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 8), 20, 7, 9);
    for (int m = 2; m <= 3; ++m) {
      auto got = exact_weighted_Mm_bruteforce(jobs, m);
      CHECK(got.value == brute_best_Mm(jobs, m));
      CHECK(validate_schedule(jobs, got.solution, m));
      CHECK(got.value == schedule_value(jobs, got.solution));
    }
  }
}

TEST_CASE("exact_weighted_Mm_bruteforce refuses oversized instances") {
  SplitMix64 rng(15);
  auto jobs = random_jobs(rng, 19, 100, 10);
  CHECK_THROWS_WITH(exact_weighted_Mm_bruteforce(jobs, 2),
                    Catch::Matchers::ContainsSubstring("19"));
}

TEST_CASE("exact_sparse_opt worked examples") {
  std::vector<Job> a = {mk(0, 0, 2, 1), mk(1, 2, 4, 1), mk(2, 4, 6, 9)};
  CHECK(exact_sparse_opt(a, kAll, 0).value == Rat(0));
  CHECK(brute_best_1m(a, kAll, 1) == Rat(9));
  CHECK(exact_sparse_opt(a, kAll, 1).value == Rat(9));
  CHECK(exact_sparse_opt(a, kAll, 3).value == exact_weighted_1m(a, kAll).value);
}

TEST_CASE("exact_sparse_opt equals brute force and is monotone in k") {
  SplitMix64 rng(16);
  for (int iter = 0; iter < 200; ++iter) {
    auto jobs = random_jobs(rng, (int)rng.range(0, 10), 24, 8, 12);
    TimeRange r{rng.range(0, 4), rng.range(16, 24)};
    Rat prev(0);
    for (int k = 0; k <= (int)jobs.size(); ++k) {
      auto got = exact_sparse_opt(jobs, r, k);
      CHECK(got.value == brute_best_1m(jobs, r, k));
      CHECK(got.value >= prev);
      CHECK((int)got.solution.size() <= k);
      CHECK(validate_schedule(jobs, got.solution, 1));
      CHECK(got.value == schedule_value(jobs, got.solution));
      prev = got.value;
    }
    CHECK(exact_sparse_opt(jobs, r, (int)jobs.size()).value ==
          exact_weighted_1m(jobs, r).value);
  }
}

TEST_CASE("oracles are monotone under job insertion") {
  SplitMix64 rng(17);
  for (int iter = 0; iter < 100; ++iter) {
    auto unit = random_jobs(rng, 10, 24, 6);
    auto weighted = random_jobs(rng, 10, 24, 6, 8);
    std::vector<Job> prefix, wprefix;
    Rat g(0), w(0), m2(0);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      prefix.push_back(unit[i]);
      wprefix.push_back(weighted[i]);
      Rat ng = greedy_unweighted_1m(prefix, kAll).value;
      Rat nw = exact_weighted_1m(wprefix, kAll).value;
      Rat nm = greedy_unweighted_Mm(prefix, 2).value;
      CHECK(ng >= g);
      CHECK(nw >= w);
      CHECK(nm >= m2);
      g = ng; w = nw; m2 = nm;
    }
  }
}
