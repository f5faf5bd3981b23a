#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "isched/core.hpp"
#include "isched/job_tree.hpp"

namespace isched {

// Fully dynamic (1+eps)-approximate unweighted interval scheduling on one
// machine. Maintains a set of borders so that the optimal solution strictly
// between consecutive borders has size in [K, 2K); jobs crossing a border
// are ignored. The maintained solution is the union of the exact earliest-end
// greedy run inside every region, so its size is at least K/(K+1) of the
// global optimum.
//
// Single writer; queries must not race an update.
class DynamicScheduler {
 public:
  struct UpdateStats {
    int regions_recomputed = 0;
    std::uint64_t successor_calls = 0;
    std::uint64_t node_visits = 0;
  };

  DynamicScheduler(ApproxParams params, Time horizon)
      : params_(params), horizon_(horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    borders_.insert(0);
    borders_.insert(horizon);
  }

  Time horizon() const { return horizon_; }
  int k() const { return params_.k; }

  void insert(const Job& j) {
    if (j.start < 0 || j.length < 1 || j.end() > horizon_)
      throw std::invalid_argument("job outside horizon");
    begin_update();
    all_.insert(j);
    if (crosses_some_border(j)) return;  // ignored until its region changes
    auto [bl, br] = region_of(j.start);
    split_while_large(recompute_region(bl, br));
  }

  void erase(JobId id) {
    const Job j = all_.get(id);  // throws on unknown id
    begin_update();
    all_.erase(id);
    if (!sol_ids_.count(id)) return;  // non-solution jobs never affect picks
    drop_from_solution(j);
    auto [bl, br] = region_of(j.start);
    auto picks = recompute_region(bl, br);
    if ((int)picks.size() < params_.k) {
      // Merge with the left neighbor when a drawn border exists there,
      // otherwise the right one. A lone whole-horizon region may stay small.
      if (bl != 0) {
        borders_.erase(bl);
        bl = *std::prev(borders_.upper_bound(bl));
      } else if (br != horizon_) {
        borders_.erase(br);
        br = *borders_.upper_bound(br);
      } else {
        return;
      }
      picks = recompute_region(bl, br);
    }
    split_while_large(std::move(picks));
  }

  bool query_in_solution(JobId id) const {
    all_.get(id);  // throws on unknown id
    return sol_ids_.count(id) != 0;
  }

  std::size_t solution_size() const { return sol_ids_.size(); }
  std::size_t live_jobs() const { return all_.size(); }
  const std::set<Time>& borders() const { return borders_; }

  std::vector<Job> solution_jobs() const {
    std::vector<Job> v;
    v.reserve(sol_by_start_.size());
    for (const auto& [key, job] : sol_by_start_) v.push_back(job);
    return v;
  }

  // Consecutive border pairs with the size of the stored region solution.
  std::vector<std::pair<TimeRange, int>> region_sizes() const {
    std::vector<std::pair<TimeRange, int>> out;
    for (auto it = borders_.begin(); std::next(it) != borders_.end(); ++it) {
      Time lo = *it, hi = *std::next(it);
      auto from = sol_by_start_.lower_bound({lo, 0});
      int count = 0;
      for (auto jt = from; jt != sol_by_start_.end() && jt->first.first < hi; ++jt)
        ++count;
      out.push_back({TimeRange{lo, hi}, count});
    }
    return out;
  }

  UpdateStats last_update_stats() const {
    UpdateStats s = pending_;
    s.successor_calls = all_.stats().successor_calls - stats_base_.successor_calls;
    s.node_visits = all_.stats().node_visits - stats_base_.node_visits;
    return s;
  }

 private:
  void begin_update() {
    pending_ = UpdateStats{};
    stats_base_ = all_.stats();
  }

  bool crosses_some_border(const Job& j) const {
    auto it = borders_.upper_bound(j.start);
    return it != borders_.end() && *it < j.end();
  }

  std::pair<Time, Time> region_of(Time start) const {
    auto it = borders_.upper_bound(start);
    Time br = *it;
    Time bl = *std::prev(it);
    return {bl, br};
  }

  void drop_from_solution(const Job& j) {
    sol_by_start_.erase({j.start, j.id});
    sol_ids_.erase(j.id);
  }
  void add_to_solution(const Job& j) {
    sol_by_start_.emplace(std::pair<Time, JobId>{j.start, j.id}, j);
    sol_ids_.insert(j.id);
  }

  // Replaces the stored solution inside [bl, br] with the exact earliest-end
  // greedy over jobs contained there. Nothing inside crosses a border.
  std::vector<Job> recompute_region(Time bl, Time br) {
    ++pending_.regions_recomputed;
    for (auto it = sol_by_start_.lower_bound({bl, 0});
         it != sol_by_start_.end() && it->first.first < br;) {
      sol_ids_.erase(it->second.id);
      it = sol_by_start_.erase(it);
    }
    std::vector<Job> picks;
    Time x = bl;
    for (;;) {
      auto cand = all_.successor(x);
      if (!cand || cand->end() > br) break;
      picks.push_back(*cand);
      add_to_solution(*cand);
      x = cand->end();
    }
    return picks;
  }

  // While a region's optimum has reached 2K, add a border at the end of its
  // K-th chosen job; the left part keeps exactly K picks and stays optimal
  // for its subrange because the greedy is prefix-stable. No pick can cross
  // the cut, so the remaining picks are the right side's optimum as well.
  void split_while_large(std::vector<Job> picks) {
    while ((int)picks.size() >= 2 * params_.k) {
      borders_.insert(picks[params_.k - 1].end());
      picks.erase(picks.begin(), picks.begin() + params_.k);
    }
  }

  ApproxParams params_;
  Time horizon_;
  JobTree all_;
  std::set<Time> borders_;
  std::map<std::pair<Time, JobId>, Job> sol_by_start_;
  std::unordered_set<JobId> sol_ids_;
  UpdateStats pending_;
  JobTree::Stats stats_base_;
};

}  // namespace isched
