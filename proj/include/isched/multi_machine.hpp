#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "isched/core.hpp"
#include "isched/dynamic_unweighted.hpp"
#include "isched/job_tree.hpp"
#include "isched/ladder.hpp"
#include "isched/oracles.hpp"
#include "isched/rng.hpp"
#include "isched/weighted_dynamic.hpp"

namespace isched {

// ---------------------------------------------------------------------------
// Dynamic unweighted scheduling on M machines. Same border scheme as the
// single-machine structure with all thresholds scaled by M: region optima
// stay within [MK, 2MK + M], at most M jobs can cross any border, and each
// region is solved exactly by the M-machine earliest-end greedy.
class MultiDynScheduler {
 public:
  MultiDynScheduler(ApproxParams params, Time horizon, int machines)
      : params_(params), horizon_(horizon), machines_(machines) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (machines < 1) throw std::invalid_argument("machines must be >= 1");
    borders_.insert(0);
    borders_.insert(horizon);
  }

  int machines() const { return machines_; }
  int k() const { return params_.k; }
  Time horizon() const { return horizon_; }
  const std::set<Time>& borders() const { return borders_; }
  std::size_t solution_size() const { return machine_of_.size(); }

  void insert(const Job& j) {
    if (j.start < 0 || j.length < 1 || j.end() > horizon_)
      throw std::invalid_argument("job outside horizon");
    all_.insert(j);
    if (crosses_some_border(j)) return;
    auto [bl, br] = region_of(j.start);
    split_while_large(br, recompute_region(bl, br));
  }

  void erase(JobId id) {
    const Job j = all_.get(id);
    all_.erase(id);
    if (!machine_of_.count(id)) return;
    auto [bl, br] = region_of(j.start);
    auto picks = recompute_region(bl, br);
    if ((int)picks.size() < machines_ * params_.k) {
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
    split_while_large(br, std::move(picks));
  }

  std::optional<int> query(JobId id) const {
    all_.get(id);  // unknown ids throw
    auto it = machine_of_.find(id);
    if (it == machine_of_.end()) return std::nullopt;
    return it->second;
  }

  Schedule schedule() const {
    Schedule s;
    for (const auto& [id, m] : machine_of_) s.assignment[id] = m;
    return s;
  }

  std::vector<std::pair<TimeRange, int>> region_sizes() const {
    std::vector<std::pair<TimeRange, int>> out;
    for (auto it = borders_.begin(); std::next(it) != borders_.end(); ++it) {
      Time lo = *it, hi = *std::next(it);
      int count = 0;
      for (auto jt = sol_by_start_.lower_bound({lo, 0});
           jt != sol_by_start_.end() && jt->first.first < hi; ++jt)
        ++count;
      out.push_back({TimeRange{lo, hi}, count});
    }
    return out;
  }

  std::vector<Job> solution_jobs() const {
    std::vector<Job> v;
    for (const auto& [key, job] : sol_by_start_) v.push_back(job);
    return v;
  }

 private:
  bool crosses_some_border(const Job& j) const {
    auto it = borders_.upper_bound(j.start);
    return it != borders_.end() && *it < j.end();
  }

  std::pair<Time, Time> region_of(Time start) const {
    auto it = borders_.upper_bound(start);
    return {*std::prev(it), *it};
  }

  // Exact M-machine greedy over jobs contained in [bl, br], simulated with
  // successor walks that skip already-scheduled jobs.
  std::vector<Job> recompute_region(Time bl, Time br) {
    for (auto it = sol_by_start_.lower_bound({bl, 0});
         it != sol_by_start_.end() && it->first.first < br;) {
      machine_of_.erase(it->second.id);
      it = sol_by_start_.erase(it);
    }
    std::vector<Job> picks;
    std::unordered_set<JobId> taken;
    std::vector<Time> free_at(machines_, bl);
    for (;;) {
      Time x = *std::min_element(free_at.begin(), free_at.end());
      if (x >= br) break;
      auto cand = all_.successor(std::max(x, bl));
      while (cand && taken.count(cand->id))
        cand = all_.successor_after(std::max(x, bl),
                                    {cand->end(), cand->start, cand->id});
      if (!cand || cand->end() > br) break;
      int best = -1;
      for (int m = 0; m < machines_; ++m)
        if (free_at[m] <= cand->start &&
            (best < 0 || free_at[m] > free_at[best]))
          best = m;
      free_at[best] = cand->end();
      taken.insert(cand->id);
      picks.push_back(*cand);
      sol_by_start_.emplace(std::pair<Time, JobId>{cand->start, cand->id},
                            *cand);
      machine_of_[cand->id] = best;
    }
    // greedy emits picks in nondecreasing end order already
    return picks;
  }

  // Regions hold between MK and 2MK + M picks. A split at the end of the
  // MK-th pick leaves at least MK on either side: picks tied at the cut and
  // picks crossing it together occupy at most M-1 machines (the machine of
  // the MK-th pick itself holds neither), so the right side keeps at least
  // size - MK - (M-1) picks. At M = 1 this is exactly the single-machine
  // rule.
  void split_while_large(Time br, std::vector<Job> picks) {
    const int mk = machines_ * params_.k;
    while ((int)picks.size() >= 2 * mk + machines_ - 1) {
      Time cut = picks[mk - 1].end();
      borders_.insert(cut);
      // picks crossing the new border leave the solution
      for (const Job& p : picks) {
        if (crosses(p, cut)) {
          sol_by_start_.erase({p.start, p.id});
          machine_of_.erase(p.id);
        }
      }
      // the right side is solved afresh: the dropped crossers occupied
      // machines in the old run
      picks = recompute_region(cut, br);
    }
  }

  ApproxParams params_;
  Time horizon_;
  int machines_;
  JobTree all_;
  std::set<Time> borders_;
  std::map<std::pair<Time, JobId>, Job> sol_by_start_;
  std::unordered_map<JobId, int> machine_of_;
};

// ---------------------------------------------------------------------------
// Dynamic weighted scheduling on M machines. Borders keep the computed
// region reward within [M w K, 8 M w K + 2 M w] for the configured weight
// cap w; inside a region the schedule is built by computing a weighted
// maximum independent set M times on the residual jobs, each time through
// an integer reward-state DP over weights rounded down to powers of
// (1 + eps) and scaled by 1/eps.
class WeightedMultiDynScheduler {
 public:
  WeightedMultiDynScheduler(ApproxParams params, Time horizon, int machines,
                            Rat weight_cap)
      : params_(params),
        horizon_(horizon),
        machines_(machines),
        w_cap_(weight_cap),
        classes_(Rat(1) + params.epsilon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (machines < 1) throw std::invalid_argument("machines must be >= 1");
    if (w_cap_ < Rat(1)) throw std::invalid_argument("weight cap must be >= 1");
    borders_.insert(0);
    borders_.insert(horizon);
    Rat band = Rat(machines_) * w_cap_ * Rat(params_.k);
    low_band_ = band;
    high_band_ = Rat(8) * band + Rat(2) * Rat(machines_) * w_cap_;
    split_prefix_ = Rat(4) * band;
  }

  int machines() const { return machines_; }
  Rat weight_cap() const { return w_cap_; }
  const std::set<Time>& borders() const { return borders_; }

  void insert(const Job& j) {
    if (j.start < 0 || j.length < 1 || j.end() > horizon_)
      throw std::invalid_argument("job outside horizon");
    if (j.weight < Rat(1) || j.weight > w_cap_)
      throw std::invalid_argument("weight outside [1, w_cap]");
    if (jobs_.count(j.id))
      throw std::invalid_argument("duplicate job id " + std::to_string(j.id));
    jobs_.emplace(j.id, j);
    if (crosses_some_border(j)) return;
    fix_region(region_of(j.start));
  }

  void erase(JobId id) {
    auto it = jobs_.find(id);
    if (it == jobs_.end())
      throw std::invalid_argument("unknown job id " + std::to_string(id));
    Job j = it->second;
    jobs_.erase(it);
    if (!machine_of_.count(id)) return;
    fix_region(region_of(j.start), /*allow_merge=*/true);
  }

  std::optional<int> query(JobId id) const {
    auto it = machine_of_.find(id);
    if (it == machine_of_.end()) return std::nullopt;
    return it->second;
  }

  Schedule schedule() const {
    Schedule s;
    for (const auto& [id, m] : machine_of_) s.assignment[id] = m;
    return s;
  }

  Rat value() const {
    Rat total(0);
    for (const auto& [id, m] : machine_of_) total += jobs_.at(id).weight;
    return total;
  }

  std::vector<std::pair<TimeRange, Rat>> region_rewards() const {
    std::vector<std::pair<TimeRange, Rat>> out;
    for (auto it = borders_.begin(); std::next(it) != borders_.end(); ++it) {
      Time lo = *it, hi = *std::next(it);
      Rat total(0);
      for (const auto& [id, m] : machine_of_) {
        const Job& j = jobs_.at(id);
        if (j.start >= lo && j.end() <= hi) total += j.weight;
      }
      out.push_back({TimeRange{lo, hi}, total});
    }
    return out;
  }

 private:
  bool crosses_some_border(const Job& j) const {
    auto it = borders_.upper_bound(j.start);
    return it != borders_.end() && *it < j.end();
  }

  std::pair<Time, Time> region_of(Time start) const {
    auto it = borders_.upper_bound(start);
    return {*std::prev(it), *it};
  }

  // Recomputes a region; merges while its reward is too small, splits while
  // too large. Bounded by a settle guard that never trips in practice.
  void fix_region(std::pair<Time, Time> region, bool allow_merge = false) {
    auto [bl, br] = region;
    for (int rounds = 0; rounds < 64; ++rounds) {
      auto picks = solve_region(bl, br);
      Rat reward(0);
      for (const Job& p : picks) reward += p.weight;
      if (allow_merge && reward < low_band_ && (bl != 0 || br != horizon_)) {
        if (bl != 0) {
          borders_.erase(bl);
          bl = *std::prev(borders_.upper_bound(bl));
        } else {
          borders_.erase(br);
          br = *borders_.upper_bound(br);
        }
        continue;
      }
      if (reward > high_band_) {
        // border after the smallest end-prefix holding the split weight
        Rat prefix(0);
        Time cut = br;
        for (const Job& p : picks) {
          prefix += p.weight;
          if (prefix >= split_prefix_) {
            cut = p.end();
            break;
          }
        }
        if (cut > bl && cut < br) {
          borders_.insert(cut);
          solve_region(bl, cut);
          bl = cut;  // continue on the right side
          continue;
        }
      }
      break;
    }
  }

  // Weighted MIS computed M times on the residual jobs of [bl, br].
  std::vector<Job> solve_region(Time bl, Time br) {
    for (auto it = sol_by_start_.lower_bound({bl, 0});
         it != sol_by_start_.end() && it->first.first < br;) {
      machine_of_.erase(it->second.id);
      it = sol_by_start_.erase(it);
    }
    std::vector<Job> residual;
    for (const auto& [id, j] : jobs_)
      if (j.start >= bl && j.end() <= br) residual.push_back(j);

    std::vector<Job> all_picks;
    for (int m = 0; m < machines_; ++m) {
      auto picked = weighted_mis(residual);
      for (const Job& p : picked) {
        machine_of_[p.id] = m;
        sol_by_start_.emplace(std::pair<Time, JobId>{p.start, p.id}, p);
        all_picks.push_back(p);
        residual.erase(std::find_if(
            residual.begin(), residual.end(),
            [&](const Job& r) { return r.id == p.id; }));
      }
    }
    std::sort(all_picks.begin(), all_picks.end(), EndOrderLess{});
    return all_picks;
  }

  // Scaled integer value of a weight: floor((1+eps)^class / eps).
  std::int64_t scaled_value(const Rat& w) {
    auto key = std::make_pair(w.num(), w.den());
    auto it = scaled_cache_.find(key);
    if (it != scaled_cache_.end()) return it->second;
    int c = classes_.floor_index(w);
    // binary search the floor of value(c)/eps through exact comparisons
    std::int64_t lo = 1, hi = 2;
    Rat eps = params_.epsilon;
    while (classes_.value_at_least(c, Rat(hi) * eps)) hi *= 2;
    while (lo + 1 < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (classes_.value_at_least(c, Rat(mid) * eps)) lo = mid;
      else hi = mid;
    }
    scaled_cache_.emplace(key, lo);
    return lo;
  }

  // Reward-state DP: for each reachable scaled total, the earliest end
  // achieving it; transitions try one job per rounded weight class.
  std::vector<Job> weighted_mis(const std::vector<Job>& candidates) {
    std::map<int, std::vector<Job>> by_class;  // class -> jobs sorted by start
    for (const Job& j : candidates)
      by_class[classes_.floor_index(j.weight)].push_back(j);
    for (auto& [c, v] : by_class)
      std::sort(v.begin(), v.end(), [](const Job& a, const Job& b) {
        return std::tuple(a.start, a.id) < std::tuple(b.start, b.id);
      });
    auto earliest_of_class = [&](int c, Time from) -> const Job* {
      const Job* best = nullptr;
      for (const Job& j : by_class[c]) {
        if (j.start < from) continue;
        if (!best || end_order_key(j) < end_order_key(*best)) best = &j;
      }
      return best;
    };

    struct State {
      Time end;
      std::int64_t prev;
      JobId job;
    };
    std::map<std::int64_t, State> dp;  // scaled total -> state
    dp[0] = {std::numeric_limits<Time>::min(), -1, 0};
    for (auto it = dp.begin(); it != dp.end(); ++it) {
      for (const auto& [c, v] : by_class) {
        const Job* j = earliest_of_class(c, it->second.end);
        if (!j) continue;
        std::int64_t next = it->first + scaled_value(j->weight);
        auto ins = dp.find(next);
        if (ins == dp.end() || j->end() < ins->second.end)
          dp[next] = {j->end(), it->first, j->id};
      }
    }
    std::vector<Job> picked;
    if (dp.size() <= 1) return picked;
    std::int64_t best = dp.rbegin()->first;
    for (std::int64_t wv = best; wv > 0;) {
      const State& st = dp.at(wv);
      auto it = std::find_if(candidates.begin(), candidates.end(),
                             [&](const Job& j) { return j.id == st.job; });
      picked.push_back(*it);
      wv = st.prev;
    }
    return picked;
  }

  ApproxParams params_;
  Time horizon_;
  int machines_;
  Rat w_cap_, low_band_, high_band_, split_prefix_;
  PowerLadder classes_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> scaled_cache_;
  std::unordered_map<JobId, Job> jobs_;
  std::set<Time> borders_;
  std::map<std::pair<Time, JobId>, Job> sol_by_start_;
  std::unordered_map<JobId, int> machine_of_;
};

// ---------------------------------------------------------------------------
// Random partition over machines: every job is assigned one machine drawn
// uniformly from a seeded counter stream and lives in that machine's
// single-machine structure. Each operation touches exactly one structure.

// Minimal single-machine engine surface the partition forwards to.
class OneMachineEngine {
 public:
  virtual ~OneMachineEngine() = default;
  virtual void insert(const Job& j) = 0;
  virtual void erase(JobId id) = 0;
  virtual bool in_solution(JobId id) const = 0;
  virtual double value() const = 0;
};

// Exact oracle engine for measurement runs; recomputes on demand.
class ExactOneMachineEngine : public OneMachineEngine {
 public:
  explicit ExactOneMachineEngine(Time horizon, bool weighted)
      : horizon_(horizon), weighted_(weighted) {}

  void insert(const Job& j) override {
    if (!live_.emplace(j.id, j).second)
      throw std::invalid_argument("duplicate job id");
    dirty_ = true;
  }
  void erase(JobId id) override {
    if (!live_.erase(id)) throw std::invalid_argument("unknown job id");
    dirty_ = true;
  }
  bool in_solution(JobId id) const override {
    refresh();
    return cached_.solution.scheduled(id);
  }
  double value() const override {
    refresh();
    return cached_.value.to_double();
  }

 private:
  void refresh() const {
    if (!dirty_) return;
    std::vector<Job> jobs;
    jobs.reserve(live_.size());
    for (const auto& [id, j] : live_) jobs.push_back(j);
    cached_ = weighted_ ? exact_weighted_1m(jobs, TimeRange{0, horizon_})
                        : greedy_unweighted_1m(jobs, TimeRange{0, horizon_});
    dirty_ = false;
  }

  Time horizon_;
  bool weighted_;
  std::unordered_map<JobId, Job> live_;
  mutable OracleResult cached_;
  mutable bool dirty_ = false;
};

class DynamicOneMachineEngine : public OneMachineEngine {
 public:
  DynamicOneMachineEngine(ApproxParams params, Time horizon)
      : engine_(params, horizon) {}
  void insert(const Job& j) override { engine_.insert(j); }
  void erase(JobId id) override { engine_.erase(id); }
  bool in_solution(JobId id) const override {
    return engine_.query_in_solution(id);
  }
  double value() const override { return (double)engine_.solution_size(); }

 private:
  DynamicScheduler engine_;
};

class WeightedOneMachineEngine : public OneMachineEngine {
 public:
  WeightedOneMachineEngine(ApproxParams params, Time horizon, int offsets,
                           std::uint64_t seed)
      : engine_(params, horizon, offsets, seed) {}
  void insert(const Job& j) override { engine_.insert(j); }
  void erase(JobId id) override { engine_.erase(id); }
  bool in_solution(JobId id) const override {
    return engine_.extract_solution().scheduled(id);
  }
  double value() const override { return engine_.value(); }

 private:
  WeightedDynamicEnsemble engine_;
};

class PartitionScheduler {
 public:
  using EngineFactory = std::function<std::unique_ptr<OneMachineEngine>(int)>;

  PartitionScheduler(int machines, std::uint64_t seed, EngineFactory factory)
      : machines_(machines), draws_(seed) {
    if (machines < 1) throw std::invalid_argument("machines must be >= 1");
    for (int m = 0; m < machines; ++m) engines_.push_back(factory(m));
  }

  int machines() const { return machines_; }

  void insert(const Job& j) {
    if (owner_.count(j.id))
      throw std::invalid_argument("duplicate job id " + std::to_string(j.id));
    int m = (int)draws_.below((std::uint64_t)machines_);
    owner_[j.id] = m;
    last_op_forwards_ = 1;
    engines_[m]->insert(j);
  }

  void erase(JobId id) {
    auto it = owner_.find(id);
    if (it == owner_.end())
      throw std::invalid_argument("unknown job id " + std::to_string(id));
    last_op_forwards_ = 1;
    engines_[it->second]->erase(id);
    owner_.erase(it);
  }

  // Machine index when the owning structure schedules the job.
  std::optional<int> query(JobId id) const {
    auto it = owner_.find(id);
    if (it == owner_.end())
      throw std::invalid_argument("unknown job id " + std::to_string(id));
    last_op_forwards_ = 1;
    if (engines_[it->second]->in_solution(id)) return it->second;
    return std::nullopt;
  }

  double value() const {
    double total = 0.0;
    for (const auto& e : engines_) total += e->value();
    return total;
  }

  int last_op_forwards() const { return last_op_forwards_; }

 private:
  int machines_;
  SplitMix64 draws_;
  std::vector<std::unique_ptr<OneMachineEngine>> engines_;
  std::unordered_map<JobId, int> owner_;
  mutable int last_op_forwards_ = 0;
};

// ---------------------------------------------------------------------------
// Exact evaluation of the partition recurrence
//   f(X) = (1 - 1/M) f(X-1) + (1/M)(f(X-M) + 1),  f(X <= 0) = 0,
// as a test oracle. Numerators are tracked as integers scaled by M^X.
// The returned value satisfies f(X) >= X / (2M - 1).
inline boost::multiprecision::cpp_rational recurrence_lower_bound(int x,
                                                                  int m) {
  if (x < 0 || m < 1) throw std::invalid_argument("need x >= 0, m >= 1");
  using boost::multiprecision::cpp_rational;
  if (x == 0) return cpp_rational(0);
  std::vector<BigInt> a(x + 1);
  BigInt m_pow_m1 = 1;  // M^(M-1)
  for (int i = 0; i < m - 1; ++i) m_pow_m1 *= m;
  BigInt m_pow = 1;  // M^(X-1) as we go
  for (int i = 1; i <= x; ++i) {
    BigInt rec = BigInt(m - 1) * a[i - 1] + m_pow;
    if (i - m >= 0) rec += m_pow_m1 * a[i - m];
    a[i] = rec;
    m_pow *= m;
  }
  BigInt m_pow_x = m_pow;  // M^X
  if (BigInt(2 * m - 1) * a[x] < BigInt(x) * m_pow_x)
    throw std::logic_error("partition recurrence dropped below X/(2M-1)");
  return cpp_rational(a[x]) / cpp_rational(m_pow_x);
}

}  // namespace isched
