#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "isched/core.hpp"
#include "isched/dynamic_unweighted.hpp"
#include "isched/lca.hpp"
#include "isched/multi_machine.hpp"
#include "isched/oracles.hpp"
#include "isched/trace.hpp"
#include "isched/weighted_dynamic.hpp"

namespace isched {

struct RunOptions {
  Rat epsilon = Rat(1, 2);
  int machines = 1;
  Time horizon = 1 << 10;
  int oracle_every = 0;  // 0 = off; k = recompute the oracle every k-th op
  std::uint64_t seed = 0;
  int offsets = 5;            // weighted engine offset instances
  Rat weight_cap = Rat(64);   // wmdyn only
  std::function<void(Time, const std::optional<Job>&)> probe_log;  // lca only
  std::ostream* dump_cells = nullptr;  // wdyn cell diagnostics
};

// Replay outcome. All fields are deterministic for a fixed
// (algo, trace, options) except the latency percentiles.
struct RunReport {
  std::string algo;
  Rat epsilon = Rat(1, 2);
  int machines = 1;
  Time horizon = 0;
  std::uint64_t seed = 0;
  int offsets = 1;

  std::size_t ops = 0, inserts = 0, deletes = 0, queries = 0;
  double final_value = 0.0;
  std::vector<std::pair<std::size_t, double>> ratio_series;
  double ratio_min = 1.0;
  double ratio_mean = 1.0;
  std::uint64_t probe_max = 0;
  double probe_mean = 0.0;
  int violations = 0;
  double latency_p50_us = 0.0, latency_p90_us = 0.0, latency_p99_us = 0.0;

  void write(std::ostream& os) const {
    os << "algo=" << algo << "\n";
    os << "epsilon=" << epsilon.to_string() << "\n";
    os << "machines=" << machines << "\n";
    os << "horizon=" << horizon << "\n";
    os << "seed=" << seed << "\n";
    os << "offsets=" << offsets << "\n";
    os << "ops=" << ops << "\n";
    os << "inserts=" << inserts << "\n";
    os << "deletes=" << deletes << "\n";
    os << "queries=" << queries << "\n";
    os << "final_value=" << final_value << "\n";
    os << "violations=" << violations << "\n";
    if (!ratio_series.empty()) {
      os << "ratio_min=" << ratio_min << "\n";
      os << "ratio_mean=" << ratio_mean << "\n";
      for (const auto& [op, r] : ratio_series)
        os << "ratio " << op << " " << r << "\n";
    }
    if (queries > 0 && probe_max > 0) {
      os << "probe_max=" << probe_max << "\n";
      os << "probe_mean=" << probe_mean << "\n";
    }
    // wall-clock fields; excluded from byte-for-byte replay comparisons
    os << "latency_p50_us=" << latency_p50_us << "\n";
    os << "latency_p90_us=" << latency_p90_us << "\n";
    os << "latency_p99_us=" << latency_p99_us << "\n";
  }
};

namespace detail {

inline void require_unit_weight(const Job& j, const char* algo) {
  if (j.weight != Rat(1))
    throw std::invalid_argument(std::string(algo) +
                                " schedules unit-weight jobs only");
}


// Uniform adapter over the engines the harness can drive.
class EngineAdapter {
 public:
  virtual ~EngineAdapter() = default;
  virtual void insert(const Job& j) = 0;
  virtual void erase(JobId id) = 0;
  // returns (in solution, probes used) for instrumented engines
  virtual std::pair<bool, std::uint64_t> query(JobId id) = 0;
  virtual double value() = 0;
  // exact optimum of the live set under this engine's objective
  virtual double oracle(std::span<const Job> live) = 0;
  // post-value hook: engines that can extract a schedule validate it here
  virtual bool audit(std::span<const Job>) { return true; }
  virtual void dump(std::ostream&) {}
};

class Dyn1Adapter : public EngineAdapter {
 public:
  Dyn1Adapter(const RunOptions& o)
      : eng_(ApproxParams::from_epsilon(o.epsilon), o.horizon) {}
  void insert(const Job& j) override {
    require_unit_weight(j, "dyn1");
    eng_.insert(j);
  }
  void erase(JobId id) override { eng_.erase(id); }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    return {eng_.query_in_solution(id), 0};
  }
  double value() override { return (double)eng_.solution_size(); }
  double oracle(std::span<const Job> live) override {
    return greedy_unweighted_1m(live, TimeRange{0, eng_.horizon()})
        .value.to_double();
  }

 private:
  DynamicScheduler eng_;
};

class LcaAdapter : public EngineAdapter {
 public:
  LcaAdapter(const RunOptions& o)
      : params_(ApproxParams::from_epsilon(o.epsilon)),
        horizon_(o.horizon),
        probe_log_(o.probe_log) {}
  void insert(const Job& j) override {
    require_unit_weight(j, "lca");
    live_.emplace(j.id, j);
    dirty_ = true;
  }
  void erase(JobId id) override {
    if (!live_.erase(id)) throw std::invalid_argument("unknown job id");
    dirty_ = true;
  }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    refresh();
    auto ans = lca_query(live_.at(id), params_, *oracle_, horizon_);
    return {ans.in_solution, ans.probes};
  }
  double value() override {
    refresh();
    double n = 0;
    for (const auto& [id, j] : live_)
      if (lca_query(j, params_, *oracle_, horizon_).in_solution) n += 1;
    return n;
  }
  double oracle(std::span<const Job> live) override {
    return greedy_unweighted_1m(live, TimeRange{0, horizon_})
        .value.to_double();
  }

 private:
  void refresh() {
    if (!dirty_ && oracle_) return;
    std::vector<Job> jobs;
    jobs.reserve(live_.size());
    for (const auto& [id, j] : live_) jobs.push_back(j);
    oracle_ = std::make_unique<SuccessorOracle>(jobs);
    if (probe_log_) oracle_->set_probe_log(probe_log_);
    dirty_ = false;
  }

  ApproxParams params_;
  Time horizon_;
  std::unordered_map<JobId, Job> live_;
  std::unique_ptr<SuccessorOracle> oracle_;
  bool dirty_ = true;
  std::function<void(Time, const std::optional<Job>&)> probe_log_;
};

class WdynAdapter : public EngineAdapter {
 public:
  WdynAdapter(const RunOptions& o)
      : horizon_(o.horizon),
        eng_(ApproxParams::from_epsilon(o.epsilon), o.horizon, o.offsets,
             o.seed) {}
  void insert(const Job& j) override { eng_.insert(j); }
  void erase(JobId id) override { eng_.erase(id); }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    return {eng_.extract_solution().scheduled(id), 0};
  }
  double value() override { return eng_.value(); }
  double oracle(std::span<const Job> live) override {
    return exact_weighted_1m(live, TimeRange{0, horizon_}).value.to_double();
  }
  bool audit(std::span<const Job> live) override {
    Schedule s = eng_.extract_solution();
    return validate_schedule(live, s, 1);
  }
  void dump(std::ostream& os) override {
    for (const auto& inst : eng_.instances()) {
      os << "offset=" << inst.offset() << "\n";
      inst.dump_cells(os);
    }
  }

 private:
  Time horizon_;
  WeightedDynamicEnsemble eng_;
};

class MdynAdapter : public EngineAdapter {
 public:
  MdynAdapter(const RunOptions& o)
      : machines_(o.machines),
        eng_(ApproxParams::from_epsilon(o.epsilon), o.horizon, o.machines) {}
  void insert(const Job& j) override {
    require_unit_weight(j, "mdyn");
    eng_.insert(j);
  }
  void erase(JobId id) override { eng_.erase(id); }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    return {eng_.query(id).has_value(), 0};
  }
  double value() override { return (double)eng_.solution_size(); }
  double oracle(std::span<const Job> live) override {
    return greedy_unweighted_Mm(live, machines_).value.to_double();
  }

 private:
  int machines_;
  MultiDynScheduler eng_;
};

class WmdynAdapter : public EngineAdapter {
 public:
  WmdynAdapter(const RunOptions& o)
      : machines_(o.machines),
        eng_(ApproxParams::from_epsilon(o.epsilon), o.horizon, o.machines,
             o.weight_cap) {}
  void insert(const Job& j) override { eng_.insert(j); }
  void erase(JobId id) override { eng_.erase(id); }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    return {eng_.query(id).has_value(), 0};
  }
  double value() override { return eng_.value().to_double(); }
  double oracle(std::span<const Job> live) override {
    if (live.size() > 18 || machines_ > 3)
      return -1.0;  // no exact oracle at this size
    return exact_weighted_Mm_bruteforce(live, machines_).value.to_double();
  }

 private:
  int machines_;
  WeightedMultiDynScheduler eng_;
};

class PartitionAdapter : public EngineAdapter {
 public:
  PartitionAdapter(const RunOptions& o, bool weighted)
      : machines_(o.machines), weighted_(weighted), horizon_(o.horizon) {
    auto params = ApproxParams::from_epsilon(o.epsilon);
    PartitionScheduler::EngineFactory factory;
    if (weighted) {
      factory = [params, o](int m) -> std::unique_ptr<OneMachineEngine> {
        return std::make_unique<WeightedOneMachineEngine>(
            params, o.horizon, o.offsets, o.seed * 1000003 + m);
      };
    } else {
      factory = [params, o](int) -> std::unique_ptr<OneMachineEngine> {
        return std::make_unique<DynamicOneMachineEngine>(params, o.horizon);
      };
    }
    eng_ = std::make_unique<PartitionScheduler>(o.machines, o.seed,
                                                std::move(factory));
  }
  void insert(const Job& j) override {
    if (!weighted_) require_unit_weight(j, "part-u");
    eng_->insert(j);
  }
  void erase(JobId id) override { eng_->erase(id); }
  std::pair<bool, std::uint64_t> query(JobId id) override {
    return {eng_->query(id).has_value(), 0};
  }
  double value() override { return eng_->value(); }
  double oracle(std::span<const Job> live) override {
    if (!weighted_)
      return greedy_unweighted_Mm(live, machines_).value.to_double();
    if (live.size() > 18 || machines_ > 3) return -1.0;
    return exact_weighted_Mm_bruteforce(live, machines_).value.to_double();
  }

 private:
  int machines_;
  bool weighted_;
  Time horizon_;
  std::unique_ptr<PartitionScheduler> eng_;
};

inline std::unique_ptr<EngineAdapter> make_engine(const std::string& algo,
                                                  const RunOptions& o) {
  if (algo == "dyn1") return std::make_unique<Dyn1Adapter>(o);
  if (algo == "lca") return std::make_unique<LcaAdapter>(o);
  if (algo == "wdyn") return std::make_unique<WdynAdapter>(o);
  if (algo == "mdyn") return std::make_unique<MdynAdapter>(o);
  if (algo == "wmdyn") return std::make_unique<WmdynAdapter>(o);
  if (algo == "part-u") return std::make_unique<PartitionAdapter>(o, false);
  if (algo == "part-w") return std::make_unique<PartitionAdapter>(o, true);
  throw std::invalid_argument("unknown algorithm '" + algo + "'");
}

}  // namespace detail

// Replays a trace against the chosen engine. With oracle checking enabled,
// the exact optimum is recomputed every k-th event and the value ratio is
// recorded; any ratio above 1 (plus arithmetic tolerance), invalid
// extraction, failed expectation, or structural error counts as a violation.
inline RunReport run_trace(const std::string& algo,
                           const std::vector<TraceEvent>& events,
                           const RunOptions& opts) {
  RunReport rep;
  rep.algo = algo;
  rep.epsilon = opts.epsilon;
  rep.machines = opts.machines;
  rep.horizon = opts.horizon;
  rep.seed = opts.seed;
  rep.offsets = opts.offsets;

  auto engine = detail::make_engine(algo, opts);
  std::unordered_map<JobId, Job> live;
  std::vector<double> latencies;
  latencies.reserve(events.size());
  std::uint64_t probe_total = 0;
  double ratio_sum = 0.0;

  auto record_ratio = [&]() {
    std::vector<Job> jobs;
    jobs.reserve(live.size());
    for (const auto& [id, j] : live) jobs.push_back(j);
    double opt = engine->oracle(jobs);
    if (opt < 0) return;  // oracle unavailable at this size
    double val = engine->value();
    double ratio = opt == 0.0 ? 1.0 : val / opt;
    if (ratio > 1.0 + 1e-9) ++rep.violations;
    rep.ratio_series.push_back({rep.ops, ratio});
    rep.ratio_min = std::min(rep.ratio_min, ratio);
    ratio_sum += ratio;
    if (!engine->audit(jobs)) ++rep.violations;
  };

  for (const TraceEvent& e : events) {
    auto t0 = std::chrono::steady_clock::now();
    switch (e.op) {
      case TraceEvent::Op::Insert: {
        Job j = e.job();
        if (live.count(j.id))
          throw std::invalid_argument("trace inserts duplicate id " +
                                      std::to_string(j.id));
        engine->insert(j);
        live.emplace(j.id, j);
        ++rep.inserts;
        break;
      }
      case TraceEvent::Op::Delete: {
        if (!live.count(e.id))
          throw std::invalid_argument("trace deletes unknown id " +
                                      std::to_string(e.id));
        engine->erase(e.id);
        live.erase(e.id);
        ++rep.deletes;
        break;
      }
      case TraceEvent::Op::Query: {
        if (!live.count(e.id))
          throw std::invalid_argument("trace queries unknown id " +
                                      std::to_string(e.id));
        auto [in_sol, probes] = engine->query(e.id);
        ++rep.queries;
        probe_total += probes;
        rep.probe_max = std::max(rep.probe_max, probes);
        if (e.expect && (*e.expect != Rat(in_sol ? 1 : 0))) ++rep.violations;
        break;
      }
      case TraceEvent::Op::Value: {
        double v = engine->value();
        rep.final_value = v;
        if (e.expect &&
            std::abs(v - e.expect->to_double()) > 1e-9 * (1.0 + std::abs(v)))
          ++rep.violations;
        break;
      }
      case TraceEvent::Op::Report:
        record_ratio();
        break;
    }
    auto t1 = std::chrono::steady_clock::now();
    latencies.push_back(
        std::chrono::duration<double, std::micro>(t1 - t0).count());
    ++rep.ops;
    if (opts.oracle_every > 0 && rep.ops % (std::size_t)opts.oracle_every == 0)
      record_ratio();
  }
  rep.final_value = engine->value();
  if (opts.dump_cells) engine->dump(*opts.dump_cells);
  if (!rep.ratio_series.empty())
    rep.ratio_mean = ratio_sum / (double)rep.ratio_series.size();
  if (rep.queries > 0) rep.probe_mean = (double)probe_total / rep.queries;
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    auto pct = [&](double p) {
      std::size_t i = (std::size_t)(p * (latencies.size() - 1));
      return latencies[i];
    };
    rep.latency_p50_us = pct(0.50);
    rep.latency_p90_us = pct(0.90);
    rep.latency_p99_us = pct(0.99);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Seeded Monte-Carlo experiments for the random-partition reductions.

struct MonteCarloReport {
  std::string experiment;
  int trials = 0;
  int machines = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci95_lo = 0.0, ci95_hi = 0.0;

  void write(std::ostream& os) const {
    os << "experiment=" << experiment << "\n";
    os << "trials=" << trials << "\n";
    os << "machines=" << machines << "\n";
    os << "mean=" << mean << "\n";
    os << "stddev=" << stddev << "\n";
    os << "ci95_lo=" << ci95_lo << "\n";
    os << "ci95_hi=" << ci95_hi << "\n";
  }
};

inline MonteCarloReport monte_carlo(const std::string& experiment, int trials,
                                    std::uint64_t seed, int machines = 2) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  MonteCarloReport rep;
  rep.experiment = experiment;
  rep.trials = trials;
  rep.machines = machines;
  std::vector<double> stats;
  stats.reserve(trials);

  for (int t = 0; t < trials; ++t) {
    std::uint64_t trial_seed = seed + (std::uint64_t)t;
    if (experiment == "tight-unweighted") {
      const int n = 400;
      PartitionScheduler part(machines, trial_seed, [&](int) {
        return std::make_unique<ExactOneMachineEngine>(n + machines, false);
      });
      for (int i = 0; i < n; ++i)
        part.insert(Job{(JobId)i, i, machines, Rat(1)});
      stats.push_back(part.value() / n);
    } else if (experiment == "random-unweighted") {
      const Time horizon = 256;
      SplitMix64 rng(trial_seed * 3 + 1);
      std::vector<Job> jobs;
      for (int i = 0; i < 120; ++i) {
        Time len = rng.range(1, 24);
        jobs.push_back(Job{(JobId)i, rng.range(0, horizon - len), len, Rat(1)});
      }
      PartitionScheduler part(machines, trial_seed, [&](int) {
        return std::make_unique<ExactOneMachineEngine>(horizon, false);
      });
      for (const Job& j : jobs) part.insert(j);
      double opt = greedy_unweighted_Mm(jobs, machines).value.to_double();
      stats.push_back(opt == 0 ? 1.0 : part.value() / opt);
    } else if (experiment == "random-weighted") {
      // adversarial nesting: groups of M pairwise contained jobs; the
      // optimum schedules all of them
      const int groups = 40;
      SplitMix64 rng(trial_seed * 5 + 3);
      PartitionScheduler part(machines, trial_seed, [&](int) {
        return std::make_unique<ExactOneMachineEngine>(
            (Time)groups * 2 * (machines + 1), true);
      });
      Rat opt(0);
      JobId next = 0;
      for (int g = 0; g < groups; ++g) {
        Time base = (Time)g * 2 * (machines + 1);
        for (int level = 0; level < machines; ++level) {
          Job j{next++, base + level, 2 * ((Time)machines - level) + 1,
                Rat(rng.range(1, 8))};
          part.insert(j);
          opt += j.weight;
        }
      }
      stats.push_back(part.value() / opt.to_double());
    } else {
      throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }
  }

  double sum = 0.0;
  for (double s : stats) sum += s;
  rep.mean = sum / trials;
  double var = 0.0;
  for (double s : stats) var += (s - rep.mean) * (s - rep.mean);
  rep.stddev = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
  double half = 1.96 * rep.stddev / std::sqrt((double)trials);
  rep.ci95_lo = rep.mean - half;
  rep.ci95_hi = rep.mean + half;
  return rep;
}

}  // namespace isched
