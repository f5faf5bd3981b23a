#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "isched/core.hpp"
#include "isched/ladder.hpp"
#include "isched/oracles.hpp"
#include "isched/rng.hpp"

namespace isched {

// Endpoint of a scaffold job, carrying the job's full weight.
struct WeightedPoint {
  Time time;
  Rat weight;
  JobId source;
  bool is_start;
};

// Jobs of one rounded weight class inside a cell's subtree, sorted by
// (start, id) with a suffix argmin of the greedy key for earliest-end
// lookups.
struct ClassArray {
  std::vector<Job> jobs;
  std::vector<int> suffix_min;  // index of the best (end, start, id) from i on

  void rebuild_suffix() {
    suffix_min.assign(jobs.size(), 0);
    for (int i = (int)jobs.size() - 1; i >= 0; --i) {
      suffix_min[i] = i;
      if (i + 1 < (int)jobs.size()) {
        int cand = suffix_min[i + 1];
        if (end_order_key(jobs[cand]) < end_order_key(jobs[i]))
          suffix_min[i] = cand;
      }
    }
  }

  // Earliest-ending job with start >= x, or none.
  const Job* earliest_from(Time x) const {
    auto it = std::lower_bound(
        jobs.begin(), jobs.end(), x,
        [](const Job& j, Time t) { return j.start < t; });
    if (it == jobs.end()) return nullptr;
    return &jobs[suffix_min[it - jobs.begin()]];
  }
};

struct SparseDpResult {
  int state = -1;        // reward ladder exponent, -1 = zero
  double value = 0.0;    // realized ladder value
  std::vector<Job> jobs;
  Rat true_weight = Rat(0);
};

namespace detail {

// One table of the reward-state DP: for every reachable rounded-reward state,
// the earliest end achieving it with jobs starting at or after the anchor.
struct SuffixTable {
  static constexpr Time kInf = std::numeric_limits<Time>::max();
  struct Entry {
    Time end = kInf;
    int count = 0;
    int prev = -2;   // previous state slot, -2 = unreachable
    int cls = -1;    // class index taken
    JobId job = 0;
  };
  Time anchor = 0;
  std::vector<Entry> by_state;            // slot s+1 holds ladder state s
  std::vector<std::pair<Time, int>> readout;  // (end asc, max state)

  int best_state_until(Time b) const {
    auto it = std::upper_bound(
        readout.begin(), readout.end(), b,
        [](Time t, const std::pair<Time, int>& e) { return t < e.first; });
    if (it == readout.begin()) return -1;
    return std::prev(it)->second;
  }
};

// Shared exact-rounding context: reward ladder, weight classes, and the
// memoized state transition table.
class RoundingContext {
 public:
  explicit RoundingContext(const ApproxParams& params)
      : params_(params),
        // The public contract promises a (1-eps) fraction of the sparse
        // optimum; running the internal rounding at eps/4 leaves room for
        // the three stacked losses (class rounding, drops, state rounding).
        reward_base_(Rat(1) + params.epsilon / (Rat(4) * Rat(params.k))),
        class_base_(Rat(1) + params.epsilon / Rat(4)),
        reward_(reward_base_),
        classes_(class_base_) {}

  const ApproxParams& params() const { return params_; }
  const PowerLadder& reward() const { return reward_; }
  const PowerLadder& classes() const { return classes_; }

  int class_of(const Rat& w) {
    auto key = std::make_pair(w.num(), w.den());
    auto it = class_cache_.find(key);
    if (it != class_cache_.end()) return it->second;
    int c = classes_.floor_index(w);
    class_cache_.emplace(key, c);
    return c;
  }

  // round-down-to-reward-ladder of value(s) + class_value(c).
  int transition(int s, int c) {
    std::uint64_t key = ((std::uint64_t)(std::uint32_t)(s + 1) << 32) |
                        (std::uint32_t)c;
    auto it = trans_cache_.find(key);
    if (it != trans_cache_.end()) return it->second;
    int r = reward_.floor_index_sum_power(s, classes_, c);
    trans_cache_.emplace(key, r);
    return r;
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const {
      return std::hash<std::int64_t>()(p.first * 1000003 ^ p.second);
    }
  };
  ApproxParams params_;
  Rat reward_base_, class_base_;
  PowerLadder reward_, classes_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, int, PairHash>
      class_cache_;
  std::unordered_map<std::uint64_t, int> trans_cache_;
};

// Runs the reward-state sweep over per-class earliest-end arrays. All jobs
// must start at or after `anchor`; the caller filters ends at readout time.
inline SuffixTable build_suffix_table(
    RoundingContext& ctx, const std::map<int, ClassArray>& classes,
    Time anchor, int min_class = -1) {
  SuffixTable t;
  t.anchor = anchor;
  t.by_state.resize(1);
  t.by_state[0] = SuffixTable::Entry{anchor, 0, -2, -1, 0};
  for (int slot = 0; slot < (int)t.by_state.size(); ++slot) {
    const auto ent = t.by_state[slot];  // copy: the vector grows below
    if (ent.end == SuffixTable::kInf) continue;
    Time from = std::max(ent.end, anchor);
    for (const auto& [cls, arr] : classes) {
      if (cls < min_class) continue;
      const Job* j = arr.earliest_from(from);
      if (!j) continue;
      int next = ctx.transition(slot - 1, cls);
      if (next < 0 || next == slot - 1) continue;
      if ((int)t.by_state.size() <= next + 1)
        t.by_state.resize(next + 2);
      auto& tgt = t.by_state[next + 1];
      if (std::tuple(j->end(), ent.count + 1) < std::tuple(tgt.end, tgt.count)) {
        tgt.end = j->end();
        tgt.count = ent.count + 1;
        tgt.prev = slot - 1;
        tgt.cls = cls;
        tgt.job = j->id;
      }
    }
  }
  // readout staircase: for increasing end, the best reachable state
  std::vector<std::pair<Time, int>> finite;
  for (int s = 1; s < (int)t.by_state.size(); ++s)
    if (t.by_state[s].end != SuffixTable::kInf)
      finite.push_back({t.by_state[s].end, s - 1});
  std::sort(finite.begin(), finite.end());
  for (const auto& [e, s] : finite) {
    if (t.readout.empty() || s > t.readout.back().second) {
      if (!t.readout.empty() && t.readout.back().first == e)
        t.readout.back().second = s;
      else
        t.readout.push_back({e, s});
    }
  }
  return t;
}

// Walks table back-links from `state`, resolving job ids into jobs.
inline void extract_table_path(const SuffixTable& t, int state,
                               std::vector<JobId>& out) {
  int slot = state + 1;
  while (slot > 0 && t.by_state[slot].prev != -2) {
    out.push_back(t.by_state[slot].job);
    slot = t.by_state[slot].prev + 1;
  }
}

}  // namespace detail

// Fully dynamic (1+O(eps))-approximate weighted interval scheduling on one
// machine, for one fixed random offset. Jobs are shifted by the offset onto
// a doubled axis and assigned to the cell of the halving hierarchy whose
// length matches theirs; each update rebuilds the scaffold (chosen set and
// endpoint multiset), the grids, and the segment tables of every cell on the
// root path, bottom up.
class WeightedDynamicScheduler {
 public:
  struct Cell;

  WeightedDynamicScheduler(ApproxParams params, Time horizon, Time offset)
      : params_(params), ctx_(params), horizon_(horizon), offset_(offset) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (offset < 0 || offset > horizon)
      throw std::invalid_argument("offset must lie in [0, horizon]");
    padded_ = 1;
    while (padded_ < horizon) padded_ *= 2;
    axis_ = 2 * padded_;
    log_axis_ = 1;
    while ((Time(1) << log_axis_) < axis_) ++log_axis_;
  }

  Time horizon() const { return horizon_; }
  Time offset() const { return offset_; }
  Time axis() const { return axis_; }

  void insert(const Job& j) {
    if (jobs_.count(j.id))
      throw std::invalid_argument("duplicate job id " + std::to_string(j.id));
    if (j.start < 0 || j.length < 1 || j.end() > horizon_)
      throw std::invalid_argument("job outside horizon");
    if (j.weight < Rat(1))
      throw std::invalid_argument("weights must be >= 1");
    jobs_.emplace(j.id, j);
    Job shifted = j;
    shifted.start += offset_;
    auto key = assign_cell(shifted);
    if (!key) {
      ignored_.insert(j.id);
      return;
    }
    placement_[j.id] = *key;
    Cell* c = ensure_cell(*key);
    c->assigned.emplace(j.id, shifted);
    rebuild_path(c);
  }

  void erase(JobId id) {
    auto it = jobs_.find(id);
    if (it == jobs_.end())
      throw std::invalid_argument("unknown job id " + std::to_string(id));
    jobs_.erase(it);
    if (ignored_.erase(id)) return;
    auto key = placement_.at(id);
    placement_.erase(id);
    Cell* c = cells_.at(key).get();
    c->assigned.erase(id);
    rebuild_path(c);
  }

  double value() const {
    const Cell* root = find_cell({0, 0});
    if (!root) return 0.0;
    return root->dense_value(0, axis_);
  }

  Schedule extract_solution() const {
    Schedule s;
    const Cell* root = find_cell({0, 0});
    if (!root) return s;
    std::vector<JobId> ids;
    extract_dense(*root, 0, axis_, ids);
    for (JobId id : ids) s.assignment[id] = 0;
    return s;
  }

  // --- cell internals, exposed for audits -------------------------------

  using CellKey = std::pair<int, Time>;  // (depth, index)

  struct Cell {
    int depth = 0;
    Time lo = 0, hi = 0;
    CellKey key{0, 0};

    std::map<JobId, Job> assigned;               // C'(Q), shifted coords
    std::vector<Job> chosen;                     // scaffold picks from C'(Q)
    std::vector<WeightedPoint> p_points;         // sorted by time
    std::vector<Rat> p_prefix;                   // inclusive prefix weights
    std::vector<Time> z_prime;
    std::vector<Time> z;
    std::map<int, ClassArray> classes;           // over the whole subtree

    // segment machinery (rebuilt by combine)
    std::vector<Time> union_grid;
    std::vector<detail::SuffixTable> tables;
    std::vector<int> table_of;                   // union index -> table id
    struct Row {
      std::vector<double> val;
      std::vector<int> choice;  // piece left index, or -1 for "skip"
    };
    std::vector<Row> rows;                       // one per z point
    std::unordered_map<Time, int> union_index;
    std::unordered_map<Time, int> z_index;

    Rat p_total() const { return p_prefix.empty() ? Rat(0) : p_prefix.back(); }

    // Total weight of points with time in [a, b].
    Rat p_weight_in(Time a, Time b) const {
      auto lo_it = std::lower_bound(
          p_points.begin(), p_points.end(), a,
          [](const WeightedPoint& p, Time t) { return p.time < t; });
      auto hi_it = std::upper_bound(
          p_points.begin(), p_points.end(), b,
          [](Time t, const WeightedPoint& p) { return t < p.time; });
      int l = (int)(lo_it - p_points.begin());
      int h = (int)(hi_it - p_points.begin());
      if (h <= l) return Rat(0);
      return p_prefix[h - 1] - (l > 0 ? p_prefix[l - 1] : Rat(0));
    }

    double dense_value(Time a, Time b) const {
      auto zi = z_index.find(a);
      auto uj = union_index.find(b);
      if (zi == z_index.end() || uj == union_index.end()) return 0.0;
      return rows[zi->second].val[uj->second];
    }

    std::size_t dp_entries() const {
      std::size_t n = 0;
      for (const auto& r : rows) n += r.val.size();
      return n;
    }
  };

  const Cell* find_cell(CellKey key) const {
    auto it = cells_.find(key);
    return it == cells_.end() ? nullptr : it->second.get();
  }

  template <typename Fn>
  void for_each_cell(Fn&& fn) const {
    for (const auto& [key, cell] : cells_) fn(*cell);
  }

  // All subtree jobs of a cell (shifted coordinates).
  static std::vector<Job> subtree_jobs(const Cell& c) {
    std::vector<Job> v;
    for (const auto& [cls, arr] : c.classes)
      v.insert(v.end(), arr.jobs.begin(), arr.jobs.end());
    return v;
  }

  std::size_t ignored_count() const { return ignored_.size(); }
  std::size_t live_jobs() const { return jobs_.size(); }

  void dump_cells(std::ostream& os) const {
    for (const auto& [key, c] : cells_) {
      os << "cell depth=" << c->depth << " lo=" << c->lo << " hi=" << c->hi
         << " cprime=" << c->assigned.size() << " chosen=" << c->chosen.size()
         << " p=" << c->p_points.size() << " z=" << c->z.size()
         << " dp=" << c->dp_entries() << "\n";
    }
  }

  detail::RoundingContext& rounding() { return ctx_; }

  // Standalone sparse solver over a cell's subtree (used by audits; the
  // combine step batches the same sweep per anchor instead).
  SparseDpResult sparse_dp(const Cell& cell, TimeRange range) {
    return sparse_dp_over_classes(ctx_, cell.classes, range);
  }

  static std::map<int, ClassArray> make_class_view(
      detail::RoundingContext& ctx, std::span<const Job> jobs) {
    std::map<int, ClassArray> classes;
    for (const Job& j : jobs) classes[ctx.class_of(j.weight)].jobs.push_back(j);
    for (auto& [cls, arr] : classes) {
      std::sort(arr.jobs.begin(), arr.jobs.end(),
                [](const Job& a, const Job& b) {
                  return std::tuple(a.start, a.id) < std::tuple(b.start, b.id);
                });
      arr.rebuild_suffix();
    }
    return classes;
  }

  static SparseDpResult sparse_dp_over_classes(
      detail::RoundingContext& ctx, const std::map<int, ClassArray>& classes,
      TimeRange range) {
    // Approximate the heaviest job contained in the range through the
    // nested weight-class structures, then drop every class whose value is
    // below eps * w_max / (4K). The class gap is computed in exponent space
    // so huge weights never materialize as rationals.
    int cmax = -1;
    for (auto it = classes.rbegin(); it != classes.rend(); ++it) {
      const Job* j = it->second.earliest_from(range.lo);
      if (j && j->end() <= range.hi) {
        cmax = it->first;
        break;
      }
    }
    const ApproxParams& params = ctx.params();
    int min_class = -1;
    if (cmax >= 0) {
      // smallest m with class_base^m >= 4K/eps
      Rat ratio = Rat(4 * params.k) / params.epsilon;
      int m = ctx.classes().floor_index(ratio);
      if (!ctx.classes().value_at_least(m, ratio)) ++m;
      min_class = cmax - m;
    }
    detail::SuffixTable t =
        detail::build_suffix_table(ctx, classes, range.lo, min_class);
    int state = t.best_state_until(range.hi);
    SparseDpResult res;
    res.state = state;
    res.value = ctx.reward().value(state);
    std::vector<JobId> ids;
    detail::extract_table_path(t, state, ids);
    for (JobId id : ids) {
      for (const auto& [cls, arr] : classes) {
        auto it = std::find_if(arr.jobs.begin(), arr.jobs.end(),
                               [&](const Job& j) { return j.id == id; });
        if (it != arr.jobs.end()) {
          res.jobs.push_back(*it);
          res.true_weight += it->weight;
          break;
        }
      }
    }
    return res;
  }

 private:
  std::optional<CellKey> assign_cell(const Job& shifted) const {
    // Jobs longer than eps * padded horizon live at the root regardless.
    const Rat& eps = params_.epsilon;
    if (Rat(shifted.length) > eps * Rat(padded_)) return CellKey{0, 0};
    // Unique depth whose band (eps*len/2, eps*len] holds the job's length.
    for (int d = 1; (Time(1) << (log_axis_ - d)) >= 1; ++d) {
      Time cell_len = axis_ >> d;
      if (Rat(2 * shifted.length) > eps * Rat(cell_len)) {
        // length > eps*cell_len/2; band match also needs <= eps*cell_len,
        // which holds by failing the previous depth's test
        Time idx = shifted.start / cell_len;
        if (shifted.start + shifted.length <= (idx + 1) * cell_len)
          return CellKey{d, idx};
        return std::nullopt;  // straddles the cell boundary: ignored
      }
    }
    return std::nullopt;
  }

  Cell* ensure_cell(CellKey key) {
    auto it = cells_.find(key);
    if (it != cells_.end()) return it->second.get();
    auto cell = std::make_unique<Cell>();
    cell->depth = key.first;
    cell->key = key;
    Time len = axis_ >> key.first;
    cell->lo = key.second * len;
    cell->hi = cell->lo + len;
    Cell* raw = cell.get();
    cells_.emplace(key, std::move(cell));
    return raw;
  }

  Cell* child(const Cell& c, int side) const {
    auto it = cells_.find(CellKey{c.depth + 1, 2 * c.key.second + side});
    return it == cells_.end() ? nullptr : it->second.get();
  }

  void rebuild_path(Cell* c) {
    for (;;) {
      rebuild_pq(*c);
      rebuild_z(*c);
      rebuild_classes(*c);
      combine(*c);
      CellKey key = c->key;
      int depth = c->depth;
      // Cells left without jobs or children disappear again, so a delete
      // restores exactly the state from before the matching insert.
      if (c->assigned.empty() && !child(*c, 0) && !child(*c, 1))
        cells_.erase(key);
      if (depth == 0) break;
      c = ensure_cell(CellKey{depth - 1, key.second / 2});
    }
  }

  // --- scaffold ----------------------------------------------------------

  void set_p_points(Cell& c, std::vector<WeightedPoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const WeightedPoint& a, const WeightedPoint& b) {
                return a.time < b.time;
              });
    c.p_points = std::move(pts);
    c.p_prefix.clear();
    c.p_prefix.reserve(c.p_points.size());
    Rat run(0);
    for (const auto& p : c.p_points) {
      run += p.weight;
      c.p_prefix.push_back(run);
    }
  }

  // Quantile cuts: every open slice between consecutive cuts carries at most
  // `target` weight.
  static std::vector<Time> weight_quantiles(
      const std::vector<WeightedPoint>& pts, const Rat& target) {
    std::vector<Time> cuts;
    Rat run(0);
    for (std::size_t i = 0; i < pts.size();) {
      std::size_t j = i;
      Rat group(0);
      while (j < pts.size() && pts[j].time == pts[i].time) {
        group += pts[j].weight;
        ++j;
      }
      if (run + group > target) {
        cuts.push_back(pts[i].time);
        run = Rat(0);
      } else {
        run += group;
      }
      i = j;
    }
    return cuts;
  }

  // Rebuilds the chosen set and endpoint multiset of one cell from its
  // children's multisets. Assigned jobs are taken small to large; a job is
  // admitted when its weight is at least twice the point weight already
  // sitting inside its closed span, and its own endpoints then join the
  // multiset. The admitted set may overlap; only the endpoint weights
  // matter downstream.
  void rebuild_pq(Cell& c) {
    std::vector<WeightedPoint> pts;
    for (int side = 0; side < 2; ++side) {
      if (Cell* ch = child(c, side))
        pts.insert(pts.end(), ch->p_points.begin(), ch->p_points.end());
    }
    c.chosen.clear();

    std::vector<Job> candidates;
    candidates.reserve(c.assigned.size());
    for (const auto& [id, j] : c.assigned) candidates.push_back(j);
    std::sort(candidates.begin(), candidates.end(),
              [](const Job& a, const Job& b) {
                return std::tuple(a.length, a.id) < std::tuple(b.length, b.id);
              });

    for (const Job& j : candidates) {
      Rat inside(0);
      for (const auto& p : pts)
        if (p.time >= j.start && p.time <= j.end()) inside += p.weight;
      if (Rat(2) * inside <= j.weight) {
        c.chosen.push_back(j);
        pts.push_back({j.start, j.weight, j.id, true});
        pts.push_back({j.end(), j.weight, j.id, false});
      }
    }
    set_p_points(c, std::move(pts));

    // Auxiliary grid: weight quantiles of the multiset plus the cell bounds
    // and every chosen endpoint; each open slice holds at most a
    // 1/(4 log N) fraction of the multiset weight.
    c.z_prime = weight_quantiles(c.p_points, c.p_total() / Rat(4 * log_axis_));
    c.z_prime.push_back(c.lo);
    c.z_prime.push_back(c.hi);
    for (const Job& j : c.chosen) {
      c.z_prime.push_back(j.start);
      c.z_prime.push_back(j.end());
    }
    std::sort(c.z_prime.begin(), c.z_prime.end());
    c.z_prime.erase(std::unique(c.z_prime.begin(), c.z_prime.end()),
                    c.z_prime.end());
  }

  // Main grid: cell endpoints, evenly spaced points fine enough that every
  // assigned job covers one, and weight quantiles of the endpoint multiset.
  void rebuild_z(Cell& c) {
    c.z.clear();
    c.z.push_back(c.lo);
    c.z.push_back(c.hi);
    Time len = c.hi - c.lo;
    const Rat& eps = params_.epsilon;
    // spacing at most eps*len/2 so any band-length job covers a point
    Rat half_band = eps * Rat(len) / Rat(2);
    Time gap = half_band >= Rat(1)
                   ? half_band.num() / half_band.den()
                   : 1;
    for (Time t = c.lo + gap; t < c.hi; t += gap) c.z.push_back(t);
    Rat logsq((std::int64_t)log_axis_ * log_axis_);
    Rat eps4 = eps * eps * eps * eps;
    Rat target = eps4 * c.p_total() / logsq;
    auto cuts = weight_quantiles(c.p_points, target);
    c.z.insert(c.z.end(), cuts.begin(), cuts.end());
    std::sort(c.z.begin(), c.z.end());
    c.z.erase(std::unique(c.z.begin(), c.z.end()), c.z.end());
  }

  void rebuild_classes(Cell& c) {
    c.classes.clear();
    auto add_job = [&](const Job& j) {
      c.classes[ctx_.class_of(j.weight)].jobs.push_back(j);
    };
    for (int side = 0; side < 2; ++side)
      if (Cell* ch = child(c, side))
        for (const auto& [cls, arr] : ch->classes)
          for (const Job& j : arr.jobs) add_job(j);
    for (const auto& [id, j] : c.assigned) add_job(j);
    for (auto& [cls, arr] : c.classes) {
      std::sort(arr.jobs.begin(), arr.jobs.end(),
                [](const Job& a, const Job& b) {
                  return std::tuple(a.start, a.id) < std::tuple(b.start, b.id);
                });
      arr.rebuild_suffix();
    }
  }

  // --- segment tables ----------------------------------------------------

  void combine(Cell& c) {
    // union grid over this cell's and both children's main grids
    c.union_grid = c.z;
    for (int side = 0; side < 2; ++side)
      if (Cell* ch = child(c, side))
        c.union_grid.insert(c.union_grid.end(), ch->z.begin(), ch->z.end());
    std::sort(c.union_grid.begin(), c.union_grid.end());
    c.union_grid.erase(std::unique(c.union_grid.begin(), c.union_grid.end()),
                       c.union_grid.end());
    const int u = (int)c.union_grid.size();
    c.union_index.clear();
    for (int i = 0; i < u; ++i) c.union_index[c.union_grid[i]] = i;
    c.z_index.clear();
    for (int i = 0; i < (int)c.z.size(); ++i) c.z_index[c.z[i]] = -1;

    // one reward sweep per distinct anchor (grid points seeing the same
    // first job share a table)
    std::vector<Time> starts;
    for (const auto& [cls, arr] : c.classes)
      for (const Job& j : arr.jobs) starts.push_back(j.start);
    std::sort(starts.begin(), starts.end());
    c.tables.clear();
    c.table_of.assign(u, -1);
    std::map<std::size_t, int> table_by_pos;
    for (int i = 0; i < u; ++i) {
      std::size_t pos = std::lower_bound(starts.begin(), starts.end(),
                                         c.union_grid[i]) -
                        starts.begin();
      auto it = table_by_pos.find(pos);
      if (it == table_by_pos.end()) {
        c.tables.push_back(
            detail::build_suffix_table(ctx_, c.classes, c.union_grid[i]));
        it = table_by_pos.emplace(pos, (int)c.tables.size() - 1).first;
      }
      c.table_of[i] = it->second;
    }

    // best piece value for every grid pair: sparse segment or a child's
    // dense segment
    std::vector<std::vector<double>> piece(u, std::vector<double>(u, 0.0));
    for (int i = 0; i < u; ++i) {
      const auto& table = c.tables[c.table_of[i]];
      std::size_t r = 0;
      int best = -1;
      for (int j = i + 1; j < u; ++j) {
        while (r < table.readout.size() &&
               table.readout[r].first <= c.union_grid[j]) {
          best = table.readout[r].second;
          ++r;
        }
        piece[i][j] = ctx_.reward().value(best);
      }
    }
    for (int side = 0; side < 2; ++side) {
      if (Cell* ch = child(c, side)) {
        for (Time a : ch->z) {
          for (Time b : ch->z) {
            if (a >= b) continue;
            double v = ch->dense_value(a, b);
            int ia = c.union_index[a], ib = c.union_index[b];
            if (v > piece[ia][ib]) piece[ia][ib] = v;
          }
        }
      }
    }

    // cover DP rows for every own grid point
    c.rows.assign(c.z.size(), {});
    for (int zi = 0; zi < (int)c.z.size(); ++zi) {
      int i = c.union_index[c.z[zi]];
      c.z_index[c.z[zi]] = zi;
      auto& row = c.rows[zi];
      row.val.assign(u, 0.0);
      row.choice.assign(u, -1);
      for (int j = i + 1; j < u; ++j) {
        row.val[j] = row.val[j - 1];
        row.choice[j] = -1;
        for (int k = i; k < j; ++k) {
          double cand = row.val[k] + piece[k][j];
          if (cand > row.val[j]) {
            row.val[j] = cand;
            row.choice[j] = k;
          }
        }
      }
    }
  }

  void extract_dense(const Cell& c, Time a, Time b,
                     std::vector<JobId>& out) const {
    auto zi = c.z_index.find(a);
    auto uj = c.union_index.find(b);
    if (zi == c.z_index.end() || uj == c.union_index.end()) return;
    const auto& row = c.rows[zi->second];
    int i = c.union_index.at(a);
    int j = uj->second;
    while (j > i) {
      int k = row.choice[j];
      if (k < 0) { --j; continue; }
      extract_piece(c, k, j, out);
      j = k;
    }
  }

  // Re-derives which piece value won at (k, j) and extracts it.
  void extract_piece(const Cell& c, int k, int j,
                     std::vector<JobId>& out) const {
    Time a = c.union_grid[k], b = c.union_grid[j];
    const auto& table = c.tables[c.table_of[k]];
    int state = table.best_state_until(b);
    double sparse_v = ctx_.reward().value(state);
    double best_v = sparse_v;
    const Cell* best_child = nullptr;
    for (int side = 0; side < 2; ++side) {
      if (Cell* ch = child(c, side)) {
        if (ch->z_index.count(a) && ch->union_index.count(b)) {
          double v = ch->dense_value(a, b);
          if (v > best_v) {
            best_v = v;
            best_child = ch;
          }
        }
      }
    }
    if (best_child) {
      extract_dense(*best_child, a, b, out);
    } else {
      detail::extract_table_path(table, state, out);
    }
  }

  ApproxParams params_;
  mutable detail::RoundingContext ctx_;
  Time horizon_, offset_, padded_ = 1, axis_ = 2;
  int log_axis_ = 1;
  std::unordered_map<JobId, Job> jobs_;
  std::unordered_set<JobId> ignored_;
  std::map<CellKey, std::unique_ptr<Cell>> cells_;
  std::unordered_map<JobId, CellKey> placement_;
};

// R independent offset instances; the reported value is their maximum.
class WeightedDynamicEnsemble {
 public:
  WeightedDynamicEnsemble(ApproxParams params, Time horizon, int offsets,
                          std::uint64_t seed) {
    if (offsets < 1) throw std::invalid_argument("need at least one offset");
    SplitMix64 rng(seed);
    for (int i = 0; i < offsets; ++i)
      instances_.emplace_back(params, horizon,
                              (Time)rng.below((std::uint64_t)horizon + 1));
  }

  void insert(const Job& j) {
    for (auto& inst : instances_) inst.insert(j);
  }
  void erase(JobId id) {
    for (auto& inst : instances_) inst.erase(id);
  }

  double value() const {
    double best = 0.0;
    for (const auto& inst : instances_) best = std::max(best, inst.value());
    return best;
  }

  Schedule extract_solution() const {
    int best = 0;
    for (int i = 1; i < (int)instances_.size(); ++i)
      if (instances_[i].value() > instances_[best].value()) best = i;
    return instances_[best].extract_solution();
  }

  const std::vector<WeightedDynamicScheduler>& instances() const {
    return instances_;
  }

 private:
  std::vector<WeightedDynamicScheduler> instances_;
};

}  // namespace isched
