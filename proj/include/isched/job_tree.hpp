#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "isched/core.hpp"

namespace isched {

// Balanced search structure over jobs keyed by (start, id), augmented with
// the subtree minimum of the greedy order key (end, start, id). Supports the
// successor primitive "earliest-ending job starting at or after x" and an
// order walk that skips past a given key, both in logarithmic expected time.
// Randomized balancing draws priorities from a hash of the id, so a given
// job set always produces the same shape and traces replay identically.
class JobTree {
 public:
  using Triple = std::tuple<Time, Time, JobId>;

  struct Stats {
    std::uint64_t successor_calls = 0;
    std::uint64_t node_visits = 0;
  };

  JobTree() = default;
  JobTree(const JobTree&) = delete;
  JobTree& operator=(const JobTree&) = delete;
  JobTree(JobTree&& o) noexcept
      : root_(o.root_), by_id_(std::move(o.by_id_)), stats_(o.stats_) {
    o.root_ = nullptr;
  }
  JobTree& operator=(JobTree&& o) noexcept {
    if (this != &o) {
      free_tree(root_);
      root_ = o.root_;
      by_id_ = std::move(o.by_id_);
      stats_ = o.stats_;
      o.root_ = nullptr;
    }
    return *this;
  }
  ~JobTree() { free_tree(root_); }

  std::size_t size() const { return by_id_.size(); }
  bool contains(JobId id) const { return by_id_.count(id) != 0; }

  const Job& get(JobId id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end())
      throw std::invalid_argument("unknown job id " + std::to_string(id));
    return it->second;
  }

  void insert(const Job& j) {
    if (contains(j.id))
      throw std::invalid_argument("duplicate job id " + std::to_string(j.id));
    by_id_.emplace(j.id, j);
    root_ = insert_node(root_, new Node(j));
  }

  void erase(JobId id) {
    const Job& j = get(id);
    root_ = erase_node(root_, key_of(j));
    by_id_.erase(id);
  }

  // Earliest-ending job with start >= x, by (end, start, id).
  std::optional<Job> successor(Time x) const {
    ++stats_.successor_calls;
    const Node* best = nullptr;
    for (const Node* cur = root_; cur;) {
      ++stats_.node_visits;
      if (cur->job.start >= x) {
        if (!best || cur->triple() < best->triple()) best = cur;
        if (cur->right) {
          const Node* m = cur->right->min_node;
          if (!best || m->triple() < best->triple()) best = m;
        }
        cur = cur->left;
      } else {
        cur = cur->right;
      }
    }
    return best ? std::optional<Job>(best->job) : std::nullopt;
  }

  // Next job in (end, start, id) order strictly after `after`, restricted to
  // start >= x. Used to walk candidates when some must be skipped.
  std::optional<Job> successor_after(Time x, const Triple& after) const {
    ++stats_.successor_calls;
    const Node* best = nullptr;
    walk_gt(root_, x, after, best);
    return best ? std::optional<Job>(best->job) : std::nullopt;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [id, job] : by_id_) fn(job);
  }

  Stats& stats() const { return stats_; }
  void reset_stats() const { stats_ = Stats{}; }

 private:
  struct Node {
    explicit Node(const Job& j)
        : job(j), prio(mix(j.id)), min_node(this) {}
    Job job;
    std::uint64_t prio;
    Node* left = nullptr;
    Node* right = nullptr;
    const Node* min_node;  // subtree argmin of (end, start, id)

    Triple triple() const { return {job.end(), job.start, job.id}; }
  };

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::pair<Time, JobId> key_of(const Job& j) { return {j.start, j.id}; }

  static void pull(Node* n) {
    n->min_node = n;
    if (n->left && n->left->min_node->triple() < n->min_node->triple())
      n->min_node = n->left->min_node;
    if (n->right && n->right->min_node->triple() < n->min_node->triple())
      n->min_node = n->right->min_node;
  }

  static Node* insert_node(Node* t, Node* n) {
    if (!t) return n;
    if (n->prio > t->prio) {
      split(t, key_of(n->job), n->left, n->right);
      pull(n);
      return n;
    }
    if (key_of(n->job) < key_of(t->job))
      t->left = insert_node(t->left, n);
    else
      t->right = insert_node(t->right, n);
    pull(t);
    return t;
  }

  static Node* erase_node(Node* t, const std::pair<Time, JobId>& key) {
    if (!t) return nullptr;
    if (key_of(t->job) == key) {
      Node* merged = merge(t->left, t->right);
      delete t;
      return merged;
    }
    if (key < key_of(t->job))
      t->left = erase_node(t->left, key);
    else
      t->right = erase_node(t->right, key);
    pull(t);
    return t;
  }

  static void split(Node* t, const std::pair<Time, JobId>& key, Node*& l,
                    Node*& r) {
    if (!t) { l = r = nullptr; return; }
    if (key_of(t->job) < key) {
      split(t->right, key, t->right, r);
      l = t;
      pull(l);
    } else {
      split(t->left, key, l, t->left);
      r = t;
      pull(r);
    }
  }

  static Node* merge(Node* l, Node* r) {
    if (!l) return r;
    if (!r) return l;
    if (l->prio > r->prio) {
      l->right = merge(l->right, r);
      pull(l);
      return l;
    }
    r->left = merge(l, r->left);
    pull(r);
    return r;
  }

  void walk_gt(const Node* n, Time x, const Triple& after,
               const Node*& best) const {
    if (!n) return;
    ++stats_.node_visits;
    if (n->job.start < x) {
      // Left subtree and this node start even earlier.
      walk_gt(n->right, x, after, best);
      return;
    }
    if (n->min_node->triple() > after) {
      // Everything here passes the order filter; reduce to plain successor
      // within this subtree.
      for (const Node* cur = n; cur;) {
        ++stats_.node_visits;
        if (cur->job.start >= x) {
          if (!best || cur->triple() < best->triple()) best = cur;
          if (cur->right) {
            const Node* m = cur->right->min_node;
            if (!best || m->triple() < best->triple()) best = m;
          }
          cur = cur->left;
        } else {
          cur = cur->right;
        }
      }
      return;
    }
    if (best && best->triple() <= n->min_node->triple()) return;
    walk_gt(n->left, x, after, best);
    if (n->triple() > after && (!best || n->triple() < best->triple()))
      best = n;
    walk_gt_unbounded(n->right, after, best);
  }

  // Same as walk_gt but the start filter is already satisfied by the key
  // order (right subtrees of a node with start >= x).
  void walk_gt_unbounded(const Node* n, const Triple& after,
                         const Node*& best) const {
    if (!n) return;
    ++stats_.node_visits;
    if (best && best->triple() <= n->min_node->triple()) return;
    if (n->min_node->triple() > after) {
      if (!best || n->min_node->triple() < best->triple())
        best = n->min_node;
      return;
    }
    walk_gt_unbounded(n->left, after, best);
    if (n->triple() > after && (!best || n->triple() < best->triple()))
      best = n;
    walk_gt_unbounded(n->right, after, best);
  }

  static void free_tree(Node* n) {
    if (!n) return;
    free_tree(n->left);
    free_tree(n->right);
    delete n;
  }

  Node* root_ = nullptr;
  std::unordered_map<JobId, Job> by_id_;
  mutable Stats stats_;
};

}  // namespace isched
