#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <deque>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dynppr/graph.hpp"
#include "dynppr/solver.hpp"

namespace dynppr {

// Anything with a node count and sorted per-node out-lists.
template <class G>
concept OutAdjacency = requires(const G& g, NodeId u) {
  { g.node_count() } -> std::convertible_to<NodeId>;
  { g.out(u) } -> std::convertible_to<std::span<const NodeId>>;
};

// Work-list driven forward push over caller-owned (pi, r). The engine can be
// re-run after the caller amends r (seeding the amended entries), which is how
// the per-edge baseline reuses one state across many mutations.
template <OutAdjacency G>
class PushEngine {
 public:
  PushEngine(const G& g, NodeId source, const SolverConfig& cfg, PprVector& pi,
             ResidualVector& r)
      : g_(g),
        source_(source),
        cfg_(cfg),
        pi_(pi),
        r_(r),
        in_queue_(r.size(), 0),
        touched_(r.size(), 0),
        key_(cfg.selection == Selection::kMaxResidual ? r.size() : 0, 0.0) {}

  // Queues every active node in ascending ID order.
  void seed_all() {
    for (NodeId u = 0; u < r_.size(); ++u) activate(u);
  }

  // Queues u if it is active and not already queued.
  void seed(NodeId u) { activate(u); }

  // Pushes until no |r[i]| exceeds epsilon or `budget` pushes were made in
  // this call. Returns false when stopped by the budget with work left.
  bool run(std::uint64_t budget, const PushObserver& observer = {}) {
    std::uint64_t done = 0;
    while (true) {
      const NodeId u = next_active();
      if (u == kNoNode) return true;
      if (done == budget) {
        requeue(u);
        return false;
      }
      push(u);
      ++done;
      ++pushes_;
      if (observer) observer(PushEvent{pushes_, u, last_amount_, pi_, r_});
    }
  }

  std::uint64_t pushes() const noexcept { return pushes_; }
  std::uint64_t touched_nodes() const noexcept { return touched_count_; }
  bool was_touched(NodeId u) const noexcept { return touched_[u] != 0; }

 private:
  bool active(NodeId u) const noexcept { return std::abs(r_[u]) > cfg_.epsilon; }

  void activate(NodeId u) {
    if (cfg_.selection == Selection::kQueue) {
      if (!in_queue_[u] && active(u)) {
        in_queue_[u] = 1;
        fifo_.push_back(u);
      }
      return;
    }
    if (in_queue_[u]) {
      by_residual_.erase({-key_[u], u});
      in_queue_[u] = 0;
    }
    if (active(u)) {
      key_[u] = std::abs(r_[u]);
      by_residual_.insert({-key_[u], u});
      in_queue_[u] = 1;
    }
  }

  void requeue(NodeId u) {
    if (cfg_.selection == Selection::kQueue) {
      in_queue_[u] = 1;
      fifo_.push_front(u);
    } else {
      activate(u);
    }
  }

  NodeId next_active() {
    if (cfg_.selection == Selection::kQueue) {
      while (!fifo_.empty()) {
        const NodeId u = fifo_.front();
        fifo_.pop_front();
        in_queue_[u] = 0;
        if (active(u)) return u;
      }
      return kNoNode;
    }
    if (by_residual_.empty()) return kNoNode;
    const NodeId u = by_residual_.begin()->second;
    by_residual_.erase(by_residual_.begin());
    in_queue_[u] = 0;
    return u;
  }

  void add(NodeId v, double delta) {
    r_[v] += delta;
    activate(v);
  }

  void push(NodeId u) {
    const double amount = r_[u];
    last_amount_ = amount;
    pi_[u] += amount;
    r_[u] = 0.0;
    if (!touched_[u]) {
      touched_[u] = 1;
      ++touched_count_;
    }
    const auto stored = g_.out(u);
    if (stored.empty() && cfg_.dangling == DanglingPatch::kUniform) {
      const double share = cfg_.alpha * amount / static_cast<double>(r_.size());
      for (NodeId v = 0; v < r_.size(); ++v) add(v, share);
      return;
    }
    const EffectiveRow row(stored, source_);
    const double share = cfg_.alpha * amount / static_cast<double>(row.degree());
    for (NodeId v : row) add(v, share);
  }

  const G& g_;
  NodeId source_;
  SolverConfig cfg_;
  PprVector& pi_;
  ResidualVector& r_;
  std::vector<char> in_queue_;
  std::vector<char> touched_;
  std::uint64_t touched_count_ = 0;
  std::uint64_t pushes_ = 0;
  double last_amount_ = 0.0;
  std::deque<NodeId> fifo_;
  std::set<std::pair<double, NodeId>> by_residual_;
  std::vector<double> key_;
};

}  // namespace dynppr
