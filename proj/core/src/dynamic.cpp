#include "dynppr/dynamic.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <string>

#include "dynppr/push_engine.hpp"

namespace dynppr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Records which residual entries an initializer amended.
class AmendedSet {
 public:
  explicit AmendedSet(std::size_t n) : flag_(n, 0) {}

  void mark(NodeId v) {
    if (!flag_[v]) {
      flag_[v] = 1;
      nodes_.push_back(v);
    }
  }

  std::vector<NodeId> take_sorted() {
    std::sort(nodes_.begin(), nodes_.end());
    for (NodeId v : nodes_) flag_[v] = 0;
    return std::move(nodes_);
  }

 private:
  std::vector<char> flag_;
  std::vector<NodeId> nodes_;
};

// Mutable adjacency in the union index space used by the per-edge baseline.
class WorkingGraph {
 public:
  WorkingGraph(const Graph& g, NodeId extra) : adj_(g.node_count() + extra) {
    for (NodeId u = 0; u < g.node_count(); ++u) {
      adj_[u].assign(g.out(u).begin(), g.out(u).end());
    }
  }

  NodeId node_count() const noexcept { return static_cast<NodeId>(adj_.size()); }
  std::span<const NodeId> out(NodeId u) const noexcept { return adj_[u]; }

  void insert(NodeId u, NodeId v) {
    auto& row = adj_[u];
    row.insert(std::lower_bound(row.begin(), row.end(), v), v);
  }
  void erase(NodeId u, NodeId v) {
    auto& row = adj_[u];
    row.erase(std::lower_bound(row.begin(), row.end(), v));
  }

 private:
  std::vector<std::vector<NodeId>> adj_;
};

std::vector<NodeId> structural_rows_of(const UpdateProblem& p) {
  if (p.structural_rows) return *p.structural_rows;
  return structurally_changed_rows(*p.old_graph, *p.new_graph, *p.id_map);
}

// Shared body of tracking_init and vw_init.
UpdateInit virtual_initial(const UpdateProblem& p) {
  const Graph& old_g = *p.old_graph;
  const Graph& new_g = *p.new_graph;
  const IdMap& map = *p.id_map;
  const double alpha = p.cfg.alpha;

  UpdateInit init;
  init.pi.assign(new_g.node_count(), 0.0);
  init.r.assign(new_g.node_count(), 0.0);
  for (NodeId u = 0; u < old_g.node_count(); ++u) {
    if (map.is_deleted(u)) continue;
    init.pi[map.to_new(u)] = p.prior_pi[u];
    init.r[map.to_new(u)] = p.prior_r[u];
  }

  AmendedSet amended(new_g.node_count());
  // Subtracts alpha * x * (old effective row of u restricted to survivors).
  auto remove_old_row = [&](NodeId u, double x) {
    const EffectiveRow row = out_neighbors_effective(old_g, u, p.source_old);
    const double share = alpha * x / static_cast<double>(row.degree());
    for (NodeId t : row) {
      if (map.is_deleted(t)) continue;
      init.r[map.to_new(t)] -= share;
      amended.mark(map.to_new(t));
    }
  };

  const auto structural = structural_rows_of(p);
  const auto rows =
      changed_rows(old_g, new_g, map, p.source_old, p.source_new, structural);
  for (NodeId u : rows) {
    const double x = p.prior_pi[u];
    if (x == 0.0) continue;
    remove_old_row(u, x);
    const EffectiveRow row = out_neighbors_effective(new_g, map.to_new(u), p.source_new);
    const double share = alpha * x / static_cast<double>(row.degree());
    for (NodeId t : row) {
      init.r[t] += share;
      amended.mark(t);
    }
  }

  if (p.exact_deletion_correction) {
    for (NodeId u = 0; u < old_g.node_count(); ++u) {
      if (map.is_deleted(u) && p.prior_pi[u] != 0.0) remove_old_row(u, p.prior_pi[u]);
    }
  }
  init.amended = amended.take_sorted();
  return init;
}

UpdateResult solve_from(const UpdateProblem& p, UpdateInit init, Clock::time_point start) {
  const double init_time = seconds_since(start);
  PprResult solved = gauss_southwell(*p.new_graph, p.source_new, std::move(init.pi),
                                     std::move(init.r), p.cfg);
  UpdateResult result{std::move(solved.pi), std::move(solved.r), solved.stats, init_time};
  result.stats.wall_time_s = seconds_since(start);
  return result;
}

}  // namespace

void UpdateProblem::validate() const {
  if (!old_graph || !new_graph || !id_map) {
    throw ValidationError("update problem needs both graphs and an id map");
  }
  cfg.validate();
  const NodeId n = old_graph->node_count();
  if (id_map->old_count() != n || id_map->new_count() != new_graph->node_count()) {
    throw ValidationError("id map does not match the graphs");
  }
  if (source_old >= n) throw ValidationError("source not in the old web");
  if (id_map->is_deleted(source_old)) {
    throw UnsupportedError("source " + std::to_string(source_old) +
                           " is deleted by the batch; its updated PPR is undefined");
  }
  if (id_map->to_new(source_old) != source_new) {
    throw ValidationError("source_new does not correspond to source_old");
  }
  if (prior_pi.size() != n || prior_r.size() != n) {
    throw ValidationError("prior vectors must have " + std::to_string(n) + " entries");
  }
  const auto expected = residual_of(*old_graph, source_old, prior_pi, cfg.alpha);
  for (NodeId i = 0; i < n; ++i) {
    if (std::abs(expected[i] - prior_r[i]) > 1e-9) {
      throw ValidationError("prior residual disagrees with the prior PPR at node " +
                            std::to_string(i));
    }
  }
}

UpdateProblem make_update_problem(std::shared_ptr<const Graph> old_graph,
                                  std::shared_ptr<const Graph> new_graph,
                                  std::shared_ptr<const IdMap> id_map, NodeId source_old,
                                  PprVector prior_pi, ResidualVector prior_r,
                                  const SolverConfig& cfg, bool exact_deletion_correction,
                                  std::shared_ptr<const std::vector<NodeId>> structural_rows) {
  UpdateProblem p;
  p.old_graph = std::move(old_graph);
  p.new_graph = std::move(new_graph);
  p.id_map = std::move(id_map);
  p.source_old = source_old;
  if (p.id_map && source_old < p.id_map->old_count()) {
    p.source_new = p.id_map->to_new(source_old);
  }
  p.prior_pi = std::move(prior_pi);
  p.prior_r = std::move(prior_r);
  p.cfg = cfg;
  p.exact_deletion_correction = exact_deletion_correction;
  p.validate();
  if (!structural_rows) {
    structural_rows = std::make_shared<const std::vector<NodeId>>(
        structurally_changed_rows(*p.old_graph, *p.new_graph, *p.id_map));
  }
  p.structural_rows = std::move(structural_rows);
  return p;
}

UpdateInit tracking_init(const UpdateProblem& p) {
  if (p.id_map->has_node_changes()) {
    throw PreconditionError(
        "tracking_init handles link-only change; this batch inserts or deletes nodes "
        "(use vw_init)");
  }
  return virtual_initial(p);
}

UpdateInit vw_init(const UpdateProblem& p) {
  if (p.id_map->is_deleted(p.source_old)) {
    throw UnsupportedError("source is deleted by the batch");
  }
  return virtual_initial(p);
}

UpdateResult vwppr_update(const UpdateProblem& p) {
  const auto start = Clock::now();
  return solve_from(p, vw_init(p), start);
}

UpdateResult tracking_update(const UpdateProblem& p) {
  const auto start = Clock::now();
  return solve_from(p, tracking_init(p), start);
}

std::vector<EdgeMutation> mutation_sequence(const Graph& old_graph, const Graph& new_graph,
                                            const IdMap& map) {
  using Kind = EdgeMutation::Kind;
  const NodeId n = old_graph.node_count();
  const std::vector<NodeId> deleted = map.deleted();
  const std::vector<NodeId> inserted = map.inserted();
  std::vector<NodeId> insert_index(new_graph.node_count(), kNoNode);
  for (std::size_t k = 0; k < inserted.size(); ++k) {
    insert_index[inserted[k]] = static_cast<NodeId>(k);
  }
  auto union_of_new = [&](NodeId v) {
    return map.is_inserted(v) ? n + insert_index[v] : map.to_old(v);
  };

  std::vector<EdgeMutation> seq;

  // In-lists of deleted nodes, sources ascending.
  std::vector<std::vector<NodeId>> deleted_in(n);
  for (NodeId w = 0; w < n; ++w) {
    for (NodeId u : old_graph.out(w)) {
      if (map.is_deleted(u)) deleted_in[u].push_back(w);
    }
  }
  std::vector<char> dropped(n, 0);
  for (NodeId u : deleted) {
    for (NodeId v : old_graph.out(u)) {
      if (!dropped[v]) seq.push_back({Kind::kDeleteEdge, u, v});
    }
    for (NodeId w : deleted_in[u]) {
      if (!dropped[w] && w != u) seq.push_back({Kind::kDeleteEdge, w, u});
    }
    dropped[u] = 1;
    seq.push_back({Kind::kDropNode, u});
  }

  const auto structural = structurally_changed_rows(old_graph, new_graph, map);
  for (NodeId u : structural) {
    const auto new_row = new_graph.out(map.to_new(u));
    for (NodeId v : old_graph.out(u)) {
      if (map.is_deleted(v)) continue;
      if (!std::binary_search(new_row.begin(), new_row.end(), map.to_new(v))) {
        seq.push_back({Kind::kDeleteEdge, u, v});
      }
    }
  }

  std::vector<std::vector<NodeId>> inserted_in(inserted.size());
  for (NodeId t = 0; t < new_graph.node_count(); ++t) {
    for (NodeId w : new_graph.out(t)) {
      if (map.is_inserted(w) && t != w) inserted_in[insert_index[w]].push_back(union_of_new(t));
    }
  }
  for (std::size_t k = 0; k < inserted.size(); ++k) {
    const NodeId w = n + static_cast<NodeId>(k);
    auto present = [&](NodeId union_id) { return union_id < n || union_id <= w; };
    seq.push_back({Kind::kAddNode, w});
    for (NodeId t : new_graph.out(inserted[k])) {
      const NodeId ut = union_of_new(t);
      if (present(ut)) seq.push_back({Kind::kInsertEdge, w, ut});
    }
    for (NodeId ut : inserted_in[k]) {
      if (present(ut)) seq.push_back({Kind::kInsertEdge, ut, w});
    }
  }

  for (NodeId u : structural) {
    const auto old_row = old_graph.out(u);
    for (NodeId t : new_graph.out(map.to_new(u))) {
      if (map.is_inserted(t)) continue;
      if (!std::binary_search(old_row.begin(), old_row.end(), map.to_old(t))) {
        seq.push_back({Kind::kInsertEdge, u, map.to_old(t)});
      }
    }
  }
  return seq;
}

UpdateResult per_edge_baseline(const UpdateProblem& p) {
  return per_edge_baseline(p, mutation_sequence(*p.old_graph, *p.new_graph, *p.id_map));
}

UpdateResult per_edge_baseline(const UpdateProblem& p, const std::vector<EdgeMutation>& sequence) {
  using Kind = EdgeMutation::Kind;
  const auto start = Clock::now();
  const IdMap& map = *p.id_map;
  const NodeId n = p.old_graph->node_count();
  const auto inserted = map.inserted();
  const NodeId s = p.source_old;
  const double alpha = p.cfg.alpha;

  WorkingGraph graph(*p.old_graph, static_cast<NodeId>(inserted.size()));
  PprVector pi(graph.node_count(), 0.0);
  ResidualVector r(graph.node_count(), 0.0);
  std::copy(p.prior_pi.begin(), p.prior_pi.end(), pi.begin());
  std::copy(p.prior_r.begin(), p.prior_r.end(), r.begin());

  PushEngine engine(graph, s, p.cfg, pi, r);
  AmendedSet amended(graph.node_count());
  std::uint64_t budget = p.cfg.max_pushes.value_or(std::numeric_limits<std::uint64_t>::max());
  double amend_time = 0.0;

  auto spread = [&](NodeId u, double x, double sign) {
    const EffectiveRow row = out_neighbors_effective(graph, u, s);
    const double share = sign * alpha * x / static_cast<double>(row.degree());
    for (NodeId t : row) {
      r[t] += share;
      amended.mark(t);
    }
  };

  auto finish = [&](SolverStats stats) {
    UpdateResult result;
    result.pi.assign(map.new_count(), 0.0);
    result.r.assign(map.new_count(), 0.0);
    for (NodeId u = 0; u < n; ++u) {
      if (map.is_deleted(u)) continue;
      result.pi[map.to_new(u)] = pi[u];
      result.r[map.to_new(u)] = r[u];
    }
    for (std::size_t k = 0; k < inserted.size(); ++k) {
      result.pi[inserted[k]] = pi[n + k];
      result.r[inserted[k]] = r[n + k];
    }
    stats.final_residual_l1 = l1_norm(result.r);
    result.stats = stats;
    result.initializer_time_s = amend_time;
    return result;
  };

  SolverStats stats;
  stats.initial_residual_l1 = l1_norm(p.prior_r);
  for (const EdgeMutation& m : sequence) {
    const auto amend_start = Clock::now();
    switch (m.kind) {
      case Kind::kDeleteEdge:
      case Kind::kInsertEdge: {
        const double x = pi[m.u];
        if (x != 0.0) spread(m.u, x, -1.0);
        if (m.kind == Kind::kDeleteEdge) {
          graph.erase(m.u, m.v);
        } else {
          graph.insert(m.u, m.v);
        }
        if (x != 0.0) spread(m.u, x, +1.0);
        break;
      }
      case Kind::kDropNode:
        // The isolated node's row is the virtual edge to s; removing it from
        // the web removes that inflow along with its own entries.
        if (pi[m.u] != 0.0) spread(m.u, pi[m.u], -1.0);
        pi[m.u] = 0.0;
        r[m.u] = 0.0;
        break;
      case Kind::kAddNode:
        break;
    }
    amend_time += seconds_since(amend_start);

    for (NodeId v : amended.take_sorted()) engine.seed(v);
    const auto before = engine.pushes();
    const bool converged = engine.run(budget);
    budget -= engine.pushes() - before;
    if (!converged) {
      stats.pushes = engine.pushes();
      stats.touched_nodes = engine.touched_nodes();
      stats.wall_time_s = seconds_since(start);
      throw BudgetExceeded("per-edge baseline exhausted its push budget",
                           [&] {
                             UpdateResult partial = finish(stats);
                             return PprResult{std::move(partial.pi), std::move(partial.r),
                                              partial.stats};
                           }());
    }
  }
  stats.pushes = engine.pushes();
  stats.touched_nodes = engine.touched_nodes();
  stats.wall_time_s = seconds_since(start);
  return finish(stats);
}

}  // namespace dynppr
