#include "dynppr/batch.hpp"

#include <algorithm>
#include <string>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
}

}  // namespace

IdMap IdMap::identity(NodeId n) {
  IdMap m;
  m.old_to_new_.resize(n);
  for (NodeId u = 0; u < n; ++u) m.old_to_new_[u] = u;
  m.new_to_old_ = m.old_to_new_;
  m.survivors_ = n;
  return m;
}

IdMap IdMap::from_old_to_new(std::vector<NodeId> old_to_new, NodeId new_count) {
  IdMap m;
  m.new_to_old_.assign(new_count, kNoNode);
  for (NodeId u = 0; u < old_to_new.size(); ++u) {
    const NodeId v = old_to_new[u];
    if (v == kNoNode) continue;
    if (v >= new_count) throw ValidationError("IdMap target out of range");
    if (m.new_to_old_[v] != kNoNode) throw ValidationError("IdMap is not injective");
    m.new_to_old_[v] = u;
    ++m.survivors_;
  }
  m.old_to_new_ = std::move(old_to_new);
  return m;
}

std::vector<NodeId> IdMap::deleted() const {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < old_count(); ++u) {
    if (is_deleted(u)) out.push_back(u);
  }
  return out;
}

std::vector<NodeId> IdMap::inserted() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < new_count(); ++v) {
    if (is_inserted(v)) out.push_back(v);
  }
  return out;
}

void IdMap::validate() const {
  std::size_t forward = 0;
  for (NodeId u = 0; u < old_count(); ++u) {
    const NodeId v = old_to_new_[u];
    if (v == kNoNode) continue;
    if (v >= new_count() || new_to_old_[v] != u) {
      throw ValidationError("IdMap directions disagree at old node " + std::to_string(u));
    }
    ++forward;
  }
  std::size_t backward = 0;
  for (NodeId v = 0; v < new_count(); ++v) {
    const NodeId u = new_to_old_[v];
    if (u == kNoNode) continue;
    if (u >= old_count() || old_to_new_[u] != v) {
      throw ValidationError("IdMap directions disagree at new node " + std::to_string(v));
    }
    ++backward;
  }
  if (forward != survivors_ || backward != survivors_) {
    throw ValidationError("IdMap survivor count mismatch");
  }
}

void PerturbationBatch::validate(const Graph& g) const {
  const NodeId n = g.node_count();
  if (old_node_count != n) {
    throw ValidationError("batch was built for " + std::to_string(old_node_count) +
                          " nodes, graph has " + std::to_string(n));
  }
  std::vector<char> deleted(n, 0);
  for (NodeId u : deleted_nodes) {
    if (u >= n) throw ValidationError("deleted node " + std::to_string(u) + " is unknown");
    if (deleted[u]) throw ValidationError("node " + std::to_string(u) + " deleted twice");
    deleted[u] = 1;
  }
  const auto union_count = static_cast<std::size_t>(n) + inserted_nodes.size();
  auto check_union = [&](NodeId u) {
    if (u >= union_count) throw ValidationError("inserted-node edge references unknown node " +
                                                std::to_string(u));
    if (u < n && deleted[u]) {
      throw ValidationError("inserted-node edge references deleted node " + std::to_string(u));
    }
  };
  for (const auto& node : inserted_nodes) {
    for (NodeId v : node.out) check_union(v);
    for (NodeId v : node.in) check_union(v);
  }
  auto check_survivor_edge = [&](const Edge& e, const char* what) {
    if (e.from >= n || e.to >= n) {
      throw ValidationError(std::string(what) + " " + edge_str(e) + " references unknown node");
    }
    if (deleted[e.from] || deleted[e.to]) {
      throw ValidationError(std::string(what) + " " + edge_str(e) +
                            " has an endpoint that is being deleted");
    }
  };
  for (const Edge& e : inserted_edges) {
    check_survivor_edge(e, "inserted edge");
    if (g.has_edge(e.from, e.to)) {
      throw ValidationError("inserted edge " + edge_str(e) + " already exists");
    }
  }
  std::vector<Edge> sorted_deleted = deleted_edges;
  std::sort(sorted_deleted.begin(), sorted_deleted.end());
  for (const Edge& e : sorted_deleted) {
    check_survivor_edge(e, "deleted edge");
    if (!g.has_edge(e.from, e.to)) {
      throw ValidationError("deleted edge " + edge_str(e) + " does not exist");
    }
  }
  for (const Edge& e : inserted_edges) {
    if (std::binary_search(sorted_deleted.begin(), sorted_deleted.end(), e)) {
      throw ValidationError("edge " + edge_str(e) + " is both inserted and deleted");
    }
  }
}

BatchResult apply_batch(const Graph& g, const PerturbationBatch& batch) {
  batch.validate(g);
  const NodeId n = g.node_count();

  std::vector<NodeId> old_to_new(n, 0);
  for (NodeId u : batch.deleted_nodes) old_to_new[u] = kNoNode;
  NodeId next = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (old_to_new[u] != kNoNode) old_to_new[u] = next++;
  }
  const NodeId survivors = next;
  const auto new_count = static_cast<NodeId>(survivors + batch.inserted_nodes.size());
  auto to_new = [&](NodeId union_id) {
    return union_id < n ? old_to_new[union_id] : survivors + (union_id - n);
  };

  std::vector<Edge> deleted_edges = batch.deleted_edges;
  std::sort(deleted_edges.begin(), deleted_edges.end());

  std::vector<Edge> edges;
  edges.reserve(g.edge_count() + batch.inserted_edges.size());
  for (NodeId u = 0; u < n; ++u) {
    if (old_to_new[u] == kNoNode) continue;
    for (NodeId v : g.out(u)) {
      if (old_to_new[v] == kNoNode) continue;
      if (std::binary_search(deleted_edges.begin(), deleted_edges.end(), Edge{u, v})) continue;
      edges.push_back({old_to_new[u], old_to_new[v]});
    }
  }
  for (const Edge& e : batch.inserted_edges) edges.push_back({to_new(e.from), to_new(e.to)});
  for (std::size_t k = 0; k < batch.inserted_nodes.size(); ++k) {
    const NodeId w = survivors + static_cast<NodeId>(k);
    for (NodeId v : batch.inserted_nodes[k].out) edges.push_back({w, to_new(v)});
    for (NodeId v : batch.inserted_nodes[k].in) edges.push_back({to_new(v), w});
  }

  return {Graph::from_edges(new_count, std::move(edges)),
          IdMap::from_old_to_new(std::move(old_to_new), new_count)};
}

PerturbationBatch reverse_batch(const Graph& g, const PerturbationBatch& batch,
                                const BatchResult& result) {
  const Graph& evolved = result.graph;
  const IdMap& map = result.id_map;
  const NodeId evolved_n = evolved.node_count();

  // Old deleted nodes come back as inserted nodes, in ascending old-ID order.
  std::vector<NodeId> deleted = map.deleted();
  std::vector<NodeId> back_id(g.node_count(), kNoNode);
  for (std::size_t k = 0; k < deleted.size(); ++k) {
    back_id[deleted[k]] = evolved_n + static_cast<NodeId>(k);
  }
  auto to_reverse_union = [&](NodeId old_id) {
    return map.is_deleted(old_id) ? back_id[old_id] : map.to_new(old_id);
  };

  PerturbationBatch rev;
  rev.old_node_count = evolved_n;
  rev.deleted_nodes = map.inserted();
  rev.inserted_nodes.resize(deleted.size());
  for (std::size_t k = 0; k < deleted.size(); ++k) {
    for (NodeId v : g.out(deleted[k])) {
      rev.inserted_nodes[k].out.push_back(to_reverse_union(v));
    }
  }
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.out(u)) {
      if (back_id[v] != kNoNode) {
        rev.inserted_nodes[back_id[v] - evolved_n].in.push_back(to_reverse_union(u));
      }
    }
  }
  for (const Edge& e : batch.deleted_edges) {
    rev.inserted_edges.push_back({map.to_new(e.from), map.to_new(e.to)});
  }
  for (const Edge& e : batch.inserted_edges) {
    rev.deleted_edges.push_back({map.to_new(e.from), map.to_new(e.to)});
  }
  return rev;
}

std::vector<NodeId> structurally_changed_rows(const Graph& old_graph, const Graph& new_graph,
                                              const IdMap& map) {
  std::vector<NodeId> changed;
  for (NodeId u = 0; u < old_graph.node_count(); ++u) {
    if (map.is_deleted(u)) continue;
    auto old_row = old_graph.out(u);
    auto new_row = new_graph.out(map.to_new(u));
    bool same = old_row.size() == new_row.size();
    for (std::size_t i = 0; same && i < old_row.size(); ++i) {
      same = map.to_new(old_row[i]) == new_row[i];
    }
    if (!same) changed.push_back(u);
  }
  return changed;
}

std::vector<NodeId> changed_rows(const Graph& old_graph, const Graph& new_graph,
                                 const IdMap& map, NodeId source_old, NodeId source_new) {
  const auto structural = structurally_changed_rows(old_graph, new_graph, map);
  return changed_rows(old_graph, new_graph, map, source_old, source_new, structural);
}

std::vector<NodeId> changed_rows(const Graph& old_graph, const Graph& new_graph,
                                 const IdMap& map, NodeId source_old, NodeId source_new,
                                 std::span<const NodeId> structural) {
  std::vector<NodeId> changed;
  changed.reserve(structural.size());
  for (NodeId u : structural) {
    const EffectiveRow old_row = out_neighbors_effective(old_graph, u, source_old);
    const EffectiveRow new_row = out_neighbors_effective(new_graph, map.to_new(u), source_new);
    // Stored rows differ; the effective rows can still coincide when one side
    // is dangling and the other holds exactly the edge back to the source.
    bool same = old_row.degree() == new_row.degree();
    for (auto a = old_row.begin(), b = new_row.begin(); same && a != old_row.end(); ++a, ++b) {
      same = !map.is_deleted(*a) && map.to_new(*a) == *b;
    }
    if (!same) changed.push_back(u);
  }
  return changed;
}

}  // namespace dynppr
