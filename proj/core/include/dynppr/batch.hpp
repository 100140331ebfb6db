#pragma once

#include <optional>
#include <vector>

#include "dynppr/graph.hpp"

namespace dynppr {

// Correspondence between the node IDs of an old web and the web that evolved
// from it. Survivors keep their relative order; inserted nodes take the IDs
// after the last survivor.
class IdMap {
 public:
  IdMap() = default;

  static IdMap identity(NodeId n);
  // `old_to_new[u]` is the new ID of u, or kNoNode if u was deleted.
  static IdMap from_old_to_new(std::vector<NodeId> old_to_new, NodeId new_count);

  NodeId old_count() const noexcept { return static_cast<NodeId>(old_to_new_.size()); }
  NodeId new_count() const noexcept { return static_cast<NodeId>(new_to_old_.size()); }

  NodeId to_new(NodeId old_id) const noexcept { return old_to_new_[old_id]; }
  NodeId to_old(NodeId new_id) const noexcept { return new_to_old_[new_id]; }
  bool is_deleted(NodeId old_id) const noexcept { return old_to_new_[old_id] == kNoNode; }
  bool is_inserted(NodeId new_id) const noexcept { return new_to_old_[new_id] == kNoNode; }

  std::vector<NodeId> deleted() const;
  std::vector<NodeId> inserted() const;
  std::size_t deleted_count() const noexcept { return old_count() - survivor_count(); }
  std::size_t inserted_count() const noexcept { return new_count() - survivor_count(); }
  std::size_t survivor_count() const noexcept { return survivors_; }
  bool has_node_changes() const noexcept {
    return survivors_ != old_count() || survivors_ != new_count();
  }

  // Throws ValidationError when the map is not injective or does not cover
  // both node sets.
  void validate() const;

  std::span<const NodeId> old_to_new() const noexcept { return old_to_new_; }

  friend bool operator==(const IdMap&, const IdMap&) = default;

 private:
  std::vector<NodeId> old_to_new_;
  std::vector<NodeId> new_to_old_;
  std::size_t survivors_ = 0;
};

// A batched web-evolution delta. Edge endpoints live in the union index space
// of the old web and the inserted nodes: IDs below the old node count are old
// nodes, and inserted node k is addressed as old_node_count + k.
struct PerturbationBatch {
  struct InsertedNode {
    std::vector<NodeId> out;  // targets, union space
    std::vector<NodeId> in;   // sources, union space
    friend bool operator==(const InsertedNode&, const InsertedNode&) = default;
  };

  NodeId old_node_count = 0;
  std::vector<InsertedNode> inserted_nodes;
  std::vector<NodeId> deleted_nodes;
  std::vector<Edge> inserted_edges;
  std::vector<Edge> deleted_edges;

  bool empty() const noexcept {
    return inserted_nodes.empty() && deleted_nodes.empty() && inserted_edges.empty() &&
           deleted_edges.empty();
  }
  NodeId union_id_of_inserted(std::size_t k) const noexcept {
    return old_node_count + static_cast<NodeId>(k);
  }

  // Throws ValidationError when the batch is inconsistent with `g`.
  void validate(const Graph& g) const;

  friend bool operator==(const PerturbationBatch&, const PerturbationBatch&) = default;
};

struct BatchResult {
  Graph graph;
  IdMap id_map;
};

// Builds W* from W. The input graph is not modified.
BatchResult apply_batch(const Graph& g, const PerturbationBatch& batch);

// The batch that undoes `batch`: applied to `result.graph` it yields a graph
// isomorphic to `g` under the composition of both IdMaps.
PerturbationBatch reverse_batch(const Graph& g, const PerturbationBatch& batch,
                                const BatchResult& result);

// Surviving old nodes whose stored adjacency differs between the webs after
// mapping (including edges lost to deleted nodes or gained to inserted ones).
// Independent of the source; O(n + m).
std::vector<NodeId> structurally_changed_rows(const Graph& old_graph, const Graph& new_graph,
                                              const IdMap& map);

// Surviving old nodes whose effective transition row (dangling patch
// included) differs between the webs. Sorted ascending.
std::vector<NodeId> changed_rows(const Graph& old_graph, const Graph& new_graph,
                                 const IdMap& map, NodeId source_old, NodeId source_new);

// Same, restricted to a precomputed structural diff.
std::vector<NodeId> changed_rows(const Graph& old_graph, const Graph& new_graph,
                                 const IdMap& map, NodeId source_old, NodeId source_new,
                                 std::span<const NodeId> structural);

}  // namespace dynppr
