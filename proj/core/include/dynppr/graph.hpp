#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace dynppr {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId from = 0;
  NodeId to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable directed graph in compressed-sparse-row form. Each adjacency list
// is sorted and free of duplicates; self-loops are kept and count toward the
// out-degree.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Sorts and deduplicates `edges`. Every endpoint must be < node_count.
  static Graph from_edges(NodeId node_count, std::vector<Edge> edges);

  // Takes already-built CSR arrays; validated.
  static Graph from_csr(std::vector<std::size_t> offsets, std::vector<NodeId> targets);

  NodeId node_count() const noexcept { return static_cast<NodeId>(offsets_.size() - 1); }
  std::size_t edge_count() const noexcept { return targets_.size(); }

  std::span<const NodeId> out(NodeId u) const noexcept {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::size_t out_degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const noexcept;
  bool contains(NodeId u) const noexcept { return u < node_count(); }

  std::vector<Edge> edges() const;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> targets() const noexcept { return targets_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

// A node's transition row after the dangling patch: the stored out-list when
// non-empty, otherwise the single virtual edge back to the source. Every
// target carries weight 1/degree(). Iterable; keep the object alive while
// iterating.
class EffectiveRow {
 public:
  EffectiveRow(std::span<const NodeId> stored, NodeId source) noexcept
      : stored_(stored), source_(source) {}

  bool dangling() const noexcept { return stored_.empty(); }
  std::size_t degree() const noexcept { return dangling() ? 1 : stored_.size(); }
  double weight() const noexcept { return 1.0 / static_cast<double>(degree()); }

  const NodeId* begin() const noexcept { return dangling() ? &source_ : stored_.data(); }
  const NodeId* end() const noexcept { return begin() + degree(); }

 private:
  std::span<const NodeId> stored_;
  NodeId source_;
};

template <class G>
EffectiveRow out_neighbors_effective(const G& g, NodeId u, NodeId source) noexcept {
  return EffectiveRow(g.out(u), source);
}

}  // namespace dynppr
