#include "dynppr/graph.hpp"

#include <algorithm>
#include <string>

#include "dynppr/errors.hpp"

namespace dynppr {

Graph Graph::from_edges(NodeId node_count, std::vector<Edge> edges) {
  for (const Edge& e : edges) {
    if (e.from >= node_count || e.to >= node_count) {
      throw ValidationError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                            ") references a node outside 0.." +
                            std::to_string(node_count) + "-1");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
  for (const Edge& e : edges) ++g.offsets_[e.from + 1];
  for (std::size_t u = 0; u < node_count; ++u) g.offsets_[u + 1] += g.offsets_[u];
  g.targets_.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) g.targets_[i] = edges[i].to;
  return g;
}

Graph Graph::from_csr(std::vector<std::size_t> offsets, std::vector<NodeId> targets) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != targets.size()) {
    throw ValidationError("malformed CSR offsets");
  }
  const auto n = offsets.size() - 1;
  for (std::size_t u = 0; u < n; ++u) {
    if (offsets[u] > offsets[u + 1]) throw ValidationError("CSR offsets not monotone");
    for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      if (targets[i] >= n) throw ValidationError("CSR target out of range");
      if (i > offsets[u] && targets[i - 1] >= targets[i]) {
        throw ValidationError("CSR adjacency not strictly sorted");
      }
    }
  }
  Graph g;
  g.offsets_ = std::move(offsets);
  g.targets_ = std::move(targets);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  if (u >= node_count()) return false;
  auto row = out(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : out(u)) result.push_back({u, v});
  }
  return result;
}

}  // namespace dynppr
