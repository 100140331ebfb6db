#include "dynppr/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_set>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

// First `count` entries of a seeded partial Fisher-Yates shuffle of `items`.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(items[i], items[i + rng.below(items.size() - i)]);
  }
  items.resize(count);
  return items;
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

std::vector<std::string> PerturbPlan::validate(const Graph& full) const {
  auto check_fraction = [](double f, const char* name) {
    if (!(f >= 0.0 && f < 1.0)) {
      throw ValidationError(std::string(name) + " must lie in [0, 1), got " + std::to_string(f));
    }
  };
  check_fraction(insert_edge_fraction, "insert_edge_fraction");
  check_fraction(delete_edge_fraction, "delete_edge_fraction");

  std::vector<std::string> warnings;
  const double n = full.node_count();
  if (n > 0 && static_cast<double>(insert_nodes + delete_nodes) > 0.1 * n) {
    warnings.push_back("node perturbation exceeds 10% of the graph");
  }
  if (insert_edge_fraction + delete_edge_fraction > 0.1) {
    warnings.push_back("edge perturbation exceeds 10% of the edges");
  }
  return warnings;
}

std::vector<NodeId> bfs_sample(const Graph& g, NodeId seed, std::size_t count, Rng& rng) {
  const NodeId n = g.node_count();
  if (count > n) {
    throw ValidationError("cannot sample " + std::to_string(count) + " nodes from " +
                          std::to_string(n));
  }
  if (count == 0) return {};
  if (seed >= n) throw ValidationError("BFS seed not in graph");

  std::vector<char> visited(n, 0);
  std::vector<NodeId> order;
  order.reserve(count);
  std::deque<NodeId> frontier;
  auto visit = [&](NodeId u) {
    visited[u] = 1;
    order.push_back(u);
    frontier.push_back(u);
  };

  visit(seed);
  while (order.size() < count) {
    if (frontier.empty()) {
      NodeId next = kNoNode;
      for (int attempt = 0; attempt < 64 && next == kNoNode; ++attempt) {
        const auto u = static_cast<NodeId>(rng.below(n));
        if (!visited[u]) next = u;
      }
      if (next == kNoNode) {
        std::vector<NodeId> unvisited;
        for (NodeId u = 0; u < n; ++u) {
          if (!visited[u]) unvisited.push_back(u);
        }
        next = unvisited[rng.below(unvisited.size())];
      }
      visit(next);
      continue;
    }
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : g.out(u)) {
      if (order.size() == count) break;
      if (!visited[v]) visit(v);
    }
  }
  return order;
}

Evolution make_evolution(const Graph& full, const PerturbPlan& plan) {
  plan.validate(full);
  const NodeId n = full.node_count();
  const std::size_t m = full.edge_count();
  Rng rng(plan.rng_seed);

  if (plan.insert_nodes + plan.delete_nodes > n) {
    throw ValidationError("plan inserts and deletes more nodes than the graph has");
  }

  // A: nodes to insert later, fetched by BFS from a random seed.
  std::vector<char> in_a(n, 0);
  if (plan.insert_nodes > 0) {
    const auto seed = static_cast<NodeId>(rng.below(n));
    for (NodeId u : bfs_sample(full, seed, plan.insert_nodes, rng)) in_a[u] = 1;
  }

  // D: uniform sample of the original web S \ A.
  std::vector<char> in_d(n, 0);
  {
    std::vector<NodeId> pool;
    pool.reserve(n);
    for (NodeId u = 0; u < n; ++u) {
      if (!in_a[u]) pool.push_back(u);
    }
    for (NodeId u : sample_without_replacement(std::move(pool), plan.delete_nodes, rng)) {
      in_d[u] = 1;
    }
  }
  auto core = [&](NodeId u) { return !in_a[u] && !in_d[u]; };

  // Random edge stream; its tail is withheld from the original web.
  std::vector<Edge> stream = full.edges();
  rng.shuffle(std::span<Edge>(stream));
  const auto k = static_cast<std::size_t>(std::floor(plan.insert_edge_fraction * m));
  const auto l = static_cast<std::size_t>(std::floor(plan.delete_edge_fraction * m));
  if (k > m) throw ValidationError("not enough edges to withhold");

  // No tail edge enters the original web. Tail edges touching A travel with
  // A's payload; those touching D are discarded.
  std::vector<Edge> tail(stream.begin() + static_cast<std::ptrdiff_t>(m - k), stream.end());
  std::sort(tail.begin(), tail.end());
  std::vector<Edge> withheld;
  for (const Edge& e : tail) {
    if (core(e.from) && core(e.to)) withheld.push_back(e);
  }
  std::vector<Edge> eligible;
  for (std::size_t i = 0; i < m - k; ++i) {
    if (core(stream[i].from) && core(stream[i].to)) eligible.push_back(stream[i]);
  }
  if (l > eligible.size()) {
    throw ValidationError("only " + std::to_string(eligible.size()) +
                          " edges are available for deletion, plan asks for " +
                          std::to_string(l));
  }
  std::vector<Edge> removed = sample_without_replacement(std::move(eligible), l, rng);
  std::sort(removed.begin(), removed.end());

  Evolution evo;
  evo.full_to_original.assign(n, kNoNode);
  for (NodeId u = 0; u < n; ++u) {
    if (!in_a[u]) {
      evo.full_to_original[u] = static_cast<NodeId>(evo.original_to_full.size());
      evo.original_to_full.push_back(u);
    }
  }
  const auto original_n = static_cast<NodeId>(evo.original_to_full.size());

  std::vector<Edge> original_edges;
  original_edges.reserve(m);
  for (NodeId u = 0; u < n; ++u) {
    if (in_a[u]) continue;
    for (NodeId v : full.out(u)) {
      if (in_a[v] || std::binary_search(tail.begin(), tail.end(), Edge{u, v})) continue;
      original_edges.push_back({evo.full_to_original[u], evo.full_to_original[v]});
    }
  }
  evo.original = Graph::from_edges(original_n, std::move(original_edges));

  PerturbationBatch& batch = evo.batch;
  batch.old_node_count = original_n;
  for (NodeId u = 0; u < n; ++u) {
    if (in_d[u]) batch.deleted_nodes.push_back(evo.full_to_original[u]);
  }
  for (const Edge& e : withheld) {
    batch.inserted_edges.push_back({evo.full_to_original[e.from], evo.full_to_original[e.to]});
  }
  for (const Edge& e : removed) {
    batch.deleted_edges.push_back({evo.full_to_original[e.from], evo.full_to_original[e.to]});
  }

  std::vector<NodeId> a_nodes;
  std::vector<NodeId> a_index(n, kNoNode);
  for (NodeId u = 0; u < n; ++u) {
    if (in_a[u]) {
      a_index[u] = static_cast<NodeId>(a_nodes.size());
      a_nodes.push_back(u);
    }
  }
  auto union_id = [&](NodeId full_id) {
    return in_a[full_id] ? original_n + a_index[full_id] : evo.full_to_original[full_id];
  };
  batch.inserted_nodes.resize(a_nodes.size());
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : full.out(u)) {
      // Edges between A and D cannot exist in the updated web.
      if (in_d[u] || in_d[v]) continue;
      if (in_a[u]) {
        batch.inserted_nodes[a_index[u]].out.push_back(union_id(v));
      } else if (in_a[v]) {
        batch.inserted_nodes[a_index[v]].in.push_back(union_id(u));
      }
    }
  }

  BatchResult applied = apply_batch(evo.original, batch);
  evo.updated = std::move(applied.graph);
  evo.id_map = std::move(applied.id_map);

  evo.full_to_updated.assign(n, kNoNode);
  evo.updated_to_full.assign(evo.updated.node_count(), kNoNode);
  for (NodeId u = 0; u < n; ++u) {
    if (in_d[u]) continue;
    const NodeId id = in_a[u] ? evo.id_map.survivor_count() + a_index[u]
                              : evo.id_map.to_new(evo.full_to_original[u]);
    evo.full_to_updated[u] = id;
    evo.updated_to_full[id] = u;
  }
  return evo;
}

Graph random_digraph(NodeId n, double mean_degree, Rng& rng) {
  if (n < 2) return Graph::from_edges(n, {});
  const auto max_edges = static_cast<double>(n) * (n - 1);
  const auto target =
      static_cast<std::size_t>(std::min(max_edges, std::round(n * mean_degree)));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  edges.reserve(target);
  while (edges.size() < target) {
    const auto u = static_cast<NodeId>(rng.below(n));
    const auto v = static_cast<NodeId>(rng.below(n));
    if (u == v || !seen.insert(pair_key(u, v)).second) continue;
    edges.push_back({u, v});
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph power_law_digraph(NodeId n, double mean_degree, double gamma, Rng& rng) {
  if (n < 2) return Graph::from_edges(n, {});
  if (!(gamma > 2.0)) throw ValidationError("power-law exponent must exceed 2");
  const double exponent = -1.0 / (gamma - 1.0);

  // Out- and in-weights follow the same law under independent relabelings.
  auto cumulative_weights = [&]() {
    std::vector<NodeId> label(n);
    for (NodeId i = 0; i < n; ++i) label[i] = i;
    rng.shuffle(std::span<NodeId>(label));
    std::vector<double> weight(n);
    for (NodeId i = 0; i < n; ++i) weight[label[i]] = std::pow(i + 1.0, exponent);
    std::vector<double> cumulative(n);
    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) cumulative[i] = (total += weight[i]);
    return cumulative;
  };
  const auto out_cdf = cumulative_weights();
  const auto in_cdf = cumulative_weights();
  auto draw = [&](const std::vector<double>& cdf) {
    const double x = rng.unit() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    return static_cast<NodeId>(std::min<std::size_t>(it - cdf.begin(), n - 1));
  };

  const auto target = static_cast<std::size_t>(std::round(n * mean_degree));
  std::vector<Edge> edges;
  edges.reserve(target);
  while (edges.size() < target) {
    const NodeId u = draw(out_cdf);
    const NodeId v = draw(in_cdf);
    if (u != v) edges.push_back({u, v});
  }
  return Graph::from_edges(n, std::move(edges));
}

PerturbationBatch random_link_batch(const Graph& g, std::size_t flips, Rng& rng) {
  const NodeId n = g.node_count();
  PerturbationBatch batch;
  batch.old_node_count = n;
  if (n < 2) return batch;
  flips = std::min<std::size_t>(flips, static_cast<std::size_t>(n) * (n - 1));
  std::unordered_set<std::uint64_t> seen;
  while (seen.size() < flips) {
    const auto u = static_cast<NodeId>(rng.below(n));
    const auto v = static_cast<NodeId>(rng.below(n));
    if (u == v || !seen.insert(pair_key(u, v)).second) continue;
    (g.has_edge(u, v) ? batch.deleted_edges : batch.inserted_edges).push_back({u, v});
  }
  std::sort(batch.inserted_edges.begin(), batch.inserted_edges.end());
  std::sort(batch.deleted_edges.begin(), batch.deleted_edges.end());
  return batch;
}

PerturbationBatch random_node_batch(const Graph& g, std::size_t inserts, std::size_t deletes,
                                    std::size_t flips, double mean_degree, NodeId keep,
                                    Rng& rng) {
  const NodeId n = g.node_count();
  PerturbationBatch batch;
  batch.old_node_count = n;

  std::vector<NodeId> pool;
  for (NodeId u = 0; u < n; ++u) {
    if (u != keep) pool.push_back(u);
  }
  deletes = std::min(deletes, pool.size());
  batch.deleted_nodes = sample_without_replacement(std::move(pool), deletes, rng);
  std::sort(batch.deleted_nodes.begin(), batch.deleted_nodes.end());

  std::vector<char> deleted(n, 0);
  for (NodeId u : batch.deleted_nodes) deleted[u] = 1;
  std::vector<NodeId> survivors;
  for (NodeId u = 0; u < n; ++u) {
    if (!deleted[u]) survivors.push_back(u);
  }

  if (survivors.size() >= 2) {
    std::unordered_set<std::uint64_t> seen;
    const auto limit = std::min<std::size_t>(flips, survivors.size() * (survivors.size() - 1));
    while (seen.size() < limit) {
      const NodeId u = survivors[rng.below(survivors.size())];
      const NodeId v = survivors[rng.below(survivors.size())];
      if (u == v || !seen.insert(pair_key(u, v)).second) continue;
      (g.has_edge(u, v) ? batch.deleted_edges : batch.inserted_edges).push_back({u, v});
    }
    std::sort(batch.inserted_edges.begin(), batch.inserted_edges.end());
    std::sort(batch.deleted_edges.begin(), batch.deleted_edges.end());
  }

  // Inserted nodes connect to survivors and to each other.
  std::vector<NodeId> endpoints = survivors;
  for (std::size_t k = 0; k < inserts; ++k) endpoints.push_back(n + static_cast<NodeId>(k));
  batch.inserted_nodes.resize(inserts);
  const auto max_degree = static_cast<std::uint64_t>(std::max(1.0, 2.0 * mean_degree));
  for (auto& node : batch.inserted_nodes) {
    const auto out_degree = rng.below(max_degree + 1);
    const auto in_degree = rng.below(max_degree + 1);
    for (std::uint64_t i = 0; i < out_degree; ++i) {
      node.out.push_back(endpoints[rng.below(endpoints.size())]);
    }
    for (std::uint64_t i = 0; i < in_degree; ++i) {
      node.in.push_back(endpoints[rng.below(endpoints.size())]);
    }
  }
  return batch;
}

}  // namespace dynppr
