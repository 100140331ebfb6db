#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynppr/batch.hpp"
#include "dynppr/graph.hpp"
#include "dynppr/random.hpp"

namespace dynppr {

struct PerturbPlan {
  std::uint64_t insert_nodes = 0;
  std::uint64_t delete_nodes = 0;
  double insert_edge_fraction = 0.0;  // of |E| of the full dataset
  double delete_edge_fraction = 0.0;
  std::uint64_t rng_seed = 0;

  // Throws ValidationError on negative or >= 1 fractions. Returns warnings
  // for perturbations above 10% of the graph.
  std::vector<std::string> validate(const Graph& full) const;

  friend bool operator==(const PerturbPlan&, const PerturbPlan&) = default;
};

// First `count` nodes in BFS order over out-edges from `seed`; when the
// reachable set runs out, BFS restarts from a random unvisited node.
std::vector<NodeId> bfs_sample(const Graph& g, NodeId seed, std::size_t count, Rng& rng);

// The dataset split into an original web, a batch and the updated web.
struct Evolution {
  Graph original;  // S \ A, minus the withheld edges
  PerturbationBatch batch;
  Graph updated;  // S \ D, minus the deleted edges
  IdMap id_map;   // original -> updated
  std::vector<NodeId> full_to_original;  // kNoNode for nodes of A
  std::vector<NodeId> full_to_updated;   // kNoNode for nodes of D
  std::vector<NodeId> original_to_full;
  std::vector<NodeId> updated_to_full;
};

Evolution make_evolution(const Graph& full, const PerturbPlan& plan);

// Uniform random digraph with n nodes and about n * mean_degree distinct arcs
// (self-loops excluded).
Graph random_digraph(NodeId n, double mean_degree, Rng& rng);

// Directed Chung-Lu graph with power-law expected in- and out-degrees
// (exponent `gamma`), used as a stand-in for social-network edge lists.
Graph power_law_digraph(NodeId n, double mean_degree, double gamma, Rng& rng);

// Random link-only batch flipping `flips` node pairs among existing nodes
// (present edges are deleted, absent ones inserted).
PerturbationBatch random_link_batch(const Graph& g, std::size_t flips, Rng& rng);

// Random batch inserting and deleting nodes plus link flips. `keep` is never
// deleted.
PerturbationBatch random_node_batch(const Graph& g, std::size_t inserts, std::size_t deletes,
                                    std::size_t flips, double mean_degree, NodeId keep, Rng& rng);

}  // namespace dynppr
