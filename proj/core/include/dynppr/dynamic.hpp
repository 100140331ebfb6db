#pragma once

#include <memory>
#include <vector>

#include "dynppr/batch.hpp"
#include "dynppr/graph.hpp"
#include "dynppr/solver.hpp"

namespace dynppr {

// Everything an incremental initializer needs: both webs, the ID
// correspondence, the converged prior on the old web and solver settings.
struct UpdateProblem {
  std::shared_ptr<const Graph> old_graph;
  std::shared_ptr<const Graph> new_graph;
  std::shared_ptr<const IdMap> id_map;
  NodeId source_old = 0;
  NodeId source_new = 0;
  PprVector prior_pi;
  ResidualVector prior_r;
  SolverConfig cfg;
  bool exact_deletion_correction = false;
  // Optional cache of structurally_changed_rows(old, new, map); shared
  // between the problems of one batch.
  std::shared_ptr<const std::vector<NodeId>> structural_rows;

  // Checks shapes, the source's survival and that (prior_pi, prior_r)
  // satisfy the residual identity on the old web within 1e-9 (max norm).
  // Throws ValidationError, or UnsupportedError if the source was deleted.
  void validate() const;
};

// Builds a validated problem. `structural_rows` is computed when null.
UpdateProblem make_update_problem(std::shared_ptr<const Graph> old_graph,
                                  std::shared_ptr<const Graph> new_graph,
                                  std::shared_ptr<const IdMap> id_map, NodeId source_old,
                                  PprVector prior_pi, ResidualVector prior_r,
                                  const SolverConfig& cfg, bool exact_deletion_correction = false,
                                  std::shared_ptr<const std::vector<NodeId>> structural_rows = {});

struct UpdateInit {
  PprVector pi;
  ResidualVector r;
  std::vector<NodeId> amended;  // new-web nodes whose residual was amended, ascending
};

struct UpdateResult {
  PprVector pi;
  ResidualVector r;
  SolverStats stats;  // wall time covers initializer and solver; pushes count solver pushes
  double initializer_time_s = 0.0;
};

// TrackingPPR initialization for link-only change:
// r0 = r + alpha * sum over changed rows i of pi[i] * (row*_i - row_i).
// Throws PreconditionError if the batch inserted or deleted nodes.
UpdateInit tracking_init(const UpdateProblem& p);

// Virtual-web initialization: pi0 = (x, 0), r0 = (gamma + alpha x (P0* - P0), alpha x P*_{0,a}).
// With exact_deletion_correction the alpha * x_d * P_{d,0} term carried by
// gamma is removed as well, making r0 the exact residual of pi0 on the new web.
UpdateInit vw_init(const UpdateProblem& p);

// vw_init followed by forward push on the new web.
UpdateResult vwppr_update(const UpdateProblem& p);

// tracking_init followed by forward push on the new web.
UpdateResult tracking_update(const UpdateProblem& p);

// One single-edge (or isolated node) change of the per-edge baseline, in the
// union index space: old IDs first, then inserted node k as old_count + k.
struct EdgeMutation {
  enum class Kind { kDeleteEdge, kDropNode, kAddNode, kInsertEdge };
  Kind kind;
  NodeId u;
  NodeId v = kNoNode;  // edges only

  friend bool operator==(const EdgeMutation&, const EdgeMutation&) = default;
};

// Serializes the old->new evolution into single mutations: every deleted node
// loses its out-edges then in-edges and is dropped; surviving edges are
// deleted; inserted nodes are added and wired to the nodes already present;
// surviving edges are inserted. Ascending order within each class.
std::vector<EdgeMutation> mutation_sequence(const Graph& old_graph, const Graph& new_graph,
                                            const IdMap& map);

// Applies each mutation in turn with its exact single-row residual amendment
// and runs forward push to epsilon after every one.
UpdateResult per_edge_baseline(const UpdateProblem& p);
UpdateResult per_edge_baseline(const UpdateProblem& p, const std::vector<EdgeMutation>& sequence);

}  // namespace dynppr
