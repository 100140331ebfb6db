#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "dynppr/batch.hpp"
#include "dynppr/perturb.hpp"
#include "dynppr/solver.hpp"

namespace dynppr {

// "node_id score" per line, ascending node ID, zero entries omitted. Scores
// are printed with 17 significant digits so they round-trip exactly.
void write_scores(std::ostream& out, std::span<const double> scores);
// Reads the format above into a vector of `n` entries.
std::vector<double> read_scores(std::istream& in, NodeId n);

// {"pushes", "touched_nodes", "wall_time_s", "initial_residual_l1", "final_residual_l1"}
std::string stats_to_json(const SolverStats& stats);
SolverStats stats_from_json(const std::string& text);

// Sections [insert_nodes], [delete_nodes], [insert_edges], [delete_edges]
// preceded by an "old_nodes N" header. Inserted nodes are written as
// "<union id> out <targets...> in <sources...>".
void write_batch(std::ostream& out, const PerturbationBatch& batch);
PerturbationBatch read_batch(std::istream& in);

std::string plan_to_json(const PerturbPlan& plan);
PerturbPlan plan_from_json(const std::string& text);

}  // namespace dynppr
