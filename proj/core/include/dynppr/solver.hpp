#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dynppr/errors.hpp"
#include "dynppr/graph.hpp"

namespace dynppr {

// Dense score vectors indexed by node ID. PPR entries are nonnegative;
// residual entries are signed.
using PprVector = std::vector<double>;
using ResidualVector = std::vector<double>;

enum class Selection {
  kQueue,        // FIFO work list, each node queued at most once
  kMaxResidual,  // largest |r| first, lowest node ID on ties
};

// How a node without out-links spreads its mass.
enum class DanglingPatch {
  kSource,   // one virtual edge back to the source
  kUniform,  // uniformly to every node
};

std::string_view to_string(Selection s);
std::optional<Selection> parse_selection(std::string_view text);

struct SolverConfig {
  double alpha = 0.85;
  double epsilon = 1e-7;
  std::optional<std::uint64_t> max_pushes;
  Selection selection = Selection::kQueue;
  DanglingPatch dangling = DanglingPatch::kSource;

  // Throws ValidationError unless 0 < alpha < 1 and epsilon > 0.
  void validate() const;
};

struct SolverStats {
  std::uint64_t pushes = 0;
  std::uint64_t touched_nodes = 0;  // distinct nodes pushed at least once
  double wall_time_s = 0.0;
  double initial_residual_l1 = 0.0;
  double final_residual_l1 = 0.0;
};

struct PprResult {
  PprVector pi;
  ResidualVector r;
  SolverStats stats;
};

// Raised when max_pushes is reached; carries the state at that point.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, PprResult partial)
      : Error(what), partial_(std::move(partial)) {}

  const PprResult& partial() const noexcept { return partial_; }

 private:
  PprResult partial_;
};

// Snapshot handed to a push observer right after a push completed.
struct PushEvent {
  std::uint64_t push_index;  // 1-based
  NodeId node;
  double amount;  // residual moved into pi
  const PprVector& pi;
  const ResidualVector& r;
};
using PushObserver = std::function<void(const PushEvent&)>;

// Forward push from (pi0, r0) until every |r[i]| <= epsilon.
PprResult gauss_southwell(const Graph& g, NodeId source, PprVector pi0, ResidualVector r0,
                          const SolverConfig& cfg, const PushObserver& observer = {});

// gauss_southwell from pi = 0, r = (1 - alpha) e_source.
PprResult ppr_from_scratch(const Graph& g, NodeId source, const SolverConfig& cfg,
                           const PushObserver& observer = {});

// (1 - alpha) e_s - pi (I - alpha P), evaluated over pi's support.
ResidualVector residual_of(const Graph& g, NodeId source, const PprVector& pi, double alpha,
                           DanglingPatch dangling = DanglingPatch::kSource);

inline constexpr NodeId kDefaultOracleCap = 2000;

// Direct dense solve of pi (I - alpha P) = (1 - alpha) e_s.
PprVector oracle_dense(const Graph& g, NodeId source, double alpha,
                       DanglingPatch dangling = DanglingPatch::kSource,
                       NodeId cap = kDefaultOracleCap);

// pi <- alpha pi P + (1 - alpha) mu until the l1 change drops below tol.
// With `uniform`, mu and the dangling rows are uniform (global PageRank) and
// `source` is ignored.
PprVector power_iteration(const Graph& g, NodeId source, double alpha, double tol, bool uniform,
                          std::uint64_t max_iterations = 1'000'000);

// ||r||_1 / (1 - alpha): bound on ||pi_exact - pi||_1.
double l1_error_bound(std::span<const double> r, double alpha);

double l1_norm(std::span<const double> v);
double l1_distance(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);

}  // namespace dynppr
