#include "dynppr/solver.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "dynppr/push_engine.hpp"

namespace dynppr {

std::string_view to_string(Selection s) {
  return s == Selection::kQueue ? "queue" : "max_residual";
}

std::optional<Selection> parse_selection(std::string_view text) {
  if (text == "queue") return Selection::kQueue;
  if (text == "max_residual") return Selection::kMaxResidual;
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("epsilon must be positive, got " + std::to_string(epsilon));
  }
}

double l1_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += std::abs(x);
  return sum;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("l1_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l1_error_bound(std::span<const double> r, double alpha) {
  return l1_norm(r) / (1.0 - alpha);
}

PprResult gauss_southwell(const Graph& g, NodeId source, PprVector pi0, ResidualVector r0,
                          const SolverConfig& cfg, const PushObserver& observer) {
  cfg.validate();
  const NodeId n = g.node_count();
  if (source >= n) throw ValidationError("source " + std::to_string(source) + " not in graph");
  if (pi0.size() != n || r0.size() != n) {
    throw ValidationError("initial vectors must have " + std::to_string(n) + " entries");
  }

  const auto start = std::chrono::steady_clock::now();
  PprResult result{std::move(pi0), std::move(r0), {}};
  result.stats.initial_residual_l1 = l1_norm(result.r);

  bool converged = true;
  {
    PushEngine engine(g, source, cfg, result.pi, result.r);
    engine.seed_all();
    converged = engine.run(cfg.max_pushes.value_or(std::numeric_limits<std::uint64_t>::max()),
                           observer);
    result.stats.pushes = engine.pushes();
    result.stats.touched_nodes = engine.touched_nodes();
  }
  result.stats.final_residual_l1 = l1_norm(result.r);
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!converged) {
    throw BudgetExceeded("push budget of " + std::to_string(*cfg.max_pushes) + " exhausted",
                         std::move(result));
  }
  return result;
}

PprResult ppr_from_scratch(const Graph& g, NodeId source, const SolverConfig& cfg,
                           const PushObserver& observer) {
  cfg.validate();
  if (source >= g.node_count()) {
    throw ValidationError("source " + std::to_string(source) + " not in graph");
  }
  PprVector pi(g.node_count(), 0.0);
  ResidualVector r(g.node_count(), 0.0);
  r[source] = 1.0 - cfg.alpha;
  return gauss_southwell(g, source, std::move(pi), std::move(r), cfg, observer);
}

ResidualVector residual_of(const Graph& g, NodeId source, const PprVector& pi, double alpha,
                           DanglingPatch dangling) {
  const NodeId n = g.node_count();
  if (pi.size() != n) throw ValidationError("residual_of: dimension mismatch");
  ResidualVector r(n, 0.0);
  r[source] += 1.0 - alpha;
  double uniform_inflow = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const double x = pi[i];
    if (x == 0.0) continue;
    r[i] -= x;
    const auto stored = g.out(i);
    if (stored.empty() && dangling == DanglingPatch::kUniform) {
      uniform_inflow += alpha * x / static_cast<double>(n);
      continue;
    }
    const EffectiveRow row(stored, source);
    const double share = alpha * x / static_cast<double>(row.degree());
    for (NodeId v : row) r[v] += share;
  }
  if (uniform_inflow != 0.0) {
    for (double& v : r) v += uniform_inflow;
  }
  return r;
}

PprVector oracle_dense(const Graph& g, NodeId source, double alpha, DanglingPatch dangling,
                       NodeId cap) {
  const NodeId n = g.node_count();
  if (n > cap) {
    throw ValidationError("oracle_dense refuses " + std::to_string(n) +
                          " nodes (cap " + std::to_string(cap) + ")");
  }
  if (source >= n) throw ValidationError("source not in graph");
  // Transposed system: (I - alpha P)^T pi^T = (1 - alpha) e_s.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (NodeId i = 0; i < n; ++i) {
    const auto stored = g.out(i);
    if (stored.empty() && dangling == DanglingPatch::kUniform) {
      for (NodeId j = 0; j < n; ++j) a(j, i) -= alpha / static_cast<double>(n);
      continue;
    }
    const EffectiveRow row(stored, source);
    for (NodeId j : row) a(j, i) -= alpha * row.weight();
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(source) = 1.0 - alpha;
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  return PprVector(x.data(), x.data() + n);
}

PprVector power_iteration(const Graph& g, NodeId source, double alpha, double tol, bool uniform,
                          std::uint64_t max_iterations) {
  if (!(tol > 0.0)) throw ValidationError("power_iteration: tol must be positive");
  const NodeId n = g.node_count();
  if (n == 0) return {};
  if (!uniform && source >= n) throw ValidationError("source not in graph");
  const double inv_n = 1.0 / static_cast<double>(n);

  PprVector teleport(n, 0.0);
  if (uniform) {
    std::fill(teleport.begin(), teleport.end(), inv_n);
  } else {
    teleport[source] = 1.0;
  }
  PprVector pi = teleport;
  PprVector next(n);
  for (std::uint64_t iter = 0; iter < max_iterations; ++iter) {
    double dangling_mass = 0.0;
    for (NodeId v = 0; v < n; ++v) next[v] = (1.0 - alpha) * teleport[v];
    for (NodeId i = 0; i < n; ++i) {
      const auto stored = g.out(i);
      if (stored.empty() && uniform) {
        dangling_mass += pi[i];
        continue;
      }
      const EffectiveRow row(stored, source);
      const double share = alpha * pi[i] * row.weight();
      for (NodeId v : row) next[v] += share;
    }
    if (dangling_mass != 0.0) {
      for (double& v : next) v += alpha * dangling_mass * inv_n;
    }
    const double change = l1_distance(pi, next);
    pi.swap(next);
    if (change < tol) return pi;
  }
  throw Error("power_iteration did not reach tol " + std::to_string(tol) + " within " +
              std::to_string(max_iterations) + " iterations");
}

}  // namespace dynppr
