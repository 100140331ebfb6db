#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "dynppr/harness.hpp"

namespace dynppr {

namespace {

constexpr double kAlpha = 0.85;

// Effective row of u as a dense vector, built without EffectiveRow.
std::vector<double> dense_row(const Graph& g, NodeId u, NodeId source) {
  std::vector<double> row(g.node_count(), 0.0);
  const auto out = g.out(u);
  if (out.empty()) {
    row[source] = 1.0;
  } else {
    for (NodeId v : out) row[v] += 1.0 / static_cast<double>(out.size());
  }
  return row;
}

std::vector<NodeId> reachable_from(const Graph& g, NodeId s) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : g.out(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (seen[u]) out.push_back(u);
  }
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

class Recorder {
 public:
  InvariantResult& get(const std::string& name, double limit) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, results_.size()).first;
      results_.push_back({name, true, 0.0, limit, 0});
    }
    return results_[it->second];
  }

  void observe(const std::string& name, double value, double limit) {
    InvariantResult& r = get(name, limit);
    ++r.cases;
    r.worst = std::max(r.worst, value);
    if (!(value <= limit)) r.passed = false;
  }

  std::vector<InvariantResult> take() { return std::move(results_); }

 private:
  std::vector<InvariantResult> results_;
  std::map<std::string, std::size_t> index_;
};

struct Instance {
  Graph graph;
  NodeId source;
};

Instance random_instance(Rng& rng, NodeId max_n) {
  const auto n = static_cast<NodeId>(10 + rng.below(max_n - 9));
  const double degree = 1.0 + 7.0 * rng.unit();
  Graph g = random_digraph(n, degree, rng);
  return {std::move(g), static_cast<NodeId>(rng.below(n))};
}

void check_solver(Recorder& rec, const Instance& inst) {
  const Graph& g = inst.graph;
  const NodeId s = inst.source;
  SolverConfig cfg;
  cfg.alpha = kAlpha;
  cfg.epsilon = 1e-6;

  // Residual identity along the run, and mass accounting per push.
  double worst_identity = 0.0;
  double worst_mass = 0.0;
  double previous_l1 = 1.0 - kAlpha;
  std::vector<char> pushed(g.node_count(), 0);
  auto result = ppr_from_scratch(g, s, cfg, [&](const PushEvent& e) {
    pushed[e.node] = 1;
    const double l1 = l1_norm(e.r);
    worst_mass = std::max(worst_mass,
                          std::abs(l1 - (previous_l1 - (1.0 - kAlpha) * std::abs(e.amount))));
    previous_l1 = l1;
    if (e.push_index % 100 == 0) {
      worst_identity = std::max(worst_identity, max_abs_diff(residual_of(g, s, e.pi, kAlpha), e.r));
    }
  });
  worst_identity =
      std::max(worst_identity, max_abs_diff(residual_of(g, s, result.pi, kAlpha), result.r));
  rec.observe("residual_identity", worst_identity, 1e-12);
  rec.observe("mass_accounting_nonnegative", worst_mass, 1e-12);
  rec.observe("termination_max_residual", max_abs(result.r), cfg.epsilon);

  const auto exact = oracle_dense(g, s, kAlpha);
  const double err = l1_distance(exact, result.pi);
  rec.observe("error_bound", err - l1_error_bound(result.r, kAlpha), 1e-12);

  const auto reach = reachable_from(g, s);
  std::vector<char> reachable(g.node_count(), 0);
  for (NodeId u : reach) reachable[u] = 1;
  double outside = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (reachable[u]) continue;
    outside += std::abs(result.pi[u]) + (pushed[u] ? 1.0 : 0.0);
  }
  rec.observe("locality", outside, 0.0);

  const auto power = power_iteration(g, s, kAlpha, 1e-11, false);
  rec.observe("power_vs_dense_oracle", l1_distance(power, exact), 1e-10);
}

void check_averaging(Recorder& rec, Rng& rng, NodeId max_n) {
  const auto inst = random_instance(rng, max_n);
  const Graph& g = inst.graph;
  const NodeId n = g.node_count();
  SolverConfig cfg;
  cfg.alpha = kAlpha;
  cfg.epsilon = 1e-9;
  cfg.dangling = DanglingPatch::kUniform;
  std::vector<double> mean(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    const auto r = ppr_from_scratch(g, s, cfg);
    for (NodeId v = 0; v < n; ++v) mean[v] += r.pi[v] / n;
  }
  const double tol = 1e-12;
  const auto pagerank = power_iteration(g, 0, kAlpha, tol, true);
  const double limit = n * cfg.epsilon / (1.0 - kAlpha) + 10 * tol;
  rec.observe("averaging (slack)", l1_distance(mean, pagerank) - limit, 0.0);
}

struct Evolved {
  std::shared_ptr<const Graph> old_graph;
  std::shared_ptr<const Graph> new_graph;
  std::shared_ptr<const IdMap> map;
  PerturbationBatch batch;
};

Evolved evolve(const Graph& g, PerturbationBatch batch) {
  auto applied = apply_batch(g, batch);
  return {std::make_shared<const Graph>(g), std::make_shared<const Graph>(applied.graph),
          std::make_shared<const IdMap>(applied.id_map), std::move(batch)};
}

// alpha * sum over deleted u of x_d[u] * (old row of u restricted to survivors).
std::vector<double> deletion_term(const Evolved& ev, NodeId s_old, const PprVector& prior) {
  std::vector<double> term(ev.new_graph->node_count(), 0.0);
  for (NodeId u = 0; u < ev.old_graph->node_count(); ++u) {
    if (!ev.map->is_deleted(u)) continue;
    const auto row = dense_row(*ev.old_graph, u, s_old);
    for (NodeId t = 0; t < row.size(); ++t) {
      if (row[t] != 0.0 && !ev.map->is_deleted(t)) {
        term[ev.map->to_new(t)] += kAlpha * prior[u] * row[t];
      }
    }
  }
  return term;
}

void check_changed_rows(Recorder& rec, const Evolved& ev, NodeId s_old) {
  const NodeId s_new = ev.map->to_new(s_old);
  const auto fast = changed_rows(*ev.old_graph, *ev.new_graph, *ev.map, s_old, s_new);
  std::vector<NodeId> brute;
  const NodeId new_n = ev.new_graph->node_count();
  for (NodeId u = 0; u < ev.old_graph->node_count(); ++u) {
    if (ev.map->is_deleted(u)) continue;
    const auto old_row = dense_row(*ev.old_graph, u, s_old);
    const auto new_row = dense_row(*ev.new_graph, ev.map->to_new(u), s_new);
    std::vector<double> lifted(new_n, 0.0);
    bool differs = false;
    for (NodeId t = 0; t < old_row.size(); ++t) {
      if (old_row[t] == 0.0) continue;
      if (ev.map->is_deleted(t)) differs = true;
      else lifted[ev.map->to_new(t)] = old_row[t];
    }
    if (differs || lifted != new_row) brute.push_back(u);
  }
  rec.observe("changed_rows_vs_brute_force", fast == brute ? 0.0 : 1.0, 0.0);
}

void check_dynamic(Recorder& rec, Rng& rng, NodeId max_n) {
  auto inst = random_instance(rng, max_n);
  const Graph& g = inst.graph;
  const NodeId s = inst.source;
  SolverConfig cfg;
  cfg.alpha = kAlpha;
  cfg.epsilon = 1e-8;

  // Link-only change.
  {
    auto ev = evolve(g, random_link_batch(g, 1 + rng.below(50), rng));
    const auto prior = ppr_from_scratch(g, s, cfg);
    const auto p = make_update_problem(ev.old_graph, ev.new_graph, ev.map, s, prior.pi, prior.r,
                                       cfg);
    const auto init = tracking_init(p);
    rec.observe("tracking_exactness",
                max_abs_diff(residual_of(*ev.new_graph, s, init.pi, kAlpha), init.r), 1e-12);
    check_changed_rows(rec, ev, s);
  }

  // Single edge: per-edge baseline equals TrackingPPR + push, and the
  // initial residual grows by at most 2 alpha max x.
  {
    auto ev = evolve(g, random_link_batch(g, 1, rng));
    const auto prior = ppr_from_scratch(g, s, cfg);
    const auto p = make_update_problem(ev.old_graph, ev.new_graph, ev.map, s, prior.pi, prior.r,
                                       cfg);
    const auto init = tracking_init(p);
    const double max_x = *std::max_element(prior.pi.begin(), prior.pi.end());
    rec.observe("single_edge_residual_growth (slack)",
                l1_norm(init.r) - l1_norm(prior.r) - 2 * kAlpha * max_x, 1e-15);
    const auto tracked = tracking_update(p);
    const auto baseline = per_edge_baseline(p);
    rec.observe("single_edge_baseline_equals_tracking",
                tracked.pi == baseline.pi && tracked.r == baseline.r ? 0.0 : 1.0, 0.0);
  }

  // Node and link change.
  const auto inserts = rng.below(6);
  const auto deletes = std::min<std::uint64_t>(rng.below(6), g.node_count() - 2);
  auto ev = evolve(g, random_node_batch(g, inserts, deletes, rng.below(21), 3.0, s, rng));
  const NodeId s_new = ev.map->to_new(s);
  check_changed_rows(rec, ev, s);

  const auto prior = ppr_from_scratch(g, s, cfg);
  auto p = make_update_problem(ev.old_graph, ev.new_graph, ev.map, s, prior.pi, prior.r, cfg);
  const auto term = deletion_term(ev, s, prior.pi);

  const auto plain = vw_init(p);
  auto discrepancy = residual_of(*ev.new_graph, s_new, plain.pi, kAlpha);
  for (std::size_t i = 0; i < discrepancy.size(); ++i) discrepancy[i] -= plain.r[i];
  std::vector<double> expected(term.size());
  for (std::size_t i = 0; i < term.size(); ++i) expected[i] = -term[i];
  rec.observe("deletion_discrepancy", max_abs_diff(discrepancy, expected), 1e-12);

  // Amendments stay inside the changed rows' and deleted rows' neighborhoods.
  {
    std::vector<char> allowed(ev.new_graph->node_count(), 0);
    for (NodeId u : changed_rows(*ev.old_graph, *ev.new_graph, *ev.map, s, s_new)) {
      for (NodeId t : out_neighbors_effective(*ev.old_graph, u, s)) {
        if (!ev.map->is_deleted(t)) allowed[ev.map->to_new(t)] = 1;
      }
      for (NodeId t : out_neighbors_effective(*ev.new_graph, ev.map->to_new(u), s_new)) {
        allowed[t] = 1;
      }
    }
    for (NodeId u : ev.map->deleted()) {
      for (NodeId t : out_neighbors_effective(*ev.old_graph, u, s)) {
        if (!ev.map->is_deleted(t)) allowed[ev.map->to_new(t)] = 1;
      }
    }
    p.exact_deletion_correction = true;
    const auto exact = vw_init(p);
    double outside = 0.0;
    for (NodeId v : exact.amended) outside += allowed[v] ? 0.0 : 1.0;
    rec.observe("initializer_locality", outside, 0.0);
    rec.observe("exact_correction",
                max_abs_diff(residual_of(*ev.new_graph, s_new, exact.pi, kAlpha), exact.r),
                1e-12);
  }

  // End to end against the dense oracle on the new web.
  const auto truth = oracle_dense(*ev.new_graph, s_new, kAlpha);
  double x_d = 0.0;
  for (NodeId u : ev.map->deleted()) x_d += prior.pi[u];

  p.exact_deletion_correction = true;
  const auto exact = vwppr_update(p);
  rec.observe("end_to_end_vwppr_exact (slack)",
              l1_distance(exact.pi, truth) - l1_error_bound(exact.r, kAlpha), 1e-12);
  const auto baseline = per_edge_baseline(p);
  rec.observe("end_to_end_per_edge (slack)",
              l1_distance(baseline.pi, truth) - l1_error_bound(baseline.r, kAlpha), 1e-12);
  const auto scratch = ppr_from_scratch(*ev.new_graph, s_new, cfg);
  rec.observe("end_to_end_from_scratch (slack)",
              l1_distance(scratch.pi, truth) - l1_error_bound(scratch.r, kAlpha), 1e-12);
  p.exact_deletion_correction = false;
  const auto plain_run = vwppr_update(p);
  rec.observe("end_to_end_vwppr_default (slack)",
              l1_distance(plain_run.pi, truth) - l1_error_bound(plain_run.r, kAlpha) -
                  kAlpha * x_d / (1.0 - kAlpha),
              1e-12);

  // Undoing the batch restores the original edge set under the composed map.
  {
    BatchResult forward{*ev.new_graph, *ev.map};
    const auto back = apply_batch(*ev.new_graph, reverse_batch(g, ev.batch, forward));
    std::vector<NodeId> compose(g.node_count());
    NodeId next_deleted = ev.map->survivor_count();
    for (NodeId u = 0; u < g.node_count(); ++u) {
      compose[u] = ev.map->is_deleted(u) ? back.id_map.survivor_count() +
                                               (next_deleted++ - ev.map->survivor_count())
                                         : back.id_map.to_new(ev.map->to_new(u));
    }
    bool same = back.graph.edge_count() == g.edge_count() &&
                back.graph.node_count() == g.node_count();
    for (const Edge& e : g.edges()) {
      same = same && back.graph.has_edge(compose[e.from], compose[e.to]);
    }
    rec.observe("apply_then_reverse_batch", same ? 0.0 : 1.0, 0.0);
  }
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

VerifyReport verify_suite(VerifyScale scale, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const NodeId max_n = scale == VerifyScale::kSmall ? 200 : 1000;
  const int instances = scale == VerifyScale::kSmall ? 50 : 20;
  const int averaging_graphs = scale == VerifyScale::kSmall ? 20 : 5;

  Recorder rec;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) check_solver(rec, random_instance(rng, max_n));
  for (int i = 0; i < averaging_graphs; ++i) check_averaging(rec, rng, std::min<NodeId>(max_n, 200));
  for (int i = 0; i < instances; ++i) check_dynamic(rec, rng, max_n);

  VerifyReport report;
  report.results = rec.take();
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void print_verify_report(std::ostream& out, const VerifyReport& report) {
  for (const auto& r : report.results) {
    out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(42) << r.name
        << " cases=" << std::setw(4) << r.cases << " worst=" << std::scientific
        << std::setprecision(3) << r.worst << " limit=" << r.limit << std::defaultfloat << '\n';
  }
  out << (report.all_passed() ? "all invariants hold" : "invariant violations found") << " ("
      << std::fixed << std::setprecision(2) << report.seconds << " s)" << std::defaultfloat
      << '\n';
}

}  // namespace dynppr
