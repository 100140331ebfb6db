#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dynppr/edge_list.hpp"
#include "dynppr/errors.hpp"
#include "dynppr/harness.hpp"
#include "dynppr/io.hpp"
#include "dynppr/perturb.hpp"

namespace fs = std::filesystem;
using namespace dynppr;

namespace {

struct DatasetArgs {
  std::string path;
  std::string id;
  bool undirected = false;
  bool compact = false;
  std::string plan_file;
  PerturbPlan plan;
};

struct RunArgs {
  double alpha = 0.85;
  double eps = 1e-9;
  double benchmark_eps = 1e-10;
  std::uint32_t sources = 100;
  std::uint64_t seed = 1;
  std::string methods = "vwppr,per_edge";
  std::vector<std::string> method_eps;
  bool exact_correction = false;
  std::string out;
  std::string cache;
  unsigned workers = 0;
  std::string selection = "queue";
};

void add_dataset(CLI::App* cmd, DatasetArgs& d) {
  cmd->add_option("dataset", d.path, "edge list (u v per line)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dataset-id", d.id, "name used in reports (default: file name)");
  cmd->add_flag("--undirected", d.undirected, "read every line as two arcs");
  cmd->add_flag("--compact-ids", d.compact, "relabel node IDs to 0..n-1");
  cmd->add_option("--plan", d.plan_file, "plan JSON; overrides the plan flags")
      ->check(CLI::ExistingFile);
  cmd->add_option("--insert-nodes", d.plan.insert_nodes, "a: nodes added by the batch");
  cmd->add_option("--delete-nodes", d.plan.delete_nodes, "d: nodes removed by the batch");
  cmd->add_option("--insert-edge-fraction", d.plan.insert_edge_fraction,
                  "k as a fraction of |E|");
  cmd->add_option("--delete-edge-fraction", d.plan.delete_edge_fraction,
                  "l as a fraction of |E|");
  cmd->add_option("--plan-seed", d.plan.rng_seed, "seed of the evolution");
}

void add_run(CLI::App* cmd, RunArgs& r) {
  cmd->add_option("--alpha", r.alpha, "continuation probability")->capture_default_str();
  cmd->add_option("--eps", r.eps, "push threshold for every method")->capture_default_str();
  cmd->add_option("--method-eps", r.method_eps, "per-method threshold, e.g. vwppr=3.3e-9");
  cmd->add_option("--benchmark-eps", r.benchmark_eps, "threshold of the benchmark PPR")
      ->capture_default_str();
  cmd->add_option("--sources", r.sources, "number of sampled sources")->capture_default_str();
  cmd->add_option("--seed", r.seed, "seed of source sampling")->capture_default_str();
  cmd->add_option("--methods", r.methods,
                  "comma list of vwppr, vwppr_exact, per_edge, tracking_only, from_scratch")
      ->capture_default_str();
  cmd->add_flag("--exact-correction", r.exact_correction,
                "run vwppr with the exact deletion correction");
  cmd->add_option("--cache", r.cache, "directory for cached priors");
  cmd->add_option("--workers", r.workers, "worker threads (0: all cores)");
  cmd->add_option("--selection", r.selection, "queue or max_residual")->capture_default_str();
}

PerturbPlan load_plan(const DatasetArgs& d) {
  if (d.plan_file.empty()) return d.plan;
  std::ifstream in(d.plan_file);
  std::stringstream text;
  text << in.rdbuf();
  return plan_from_json(text.str());
}

ExperimentSpec make_spec(const DatasetArgs& d, const RunArgs& r) {
  ExperimentSpec spec;
  spec.dataset_path = d.path;
  spec.dataset_id = d.id;
  spec.load.undirected = d.undirected;
  spec.load.compact_ids = d.compact;
  spec.plan = load_plan(d);
  spec.alpha = r.alpha;
  spec.default_epsilon = r.eps;
  spec.benchmark_epsilon = r.benchmark_eps;
  spec.source_count = r.sources;
  spec.rng_seed = r.seed;
  spec.methods = parse_methods(r.methods);
  if (r.exact_correction) {
    for (Method& m : spec.methods) {
      if (m == Method::kVwppr) m = Method::kVwpprExact;
    }
  }
  for (const auto& item : r.method_eps) {
    const auto eq = item.find('=');
    const auto m = parse_method(item.substr(0, eq));
    if (eq == std::string::npos || !m) throw ValidationError("bad --method-eps '" + item + "'");
    spec.epsilon[*m] = std::stod(item.substr(eq + 1));
  }
  spec.output_path = r.out;
  spec.prior_cache_dir = r.cache;
  spec.workers = r.workers;
  const auto sel = parse_selection(r.selection);
  if (!sel) throw ValidationError("unknown selection '" + r.selection + "'");
  spec.selection = *sel;
  return spec;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void print_summary(const std::vector<MethodSummary>& summary) {
  std::cout << std::left << std::setw(15) << "method" << std::setw(11) << "epsilon"
            << std::setw(7) << "rows" << std::setw(7) << "failed" << std::setw(14) << "mean_pushes"
            << std::setw(14) << "mean_l1_error" << std::setw(14) << "mean_init_s"
            << "time_per_100_sources_s\n";
  for (const auto& s : summary) {
    std::cout << std::left << std::setw(15) << to_string(s.method) << std::setw(11)
              << std::setprecision(3) << s.epsilon << std::setw(7) << s.rows << std::setw(7)
              << s.failed << std::setw(14) << std::setprecision(6) << s.mean_pushes
              << std::setw(14) << std::setprecision(4) << s.mean_l1_error << std::setw(14)
              << s.mean_initializer_time_s << s.wall_time_s_per_100_sources << '\n';
  }
}

int cmd_gen(const DatasetArgs& d, const std::string& out_dir) {
  LoadOptions load{d.compact, d.undirected};
  LoadStats stats;
  const Graph full = load_edge_list_file(d.path, load, &stats);
  const PerturbPlan plan = load_plan(d);
  for (const auto& w : plan.validate(full)) std::cerr << "warning: " << w << '\n';
  const Evolution evo = make_evolution(full, plan);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  {
    std::ofstream f(dir / "original.txt");
    write_edge_list(f, evo.original);
  }
  {
    std::ofstream f(dir / "updated.txt");
    write_edge_list(f, evo.updated);
  }
  {
    std::ofstream f(dir / "batch.txt");
    write_batch(f, evo.batch);
  }
  write_file(dir / "plan.json", plan_to_json(plan) + '\n');
  {
    std::ofstream f(dir / "original_to_full.txt");
    for (NodeId u = 0; u < evo.original_to_full.size(); ++u) {
      f << u << ' ' << evo.original_to_full[u] << '\n';
    }
  }
  std::cout << "dataset: " << stats.nodes << " nodes, " << stats.edges << " edges ("
            << stats.raw_edges << " before dedup, " << stats.self_loops << " self loops)\n"
            << "original: " << evo.original.node_count() << " nodes, "
            << evo.original.edge_count() << " edges\n"
            << "updated: " << evo.updated.node_count() << " nodes, " << evo.updated.edge_count()
            << " edges\n"
            << "batch: +" << evo.batch.inserted_nodes.size() << " nodes, -"
            << evo.batch.deleted_nodes.size() << " nodes, +" << evo.batch.inserted_edges.size()
            << " edges, -" << evo.batch.deleted_edges.size() << " edges\n";
  return 0;
}

int cmd_prior(const ExperimentSpec& spec) {
  Experiment exp(spec);
  std::vector<double> eps_list;
  for (Method m : spec.methods) {
    if (m == Method::kFromScratch) continue;
    const double e = spec.epsilon_for(m);
    if (std::find(eps_list.begin(), eps_list.end(), e) == eps_list.end()) eps_list.push_back(e);
  }
  for (double e : eps_list) {
    const auto& priors = exp.priors(e);
    double pushes = 0;
    for (const auto& p : priors) pushes += static_cast<double>(p.stats.pushes);
    std::cout << "eps=" << e << ": " << priors.size() << " priors";
    if (!spec.prior_cache_dir.empty()) std::cout << " in " << spec.prior_cache_dir;
    std::cout << " (mean pushes " << pushes / static_cast<double>(priors.size()) << ")\n";
  }
  return 0;
}

int cmd_update(const ExperimentSpec& spec) {
  const ExperimentReport report = run_experiment(spec);
  print_summary(report.summary);
  if (!spec.output_path.empty()) {
    std::cout << "rows: " << spec.output_path << "\nsummary: " << spec.output_path << ".json\n";
  }
  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.failed ? 1 : 0;
  if (failed > 0) std::cerr << failed << " rows failed\n";
  return 0;
}

int cmd_calibrate(const ExperimentSpec& spec, const std::string& target,
                  const std::string& reference, double reference_eps, double tolerance) {
  Experiment exp(spec);
  const auto t = parse_method(target);
  const auto r = parse_method(reference);
  if (!t || !r) throw ValidationError("unknown method");
  const auto result = calibrate_epsilon(exp, *t, *r, reference_eps, tolerance);
  for (const auto& [eps, err] : result.trace) {
    std::cout << "probe eps=" << eps << " mean_l1_error=" << err << '\n';
  }
  std::cout << target << " eps=" << result.epsilon << " error=" << result.target_error << '\n'
            << reference << " eps=" << result.reference_epsilon
            << " error=" << result.reference_error << '\n';
  if (!spec.output_path.empty()) {
    std::ostringstream j;
    j << std::setprecision(17) << "{\n  \"target\": \"" << target << "\",\n  \"reference\": \""
      << reference << "\",\n  \"epsilon\": " << result.epsilon
      << ",\n  \"target_error\": " << result.target_error
      << ",\n  \"reference_epsilon\": " << result.reference_epsilon
      << ",\n  \"reference_error\": " << result.reference_error << "\n}\n";
    write_file(spec.output_path, j.str());
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<ReportRow> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    auto part = read_report_csv(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto summary = summarize(rows);
  print_summary(summary);
  if (!out.empty()) write_file(out, summary_json(summary, "") + '\n');
  return 0;
}

int cmd_stats(const DatasetArgs& d, const std::string& binary_out) {
  LoadOptions load{d.compact, d.undirected};
  LoadStats stats;
  const auto start = std::chrono::steady_clock::now();
  const Graph g = load_edge_list_file(d.path, load, &stats);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t dangling = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) dangling += g.out_degree(u) == 0 ? 1 : 0;
  std::cout << "{\"nodes\": " << g.node_count() << ", \"edges\": " << g.edge_count()
            << ", \"raw_edges\": " << stats.raw_edges << ", \"lines\": " << stats.lines
            << ", \"comment_lines\": " << stats.comment_lines
            << ", \"self_loops\": " << stats.self_loops << ", \"dangling\": " << dangling
            << ", \"load_seconds\": " << seconds << "}\n";
  if (!binary_out.empty()) save_binary(binary_out, g);
  return 0;
}

int cmd_synth(NodeId nodes, double degree, double gamma, std::uint64_t seed,
              const std::string& out) {
  Rng rng(seed);
  const Graph g = power_law_digraph(nodes, degree, gamma, rng);
  std::ofstream f(out);
  if (!f) throw Error("cannot write '" + out + "'");
  f << "# power-law digraph: nodes " << nodes << " mean_degree " << degree << " gamma " << gamma
    << " seed " << seed << '\n';
  write_edge_list(f, g);
  std::cout << g.node_count() << " nodes, " << g.edge_count() << " edges -> " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic personalized PageRank: evolutions, priors, updates and reports"};
  app.require_subcommand(1);

  DatasetArgs data;
  RunArgs run;

  auto* gen = app.add_subcommand("gen", "build the evolution of a dataset and write batch files");
  add_dataset(gen, data);
  std::string gen_out = "evolution";
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();

  auto* prior = app.add_subcommand("prior", "compute and cache prior PPRs on the original web");
  add_dataset(prior, data);
  add_run(prior, run);

  auto* update = app.add_subcommand("update", "run update methods and write the report");
  add_dataset(update, data);
  add_run(update, run);
  update->add_option("--out", run.out, "CSV path; the JSON summary goes to <out>.json");

  auto* calibrate =
      app.add_subcommand("calibrate", "match a method's mean l1 error to a reference method");
  add_dataset(calibrate, data);
  add_run(calibrate, run);
  std::string target = "vwppr_exact";
  std::string reference = "per_edge";
  double tolerance = 0.05;
  calibrate->add_option("--target", target, "method whose epsilon is adjusted")
      ->capture_default_str();
  calibrate->add_option("--reference", reference, "method run at --eps")->capture_default_str();
  calibrate->add_option("--tolerance", tolerance, "relative error tolerance")
      ->capture_default_str();
  calibrate->add_option("--out", run.out, "JSON result path");

  auto* verify = app.add_subcommand("verify", "run the invariant suite on seeded random graphs");
  std::string scale = "small";
  std::uint64_t verify_seed = 20240601;
  verify->add_option("--scale", scale, "small or medium")
      ->check(CLI::IsMember({"small", "medium"}))
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "seed of the random graphs")->capture_default_str();

  auto* report = app.add_subcommand("report", "aggregate report rows into per-method means");
  std::vector<std::string> report_in;
  std::string report_out;
  report->add_option("rows", report_in, "CSV files written by update")->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "JSON summary path");

  auto* stats = app.add_subcommand("stats", "load an edge list and print its node and edge counts");
  add_dataset(stats, data);
  std::string binary_out;
  stats->add_option("--binary", binary_out, "also write the binary adjacency cache");

  auto* synth = app.add_subcommand("synth", "write a random power-law edge list");
  NodeId synth_nodes = 50000;
  double synth_degree = 8.0;
  double synth_gamma = 2.5;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  synth->add_option("--nodes", synth_nodes, "node count")->capture_default_str();
  synth->add_option("--degree", synth_degree, "mean out-degree")->capture_default_str();
  synth->add_option("--gamma", synth_gamma, "degree exponent")->capture_default_str();
  synth->add_option("--seed", synth_seed, "seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output edge list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen(data, gen_out);
    if (*prior) return cmd_prior(make_spec(data, run));
    if (*update) return cmd_update(make_spec(data, run));
    if (*calibrate) {
      auto spec = make_spec(data, run);
      spec.methods = parse_methods(target + "," + reference);
      return cmd_calibrate(spec, target, reference, run.eps, tolerance);
    }
    if (*verify) {
      const auto result =
          verify_suite(scale == "small" ? VerifyScale::kSmall : VerifyScale::kMedium, verify_seed);
      print_verify_report(std::cout, result);
      return result.all_passed() ? 0 : 1;
    }
    if (*report) return cmd_report(report_in, report_out);
    if (*stats) return cmd_stats(data, binary_out);
    if (*synth) return cmd_synth(synth_nodes, synth_degree, synth_gamma, synth_seed, synth_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n' << e.trace();
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
