#include "dynppr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "dynppr/errors.hpp"
#include "dynppr/io.hpp"

namespace dynppr {

namespace {

constexpr std::string_view kCsvHeader =
    "dataset,method,source,pushes,wall_time_s,l1_error,initializer_time_s,epsilon,status";

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kVwppr: return "vwppr";
    case Method::kVwpprExact: return "vwppr_exact";
    case Method::kPerEdge: return "per_edge";
    case Method::kTrackingOnly: return "tracking_only";
    case Method::kFromScratch: return "from_scratch";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::kVwppr, Method::kVwpprExact, Method::kPerEdge, Method::kTrackingOnly,
                   Method::kFromScratch}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::vector<Method> parse_methods(std::string_view text) {
  std::vector<Method> methods;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto m = parse_method(part);
    if (!m) throw ValidationError("unknown method '" + part + "'");
    methods.push_back(*m);
  }
  return methods;
}

double ExperimentSpec::epsilon_for(Method m) const {
  const auto it = epsilon.find(m);
  return it == epsilon.end() ? default_epsilon : it->second;
}

SolverConfig ExperimentSpec::solver_config(double eps) const {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.epsilon = eps;
  cfg.selection = selection;
  cfg.max_pushes = max_pushes;
  return cfg;
}

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ValidationError("at least one method is required");
  if (source_count < 1) throw ValidationError("source_count must be at least 1");
  if (!(default_epsilon > 0.0) || !(benchmark_epsilon > 0.0)) {
    throw ValidationError("epsilons must be positive");
  }
  for (const auto& [m, e] : epsilon) {
    if (!(e > 0.0)) throw ValidationError("epsilon for " + std::string(to_string(m)) +
                                          " must be positive");
  }
  solver_config(default_epsilon).validate();
}

std::vector<MethodSummary> summarize(const std::vector<ReportRow>& rows) {
  std::vector<MethodSummary> out;
  auto find = [&](Method m, double eps) -> MethodSummary& {
    for (auto& s : out) {
      if (s.method == m && s.epsilon == eps) return s;
    }
    out.push_back({});
    out.back().method = m;
    out.back().epsilon = eps;
    return out.back();
  };
  for (const ReportRow& row : rows) {
    MethodSummary& s = find(row.method, row.epsilon);
    ++s.rows;
    if (row.failed) {
      ++s.failed;
      continue;
    }
    s.mean_pushes += static_cast<double>(row.pushes);
    s.mean_wall_time_s += row.wall_time_s;
    s.mean_l1_error += row.l1_error;
    s.mean_initializer_time_s += row.initializer_time_s;
  }
  for (auto& s : out) {
    const auto ok = static_cast<double>(s.rows - s.failed);
    if (ok == 0) continue;
    s.wall_time_s_per_100_sources = s.mean_wall_time_s / ok * 100.0;
    s.mean_pushes /= ok;
    s.mean_wall_time_s /= ok;
    s.mean_l1_error /= ok;
    s.mean_initializer_time_s /= ok;
  }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ReportRow& r : rows) {
    out << r.dataset << ',' << to_string(r.method) << ',' << r.source << ',' << r.pushes << ','
        << fmt(r.wall_time_s) << ',' << fmt(r.l1_error) << ',' << fmt(r.initializer_time_s) << ','
        << fmt(r.epsilon) << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError(1, "unexpected report header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw ParseError(line_no, "expected 9 columns");
    ReportRow r;
    r.dataset = f[0];
    const auto m = parse_method(f[1]);
    if (!m) throw ParseError(line_no, "unknown method '" + f[1] + "'");
    r.method = *m;
    try {
      r.source = static_cast<NodeId>(std::stoul(f[2]));
      r.pushes = std::stoull(f[3]);
      r.wall_time_s = std::stod(f[4]);
      r.l1_error = std::stod(f[5]);
      r.initializer_time_s = std::stod(f[6]);
      r.epsilon = std::stod(f[7]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed number");
    }
    r.failed = f[8] == "failed";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_json(const std::vector<MethodSummary>& summary, const std::string& config) {
  nlohmann::ordered_json j;
  j["config"] = config.empty() ? nlohmann::ordered_json::object()
                               : nlohmann::ordered_json::parse(config);
  j["methods"] = nlohmann::ordered_json::array();
  for (const MethodSummary& s : summary) {
    nlohmann::ordered_json m;
    m["method"] = to_string(s.method);
    m["epsilon"] = s.epsilon;
    m["rows"] = s.rows;
    m["failed"] = s.failed;
    m["mean_pushes"] = s.mean_pushes;
    m["mean_wall_time_s"] = s.mean_wall_time_s;
    m["mean_l1_error"] = s.mean_l1_error;
    m["mean_initializer_time_s"] = s.mean_initializer_time_s;
    m["wall_time_s_per_100_sources"] = s.wall_time_s_per_100_sources;
    j["methods"].push_back(std::move(m));
  }
  return j.dump(2);
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Experiment::Experiment(ExperimentSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  LoadStats stats;
  Graph full = load_edge_list_file(spec_.dataset_path, spec_.load, &stats);
  if (spec_.dataset_id.empty()) {
    spec_.dataset_id = std::filesystem::path(spec_.dataset_path).filename().string();
  }
  prepare(std::move(full));
}

Experiment::Experiment(ExperimentSpec spec, Graph full) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.dataset_id.empty()) spec_.dataset_id = "in-memory";
  prepare(std::move(full));
}

void Experiment::prepare(Graph full) {
  evo_ = make_evolution(full, spec_.plan);
  original_ = std::make_shared<const Graph>(evo_.original);
  updated_ = std::make_shared<const Graph>(evo_.updated);
  id_map_ = std::make_shared<const IdMap>(evo_.id_map);
  structural_ = std::make_shared<const std::vector<NodeId>>(
      structurally_changed_rows(*original_, *updated_, *id_map_));

  std::vector<NodeId> survivors;
  for (NodeId u = 0; u < original_->node_count(); ++u) {
    if (!id_map_->is_deleted(u)) survivors.push_back(evo_.original_to_full[u]);
  }
  if (survivors.empty()) throw ValidationError("no node survives the batch; cannot sample sources");
  Rng rng(spec_.rng_seed);
  const auto count = std::min<std::size_t>(spec_.source_count, survivors.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(survivors[i], survivors[i + rng.below(survivors.size() - i)]);
  }
  survivors.resize(count);
  std::sort(survivors.begin(), survivors.end());
  sources_ = std::move(survivors);
}

std::string Experiment::config_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = spec_.dataset_id;
  j["dataset_path"] = spec_.dataset_path;
  j["original_nodes"] = original_->node_count();
  j["original_edges"] = original_->edge_count();
  j["updated_nodes"] = updated_->node_count();
  j["updated_edges"] = updated_->edge_count();
  j["plan"] = nlohmann::ordered_json::parse(plan_to_json(spec_.plan));
  j["inserted_nodes"] = evo_.batch.inserted_nodes.size();
  j["deleted_nodes"] = evo_.batch.deleted_nodes.size();
  j["inserted_edges"] = evo_.batch.inserted_edges.size();
  j["deleted_edges"] = evo_.batch.deleted_edges.size();
  j["alpha"] = spec_.alpha;
  j["benchmark_epsilon"] = spec_.benchmark_epsilon;
  j["sources"] = sources_.size();
  j["source_seed"] = spec_.rng_seed;
  j["rng"] = Rng::kAlgorithm;
  j["selection"] = to_string(spec_.selection);
  j["edge_deletion_sampling"] = "uniform over the non-withheld stream";
  j["per_edge_baseline"] =
      "sequential single-edge updates with residual reuse";
  j["runtime_average"] = "wall_time_s_per_100_sources is the total over 100 sources";
  nlohmann::ordered_json eps;
  for (Method m : spec_.methods) eps[std::string(to_string(m))] = spec_.epsilon_for(m);
  j["epsilon"] = eps;
  return j.dump();
}

std::string Experiment::prior_cache_path(double epsilon, NodeId source) const {
  std::ostringstream key;
  key << spec_.dataset_id << '|' << original_->node_count() << '|' << original_->edge_count()
      << '|' << plan_to_json(spec_.plan) << '|' << fmt(epsilon) << '|' << fmt(spec_.alpha) << '|'
      << to_string(spec_.selection) << '|' << source;
  char name[40];
  std::snprintf(name, sizeof name, "prior-%016llx",
                static_cast<unsigned long long>(fnv1a(key.str())));
  return (std::filesystem::path(spec_.prior_cache_dir) / name).string();
}

const std::vector<PprResult>& Experiment::priors(double epsilon) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = priors_.find(epsilon); it != priors_.end()) return it->second;
  }
  std::vector<PprResult> result(sources_.size());
  const SolverConfig cfg = spec_.solver_config(epsilon);
  if (!spec_.prior_cache_dir.empty()) std::filesystem::create_directories(spec_.prior_cache_dir);
  parallel_for(sources_.size(), spec_.workers, [&](std::size_t i) {
    const NodeId s = evo_.full_to_original[sources_[i]];
    const NodeId n = original_->node_count();
    if (!spec_.prior_cache_dir.empty()) {
      const auto path = prior_cache_path(epsilon, s);
      std::ifstream pi_in(path + ".pi");
      std::ifstream r_in(path + ".r");
      if (pi_in && r_in) {
        result[i].pi = read_scores(pi_in, n);
        result[i].r = read_scores(r_in, n);
        return;
      }
    }
    SolverConfig unlimited = cfg;
    unlimited.max_pushes.reset();
    result[i] = ppr_from_scratch(*original_, s, unlimited);
    if (!spec_.prior_cache_dir.empty()) {
      const auto path = prior_cache_path(epsilon, s);
      std::ofstream pi_out(path + ".pi");
      write_scores(pi_out, result[i].pi);
      std::ofstream r_out(path + ".r");
      write_scores(r_out, result[i].r);
    }
  });
  std::lock_guard lock(mutex_);
  return priors_.emplace(epsilon, std::move(result)).first->second;
}

const PprVector& Experiment::benchmark(std::size_t source_index) {
  {
    std::lock_guard lock(mutex_);
    if (!benchmarks_.empty()) return benchmarks_[source_index];
  }
  std::vector<PprVector> bench(sources_.size());
  SolverConfig cfg = spec_.solver_config(spec_.benchmark_epsilon);
  cfg.max_pushes.reset();
  parallel_for(sources_.size(), spec_.workers, [&](std::size_t i) {
    bench[i] = ppr_from_scratch(*updated_, evo_.full_to_updated[sources_[i]], cfg).pi;
  });
  std::lock_guard lock(mutex_);
  if (benchmarks_.empty()) benchmarks_ = std::move(bench);
  return benchmarks_[source_index];
}

ReportRow Experiment::run_one(Method method, double epsilon, std::size_t i,
                              const PprResult& prior) {
  ReportRow row;
  row.dataset = spec_.dataset_id;
  row.method = method;
  row.source = sources_[i];
  row.epsilon = epsilon;
  const SolverConfig cfg = spec_.solver_config(epsilon);
  const NodeId s_old = evo_.full_to_original[sources_[i]];
  for (NodeId u = 0; u < original_->node_count(); ++u) {
    if (id_map_->is_deleted(u)) row.deleted_mass += prior.pi[u];
  }
  try {
    UpdateResult result;
    if (method == Method::kFromScratch) {
      PprResult fresh = ppr_from_scratch(*updated_, id_map_->to_new(s_old), cfg);
      result = {std::move(fresh.pi), std::move(fresh.r), fresh.stats, 0.0};
    } else {
      const auto problem =
          make_update_problem(original_, updated_, id_map_, s_old, prior.pi, prior.r, cfg,
                              method == Method::kVwpprExact, structural_);
      switch (method) {
        case Method::kVwppr:
        case Method::kVwpprExact: result = vwppr_update(problem); break;
        case Method::kPerEdge: result = per_edge_baseline(problem, sequence_); break;
        case Method::kTrackingOnly: result = tracking_update(problem); break;
        case Method::kFromScratch: break;
      }
    }
    row.pushes = result.stats.pushes;
    row.wall_time_s = result.stats.wall_time_s;
    row.initializer_time_s = result.initializer_time_s;
    row.final_residual_l1 = result.stats.final_residual_l1;
    row.l1_error = l1_distance(result.pi, benchmark(i));
  } catch (const Error& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

std::vector<ReportRow> Experiment::run_method(Method method, double epsilon) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = runs_.find({method, epsilon}); it != runs_.end()) return it->second;
  }
  benchmark(0);
  if (method == Method::kPerEdge && sequence_.empty()) {
    sequence_ = mutation_sequence(*original_, *updated_, *id_map_);
  }
  const auto& prior = priors(epsilon);
  std::vector<ReportRow> rows(sources_.size());
  parallel_for(sources_.size(), spec_.workers,
               [&](std::size_t i) { rows[i] = run_one(method, epsilon, i, prior[i]); });
  std::lock_guard lock(mutex_);
  runs_.emplace(std::make_pair(method, epsilon), rows);
  return rows;
}

double Experiment::mean_l1_error(Method method, double epsilon) {
  const auto rows = run_method(method, epsilon);
  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (r.failed) continue;
    sum += r.l1_error;
    ++ok;
  }
  if (ok == 0) throw Error("every run of " + std::string(to_string(method)) + " failed");
  return sum / static_cast<double>(ok);
}

ExperimentReport Experiment::run() {
  ExperimentReport report;
  for (Method m : spec_.methods) {
    auto rows = run_method(m, spec_.epsilon_for(m));
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  report.summary = summarize(report.rows);
  report.config_json = config_json();
  return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  Experiment experiment(spec);
  ExperimentReport report = experiment.run();
  if (!spec.output_path.empty()) {
    const auto parent = std::filesystem::path(spec.output_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream csv(spec.output_path);
    if (!csv) throw Error("cannot write '" + spec.output_path + "'");
    write_report_csv(csv, report.rows);
    std::ofstream json(spec.output_path + ".json");
    json << summary_json(report.summary, report.config_json) << '\n';
  }
  return report;
}

CalibrationResult calibrate_epsilon(Experiment& experiment, Method target, Method reference,
                                    double reference_epsilon, double relative_tolerance,
                                    int max_probes) {
  CalibrationResult result;
  result.reference_epsilon = reference_epsilon;
  result.reference_error = experiment.mean_l1_error(reference, reference_epsilon);
  const double goal = result.reference_error;

  auto trace_text = [&] {
    std::ostringstream out;
    for (const auto& [eps, err] : result.trace) out << "eps=" << eps << " err=" << err << '\n';
    return out.str();
  };
  int probes = 0;
  auto probe = [&](double eps) {
    if (probes++ >= max_probes) {
      throw CalibrationError("calibration did not converge within " +
                                 std::to_string(max_probes) + " probes",
                             trace_text());
    }
    const double err = experiment.mean_l1_error(target, eps);
    result.trace.emplace_back(eps, err);
    return err;
  };
  auto within = [&](double err) {
    return goal == 0.0 ? err == 0.0 : std::abs(err - goal) <= relative_tolerance * goal;
  };
  auto accept = [&](double eps, double err) {
    result.epsilon = eps;
    result.target_error = err;
    return result;
  };

  double err = probe(reference_epsilon);
  if (within(err)) return accept(reference_epsilon, err);

  // Bracket: error grows with epsilon.
  double lo = reference_epsilon;
  double hi = reference_epsilon;
  const double step = 4.0;
  if (err < goal) {
    double err_hi = err;
    while (err_hi < goal) {
      lo = hi;
      hi *= step;
      err_hi = probe(hi);
      if (within(err_hi)) return accept(hi, err_hi);
    }
  } else {
    double err_lo = err;
    while (err_lo > goal) {
      hi = lo;
      lo /= step;
      err_lo = probe(lo);
      if (within(err_lo)) return accept(lo, err_lo);
    }
  }
  while (true) {
    const double mid = std::sqrt(lo * hi);
    const double e = probe(mid);
    if (within(e)) return accept(mid, e);
    (e < goal ? lo : hi) = mid;
  }
}

}  // namespace dynppr
