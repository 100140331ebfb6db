#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynppr/dynamic.hpp"
#include "dynppr/edge_list.hpp"
#include "dynppr/perturb.hpp"
#include "dynppr/solver.hpp"

namespace dynppr {

enum class Method { kVwppr, kVwpprExact, kPerEdge, kTrackingOnly, kFromScratch };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);
// Comma-separated list, e.g. "vwppr,per_edge".
std::vector<Method> parse_methods(std::string_view text);

struct ExperimentSpec {
  std::string dataset_path;
  std::string dataset_id;  // defaults to the file name
  LoadOptions load;
  PerturbPlan plan;
  std::uint32_t source_count = 100;
  std::vector<Method> methods = {Method::kVwppr, Method::kPerEdge};
  std::map<Method, double> epsilon;  // per-method override of default_epsilon
  double default_epsilon = 1e-9;
  double alpha = 0.85;
  double benchmark_epsilon = 1e-10;
  std::string output_path;       // CSV rows; the JSON summary goes to <output_path>.json
  std::string prior_cache_dir;   // empty: priors are kept in memory only
  std::uint64_t rng_seed = 1;    // source sampling
  unsigned workers = 0;          // 0: hardware concurrency
  Selection selection = Selection::kQueue;
  std::optional<std::uint64_t> max_pushes;

  double epsilon_for(Method m) const;
  SolverConfig solver_config(double epsilon) const;
  void validate() const;
};

struct ReportRow {
  std::string dataset;
  Method method = Method::kVwppr;
  NodeId source = 0;  // ID in the full dataset
  std::uint64_t pushes = 0;
  double wall_time_s = 0.0;
  double l1_error = 0.0;  // against the benchmark PPR on the updated web
  double initializer_time_s = 0.0;
  double epsilon = 0.0;
  bool failed = false;
  std::string error;
  // Not serialized: used for bound checks.
  double final_residual_l1 = 0.0;
  double deleted_mass = 0.0;  // ||x_d||_1 of the prior
};

struct MethodSummary {
  Method method = Method::kVwppr;
  double epsilon = 0.0;
  std::size_t rows = 0;
  std::size_t failed = 0;
  double mean_pushes = 0.0;
  double mean_wall_time_s = 0.0;
  double mean_l1_error = 0.0;
  double mean_initializer_time_s = 0.0;
  double wall_time_s_per_100_sources = 0.0;
};

std::vector<MethodSummary> summarize(const std::vector<ReportRow>& rows);

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);
std::string summary_json(const std::vector<MethodSummary>& summary, const std::string& config);

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<MethodSummary> summary;
  std::string config_json;
};

// Runs `fn(i)` for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

// One dataset, one evolution and one set of sources. Priors (per epsilon) and
// benchmark PPRs are computed on first use and cached.
class Experiment {
 public:
  explicit Experiment(ExperimentSpec spec);
  Experiment(ExperimentSpec spec, Graph full);

  const ExperimentSpec& spec() const noexcept { return spec_; }
  const Evolution& evolution() const noexcept { return evo_; }
  const std::vector<NodeId>& sources() const noexcept { return sources_; }  // full IDs
  std::string config_json() const;

  // One row per source.
  std::vector<ReportRow> run_method(Method method, double epsilon);
  ExperimentReport run();

  double mean_l1_error(Method method, double epsilon);

  const PprVector& benchmark(std::size_t source_index);
  // Prior (pi, r) per source on the original web, read from or written to
  // spec.prior_cache_dir when set.
  const std::vector<PprResult>& priors(double epsilon);

 private:
  void prepare(Graph full);
  std::string prior_cache_path(double epsilon, NodeId source) const;
  ReportRow run_one(Method method, double epsilon, std::size_t source_index,
                    const PprResult& prior);

  ExperimentSpec spec_;
  Evolution evo_;
  std::shared_ptr<const Graph> original_;
  std::shared_ptr<const Graph> updated_;
  std::shared_ptr<const IdMap> id_map_;
  std::shared_ptr<const std::vector<NodeId>> structural_;
  std::vector<EdgeMutation> sequence_;
  std::vector<NodeId> sources_;
  std::vector<PprVector> benchmarks_;
  std::map<double, std::vector<PprResult>> priors_;
  std::map<std::pair<Method, double>, std::vector<ReportRow>> runs_;
  std::mutex mutex_;
};

// Loads the dataset, runs every method and writes the CSV and JSON summary
// when spec.output_path is set.
ExperimentReport run_experiment(const ExperimentSpec& spec);

struct CalibrationResult {
  double epsilon = 0.0;
  double target_error = 0.0;
  double reference_epsilon = 0.0;
  double reference_error = 0.0;
  std::vector<std::pair<double, double>> trace;  // (epsilon, mean l1 error) of each probe
};

// Adjusts the target method's epsilon (geometric bisection) until its mean l1
// error is within `relative_tolerance` of the reference method's error at
// `reference_epsilon`.
CalibrationResult calibrate_epsilon(Experiment& experiment, Method target, Method reference,
                                    double reference_epsilon, double relative_tolerance = 0.05,
                                    int max_probes = 40);

enum class VerifyScale { kSmall, kMedium };

struct InvariantResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // worst observed value of the checked quantity
  double limit = 0.0;  // pass iff worst <= limit
  std::size_t cases = 0;
};

struct VerifyReport {
  std::vector<InvariantResult> results;
  double seconds = 0.0;
  bool all_passed() const;
};

// Runs the solver and initializer invariants on seeded random graphs.
VerifyReport verify_suite(VerifyScale scale, std::uint64_t seed = 20240601);
void print_verify_report(std::ostream& out, const VerifyReport& report);

}  // namespace dynppr
