#pragma once

// Experiment orchestration: instances x restarts x noise levels per solver,
// appended as JSON lines, then reduced to per-(solver, n, noise) TTS rows.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xorbench/kvconfig.hpp"
#include "xorbench/solvers.hpp"
#include "xorbench/tts.hpp"

namespace xorbench {

struct SolverPlan {
  std::string name;
  SolverConfig config;
  std::uint64_t max_steps = 0;  // 0: use the plan's noise-free / noisy cap
};

struct ExperimentPlan {
  std::vector<std::size_t> sizes;
  std::size_t instances_per_size = 25;
  std::size_t restarts_per_instance = 50;
  std::vector<SolverPlan> solvers;
  std::vector<double> cutoff_grid;  // empty: geometric grid per solver cap
  std::size_t cutoff_points_per_decade = 20;
  std::vector<double> noise_levels{0.0};  // applies to the laser solver only
  std::uint64_t master_seed = 1;
  std::uint64_t max_steps_noise_free = 100000;
  std::uint64_t max_steps_noisy = 500000;
  std::string output = "results.jsonl";
  std::string summary = "summary.csv";
  int threads = 0;  // 0: OpenMP default
  KappaTable kappa_table;
  KeyValueConfig resolved;  // defaults merged with the plan, echoed into outputs
};

// `defaults` is the solver defaults file; plan entries override it.
// Throws PlanInvalid / ConfigError.
ExperimentPlan plan_from_config(const KeyValueConfig& plan, const KeyValueConfig& defaults);
void validate(const ExperimentPlan& plan);

std::uint64_t max_steps_for(const ExperimentPlan& plan, const SolverPlan& solver, double noise);
std::vector<double> noise_levels_for(const ExperimentPlan& plan, const SolverPlan& solver);
std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t n, std::size_t index);
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t n, std::size_t index,
                              std::size_t restart);

struct SummaryRow {
  std::string solver;
  std::size_t n = 0;
  double noise = 0.0;
  double tf_star = 0.0;
  double tts_steps = 0.0;
  double tts_seconds = 0.0;
  double mean_p = 0.0;
  std::size_t instances = 0;
  std::size_t restarts = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // every record of the plan, sorted
  std::vector<SummaryRow> summary;
  std::size_t executed = 0;
  std::size_t skipped = 0;
};

// With resume, work items already present in plan.output are skipped and new
// records are appended; without it the output is rewritten. Throws Io /
// PlanInvalid.
ExperimentResult run_experiment(const ExperimentPlan& plan, bool resume);

// Records belonging to one (solver, n, noise) group, by instance index.
std::vector<std::vector<RunRecord>> group_by_instance(std::span<const RunRecord> records);
TtsCurve curve_for(std::span<const RunRecord> group, std::span<const double> grid);
std::vector<SummaryRow> summarize(std::span<const RunRecord> records, const ExperimentPlan& plan);

inline constexpr const char* kSummaryColumns =
    "solver,n,noise,tf_star,tts_steps,tts_seconds,mean_p,instances,restarts";
void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows,
                       const std::string& header_comment = {});
// Accepts '#' comment lines. Throws Io / SyntaxError.
std::vector<SummaryRow> read_summary_csv(const std::string& path);

std::string format_real(double x);  // round-trip precision, "inf" for infinity

}  // namespace xorbench
