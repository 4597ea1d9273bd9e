#include "xorbench/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "xorbench/error.hpp"
#include "xorbench/records.hpp"
#include "xorbench/xorsat.hpp"

namespace xorbench {

namespace {

[[noreturn]] void plan_invalid(const std::string& what) {
  throw Error(ErrorKind::PlanInvalid, what);
}

// Identity of one work item; restarts of the same (n, instance) share seeds
// across solvers and noise levels so comparisons are paired.
using WorkKey = std::tuple<std::string, std::size_t, double, std::size_t, std::size_t>;

WorkKey key_of(const RunRecord& r) {
  return {r.solver_id, r.n, r.noise, r.instance_index, r.restart};
}

bool record_less(const RunRecord& a, const RunRecord& b) { return key_of(a) < key_of(b); }

// Drops a partial last line left by an interrupted writer.
void trim_torn_tail(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (content.empty() || content.back() == '\n') return;
  const auto last = content.find_last_of('\n');
  std::filesystem::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

}  // namespace

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // shortest %g form that reads back to the same double
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t n, std::size_t index) {
  return stream_seed(master_seed, {0x1257a9ce, n, index});
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t n, std::size_t index,
                              std::size_t restart) {
  return stream_seed(master_seed, {0x5eed, n, index, restart});
}

ExperimentPlan plan_from_config(const KeyValueConfig& plan_kv, const KeyValueConfig& defaults) {
  KeyValueConfig kv = defaults;
  kv.merge(plan_kv);
  ExperimentPlan plan;
  plan.resolved = kv;
  for (auto n : kv.get_u64s("sizes")) plan.sizes.push_back(static_cast<std::size_t>(n));
  plan.instances_per_size = kv.get_u64("instances_per_size", plan.instances_per_size);
  plan.restarts_per_instance = kv.get_u64("restarts_per_instance", plan.restarts_per_instance);
  plan.cutoff_grid = kv.get_doubles("cutoff_grid");
  plan.cutoff_points_per_decade =
      kv.get_u64("cutoff_points_per_decade", plan.cutoff_points_per_decade);
  if (kv.has("noise_levels")) plan.noise_levels = kv.get_doubles("noise_levels");
  plan.master_seed = kv.get_u64("master_seed", plan.master_seed);
  plan.max_steps_noise_free = kv.get_u64("max_steps_noise_free", plan.max_steps_noise_free);
  plan.max_steps_noisy = kv.get_u64("max_steps_noisy", plan.max_steps_noisy);
  plan.output = kv.get_string("output", plan.output);
  plan.summary = kv.get_string("summary", plan.summary);
  plan.threads = static_cast<int>(kv.get_u64("threads", 0));
  plan.kappa_table = kappa_table_from(kv);
  for (const auto& name : kv.get_list("solvers")) {
    SolverPlan sp;
    sp.name = name;
    try {
      sp.config = solver_config_from(kv, name);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ConfigError) throw;
      plan_invalid(e.what());
    }
    sp.max_steps = kv.get_u64(name + ".max_steps", 0);
    plan.solvers.push_back(std::move(sp));
  }
  validate(plan);
  return plan;
}

void validate(const ExperimentPlan& plan) {
  if (plan.sizes.empty()) plan_invalid("no sizes");
  for (auto n : plan.sizes)
    if (n % 2 != 0 || n < 8) plan_invalid("size " + std::to_string(n) + " must be even and >= 8");
  if (plan.instances_per_size == 0) plan_invalid("instances_per_size must be >= 1");
  if (plan.restarts_per_instance == 0) plan_invalid("restarts_per_instance must be >= 1");
  if (plan.solvers.empty()) plan_invalid("no solvers");
  if (plan.noise_levels.empty()) plan_invalid("noise_levels is empty");
  for (double eta : plan.noise_levels)
    if (!(eta >= 0.0)) plan_invalid("noise levels must be >= 0");
  for (std::size_t g = 0; g < plan.cutoff_grid.size(); ++g)
    if (!(plan.cutoff_grid[g] > 0.0) || (g > 0 && !(plan.cutoff_grid[g] > plan.cutoff_grid[g - 1])))
      plan_invalid("cutoff_grid must be positive and strictly increasing");
  if (plan.cutoff_points_per_decade == 0) plan_invalid("cutoff_points_per_decade must be >= 1");
  for (const auto& s : plan.solvers) {
    try {
      SolverConfig probe = s.config;
      if (auto* lp = std::get_if<LaserParams>(&probe)) {
        if (lp->kappa <= 0.0 && plan.kappa_table.empty())
          plan_invalid("laser.kappa is auto but no laser.kappa.<n> calibration entries exist");
        lp->kappa = 1.0;
      }
      if (auto* ap = std::get_if<AnnealParams>(&probe); ap && ap->t_hi <= 0.0) ap->t_hi = ap->t_lo;
      if (auto* tp = std::get_if<TemperingParams>(&probe); tp && tp->t_hi <= 0.0) tp->t_hi = tp->t_lo;
      validate(probe);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PlanInvalid) throw;
      plan_invalid(std::string("solver ") + s.name + ": " + e.what());
    }
  }
}

std::vector<double> noise_levels_for(const ExperimentPlan& plan, const SolverPlan& solver) {
  if (std::holds_alternative<LaserParams>(solver.config)) return plan.noise_levels;
  return {0.0};
}

std::uint64_t max_steps_for(const ExperimentPlan& plan, const SolverPlan& solver, double noise) {
  if (solver.max_steps > 0) return solver.max_steps;
  return noise > 0.0 ? plan.max_steps_noisy : plan.max_steps_noise_free;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, bool resume) {
  validate(plan);
  ExperimentResult result;

  std::set<WorkKey> done;
  if (resume && std::filesystem::exists(plan.output)) {
    trim_torn_tail(plan.output);
    for (const RunRecord& r : read_records(plan.output)) done.insert(key_of(r));
  }

  struct Item {
    const SolverPlan* solver;
    std::size_t size_index;
    std::size_t n;
    std::size_t instance;
    double noise;
    std::size_t restart;
  };
  std::vector<Item> items;
  for (const auto& s : plan.solvers)
    for (std::size_t si = 0; si < plan.sizes.size(); ++si)
      for (std::size_t i = 0; i < plan.instances_per_size; ++i)
        for (double eta : noise_levels_for(plan, s))
          for (std::size_t r = 0; r < plan.restarts_per_instance; ++r) {
            if (done.count({s.name, plan.sizes[si], eta, i, r})) {
              ++result.skipped;
              continue;
            }
            items.push_back({&s, si, plan.sizes[si], i, eta, r});
          }

  // Models are shared read-only by all work items of the same (n, instance).
  std::vector<std::vector<SparseIsing>> models(plan.sizes.size());
  std::vector<std::vector<std::string>> labels(plan.sizes.size());
  for (std::size_t si = 0; si < plan.sizes.size(); ++si) {
    models[si].resize(plan.instances_per_size);
    labels[si].resize(plan.instances_per_size);
  }
  const int threads = plan.threads > 0 ? plan.threads : omp_get_max_threads();
  const auto instance_jobs = static_cast<std::ptrdiff_t>(plan.sizes.size() * plan.instances_per_size);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t job = 0; job < instance_jobs; ++job) {
    const auto si = static_cast<std::size_t>(job) / plan.instances_per_size;
    const auto i = static_cast<std::size_t>(job) % plan.instances_per_size;
    auto inst = generate_3r3x(plan.sizes[si], instance_seed(plan.master_seed, plan.sizes[si], i));
    labels[si][i] = inst.label;
    models[si][i] = SparseIsing(xorsat_to_ising(inst).first);
  }

  std::ofstream out(plan.output, resume ? std::ios::app : std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write results file " + plan.output);
  if (!resume || std::filesystem::file_size(plan.output) == 0) {
    nlohmann::json header;
    header["header"]["plan"] = plan.resolved.entries();
    header["header"]["created"] = iso8601_now();
    out << header.dump() << '\n';
    out.flush();
  }

  std::exception_ptr failure;
  const auto total = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const Item& it = items[static_cast<std::size_t>(k)];
    try {
      const SparseIsing& model = models[it.size_index][it.instance];
      SolverConfig cfg = it.solver->config;
      if (auto* lp = std::get_if<LaserParams>(&cfg)) lp->eta = it.noise;
      cfg = resolve_auto(cfg, model, plan.kappa_table);
      SolveOptions opts;
      opts.policy = KernelPolicy::Serial;
      RunRecord rec = solve(model, cfg, trajectory_seed(plan.master_seed, it.n, it.instance, it.restart),
                            max_steps_for(plan, *it.solver, it.noise), 0.0, opts);
      rec.solver_id = it.solver->name;
      rec.instance_label = labels[it.size_index][it.instance];
      rec.n = it.n;
      rec.noise = it.noise;
      rec.instance_index = it.instance;
      rec.restart = it.restart;
#pragma omp critical(results_writer)
      {
        append_record(out, rec);
        out.flush();
        ++result.executed;
      }
    } catch (...) {
#pragma omp critical(results_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  out.close();
  if (failure) std::rethrow_exception(failure);

  // Keep only records that belong to this plan (a resumed file may hold more).
  std::set<WorkKey> wanted;
  for (const auto& s : plan.solvers)
    for (auto n : plan.sizes)
      for (std::size_t i = 0; i < plan.instances_per_size; ++i)
        for (double eta : noise_levels_for(plan, s))
          for (std::size_t r = 0; r < plan.restarts_per_instance; ++r)
            wanted.insert({s.name, n, eta, i, r});
  std::set<WorkKey> seen;
  for (RunRecord& r : read_records(plan.output)) {
    const WorkKey key = key_of(r);
    if (wanted.count(key) && seen.insert(key).second) result.records.push_back(std::move(r));
  }
  std::sort(result.records.begin(), result.records.end(), record_less);
  result.summary = summarize(result.records, plan);
  return result;
}

std::vector<std::vector<RunRecord>> group_by_instance(std::span<const RunRecord> records) {
  std::map<std::size_t, std::vector<RunRecord>> by;
  for (const RunRecord& r : records) by[r.instance_index].push_back(r);
  std::vector<std::vector<RunRecord>> out;
  out.reserve(by.size());
  for (auto& [_, runs] : by) out.push_back(std::move(runs));
  return out;
}

TtsCurve curve_for(std::span<const RunRecord> group, std::span<const double> grid) {
  auto by_instance = group_by_instance(group);
  return optimal_tts(by_instance, grid);
}

std::vector<SummaryRow> summarize(std::span<const RunRecord> records, const ExperimentPlan& plan) {
  std::vector<SummaryRow> rows;
  for (const auto& s : plan.solvers)
    for (auto n : plan.sizes)
      for (double eta : noise_levels_for(plan, s)) {
        std::vector<RunRecord> group;
        for (const RunRecord& r : records)
          if (r.solver_id == s.name && r.n == n && r.noise == eta) group.push_back(r);
        if (group.empty()) continue;
        const std::uint64_t cap = max_steps_for(plan, s, eta);
        const std::vector<double> grid = plan.cutoff_grid.empty()
                                             ? default_cutoff_grid(cap, plan.cutoff_points_per_decade)
                                             : plan.cutoff_grid;
        auto by_instance = group_by_instance(group);
        TtsCurve curve = optimal_tts(by_instance, grid);

        double wall = 0.0;
        double steps = 0.0;
        std::size_t max_restarts = 0;
        for (const RunRecord& r : group) {
          wall += r.wall_time;
          steps += static_cast<double>(r.steps_executed);
        }
        for (const auto& runs : by_instance) max_restarts = std::max(max_restarts, runs.size());
        const double per_step = steps > 0.0 ? wall / steps : 0.0;

        SummaryRow row;
        row.solver = s.name;
        row.n = n;
        row.noise = eta;
        row.tf_star = curve.optimal_tf;
        row.tts_steps = curve.optimal_tts;
        row.tts_seconds = std::isinf(curve.optimal_tts) ? curve.optimal_tts : curve.optimal_tts * per_step;
        double mean_p = 0.0;
        for (const auto& p : curve.success) mean_p += p[curve.optimal_index];
        row.mean_p = mean_p / static_cast<double>(curve.success.size());
        row.instances = by_instance.size();
        row.restarts = max_restarts;
        rows.push_back(row);
      }
  return rows;
}

void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows,
                       const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write summary " + path);
  if (!header_comment.empty()) {
    std::istringstream lines(header_comment);
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  }
  out << kSummaryColumns << '\n';
  for (const SummaryRow& r : rows)
    out << r.solver << ',' << r.n << ',' << format_real(r.noise) << ',' << format_real(r.tf_star)
        << ',' << format_real(r.tts_steps) << ',' << format_real(r.tts_seconds) << ','
        << format_real(r.mean_p) << ',' << r.instances << ',' << r.restarts << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open summary " + path);
  std::vector<SummaryRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSummaryColumns)
        throw Error(ErrorKind::SyntaxError, path + " line " + std::to_string(line_no) +
                                                ": expected header '" + kSummaryColumns + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9)
      throw Error(ErrorKind::SyntaxError,
                  path + " line " + std::to_string(line_no) + ": expected 9 columns");
    try {
      SummaryRow r;
      r.solver = f[0];
      r.n = parse_u64(f[1], "n");
      r.noise = parse_double(f[2], "noise");
      r.tf_star = parse_double(f[3], "tf_star");
      r.tts_steps = parse_double(f[4], "tts_steps");
      r.tts_seconds = parse_double(f[5], "tts_seconds");
      r.mean_p = parse_double(f[6], "mean_p");
      r.instances = parse_u64(f[7], "instances");
      r.restarts = parse_u64(f[8], "restarts");
      rows.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorKind::SyntaxError, path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace xorbench
