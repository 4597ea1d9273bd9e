// xorbench: generate -> convert -> solve -> bench -> fit -> verify -> report
//
// Exit codes: 0 success, 1 domain failure, 2 usage error.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "xorbench/error.hpp"
#include "xorbench/experiment.hpp"
#include "xorbench/fit.hpp"
#include "xorbench/ising.hpp"
#include "xorbench/kvconfig.hpp"
#include "xorbench/plot_data.hpp"
#include "xorbench/records.hpp"
#include "xorbench/solvers.hpp"
#include "xorbench/xorsat.hpp"

using namespace xorbench;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string config;
  std::string output;
  std::string defaults = std::string(XORBENCH_CONFIG_DIR) + "/defaults.conf";
  bool quiet = false;
};

// Defaults file < --config file < explicit flags.
class Resolver {
 public:
  Resolver(const Globals& g, CLI::App& root) : globals_(g), root_(root) {}

  void load() {
    if (!globals_.defaults.empty() && fs::exists(globals_.defaults))
      kv_ = KeyValueConfig::load(globals_.defaults);
    if (!globals_.config.empty()) kv_.merge(KeyValueConfig::load(globals_.config));
    set_if(root_.get_option("--seed"), "seed", std::to_string(globals_.seed));
    set_if(root_.get_option("--threads"), "threads", std::to_string(globals_.threads));
    set_if(root_.get_option("--output"), "output", globals_.output);
    if (kv_.has("threads")) {
      const auto t = kv_.get_u64("threads", 0);
      if (t > 0) omp_set_num_threads(static_cast<int>(t));
    }
  }

  void set_if(const CLI::Option* opt, const std::string& key, const std::string& value) {
    if (opt && opt->count() > 0) kv_.set(key, value);
  }

  template <class T>
  void flag(const CLI::Option* opt, const std::string& key, const T& value) {
    if (!opt || opt->count() == 0) return;
    std::ostringstream os;
    os.precision(17);
    os << value;
    kv_.set(key, os.str());
  }

  KeyValueConfig& kv() { return kv_; }
  const std::string& config_path() const { return globals_.config; }

  void echo(const std::string& command) const {
    if (globals_.quiet) return;
    std::cerr << "# xorbench " << command << " resolved configuration\n";
    std::istringstream lines(kv_.dump());
    for (std::string line; std::getline(lines, line);) std::cerr << "#   " << line << '\n';
  }

  std::string header(const std::string& command) const {
    std::string out = "xorbench " + command + "\n";
    out += kv_.dump();
    return out;
  }

 private:
  const Globals& globals_;
  CLI::App& root_;
  KeyValueConfig kv_;
};

std::string commented(const std::string& text) {
  std::string out;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  return out;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::PlanInvalid:
    case ErrorKind::LengthMismatch:
      return 2;
    default:
      return 1;
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ------------------------------------------------------------- generate ----

int cmd_generate(Resolver& res, const std::string& command) {
  auto& kv = res.kv();
  const auto n = kv.get_u64("n", 0);
  const auto count = kv.get_u64("count", 1);
  const auto master = kv.get_u64("seed", 1);
  const std::string dir = kv.get_string("output", ".");
  if (n == 0) throw UsageError("generate needs -n");
  res.echo(command);
  fs::create_directories(dir);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto seed = instance_seed(master, n, i);
    const XorSatInstance inst = generate_3r3x(n, seed);
    const fs::path p = fs::path(dir) / ("3r3x_n" + std::to_string(n) + "_i" + std::to_string(i) +
                                        "_s" + std::to_string(seed) + ".xor");
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << commented(res.header(command)) << serialize(inst);
    std::cout << p.string() << '\n';
  }
  return 0;
}

// -------------------------------------------------------------- convert ----

int cmd_convert(Resolver& res, const std::string& command, const std::string& instance_path) {
  res.echo(command);
  const XorSatInstance inst = read_instance(instance_path);
  const auto [model, map] = xorsat_to_ising(inst);
  const std::string text = commented(res.header(command) + "instance = " + instance_path) +
                           export_ising(model);
  const std::string out_path = res.kv().get_string("output", "");
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + out_path);
    out << text;
    std::cout << out_path << '\n';
  }
  return 0;
}

// --------------------------------------------------------------- verify ----

Assignment parse_assignment(const std::string& text, std::size_t expected) {
  std::string bits = text;
  if (fs::exists(text)) {
    std::ifstream in(text);
    bits.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  Assignment a;
  for (char c : bits) {
    if (c == '0' || c == '1') a.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (!std::isspace(static_cast<unsigned char>(c)))
      throw UsageError("assignment must consist of 0/1 characters");
  }
  if (a.size() != expected)
    throw UsageError("assignment has " + std::to_string(a.size()) + " bits, instance has " +
                     std::to_string(expected) + " variables");
  return a;
}

int cmd_verify(Resolver& res, const std::string& command, const std::string& instance_path,
               const std::string& assignment) {
  res.echo(command);
  const XorSatInstance inst = read_instance(instance_path);
  std::optional<Assignment> given;
  if (!assignment.empty() && assignment != "auto") given = parse_assignment(assignment, inst.num_vars);

  SolutionSpace space;
  try {
    space = gf2_solve(inst);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Inconsistent) throw;
    std::cout << "inconsistent\n";
    if (given) std::cout << "unsat(assignment)=" << evaluate(inst, *given) << '\n';
    return 1;
  }
  std::cout << "satisfiable, rank=" << space.rank << ", log2_solutions=" << count_solutions(space);
  if (inst.planted) std::cout << ", unsat(planted)=" << evaluate(inst, *inst.planted);
  std::cout << '\n';
  if (given) {
    const auto unsat = evaluate(inst, *given);
    std::cout << "unsat(assignment)=" << unsat << '\n';
    return unsat == 0 ? 0 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(Resolver& res, const std::string& command, const std::string& instance_path) {
  auto& kv = res.kv();
  const std::string name = kv.get_string("solver", "sa");
  try {
    default_config(name);
  } catch (const Error&) {
    throw UsageError("unknown solver '" + name + "'; valid names: " + std::string(kSolverNames));
  }
  if (name == "laser" && kv.has("noise")) kv.set("laser.eta", *kv.get("noise"));
  const double noise = name == "laser" ? kv.get_double("laser.eta", 0.0) : 0.0;
  const std::uint64_t max_steps =
      kv.get_u64("max_steps", noise > 0.0 ? kv.get_u64("max_steps_noisy", 500000)
                                          : kv.get_u64("max_steps_noise_free", 100000));
  const std::uint64_t seed = kv.get_u64("seed", 1);
  res.echo(command);

  const XorSatInstance inst = read_instance(instance_path);
  const auto [ising, map] = xorsat_to_ising(inst);
  const SparseIsing model(ising);
  const SolverConfig config = resolve_auto(solver_config_from(kv, name), model, kappa_table_from(kv));
  SolveTrace trace;
  SolveOptions opts;
  opts.trace = &trace;
  RunRecord rec = solve(model, config, seed, max_steps, 0.0, opts);
  rec.instance_label = inst.label;
  rec.solver_id = name;
  rec.n = model.size();
  rec.noise = noise;

  if (rec.success && evaluate(inst, decode(trace.final_state, map)) != 0)
    throw Error(ErrorKind::InvariantViolation, "reported ground state does not satisfy the instance");

  const std::string out_path = kv.get_string("output", "runs.jsonl");
  {
    const bool fresh = !fs::exists(out_path) || fs::file_size(out_path) == 0;
    std::ofstream out(out_path, std::ios::app);
    if (!out) throw Error(ErrorKind::Io, "cannot append to " + out_path);
    if (fresh) {
      nlohmann::json header;
      header["header"]["command"] = command;
      header["header"]["config"] = kv.entries();
      out << header.dump() << '\n';
    }
    append_record(out, rec);
  }
  std::cout << to_json(rec, iso8601_now()).dump() << '\n';
  return rec.success ? 0 : 1;
}

// ---------------------------------------------------------------- bench ----

int cmd_bench(Resolver& res, const std::string& command, const std::string& plan_path, bool resume) {
  // defaults < plan < --config < explicit flags
  KeyValueConfig& kv = res.kv();
  KeyValueConfig merged = kv;
  merged.merge(KeyValueConfig::load(plan_path));
  if (!res.config_path().empty()) merged.merge(KeyValueConfig::load(res.config_path()));
  for (const auto& [key, target] : std::map<std::string, std::string>{
           {"cli.seed", "master_seed"}, {"cli.output", "output"}, {"cli.summary", "summary"},
           {"cli.threads", "threads"}})
    if (kv.has(key)) merged.set(target, *kv.get(key));
  ExperimentPlan plan = plan_from_config(merged, KeyValueConfig{});
  if (plan.threads > 0) omp_set_num_threads(plan.threads);
  kv = plan.resolved;
  res.echo(command);

  const ExperimentResult result = run_experiment(plan, resume);
  write_summary_csv(plan.summary, result.summary, res.header(command));
  std::cerr << "executed " << result.executed << " runs, skipped " << result.skipped
            << " already present\n";
  std::cout << kSummaryColumns << '\n';
  for (const SummaryRow& r : result.summary)
    std::cout << r.solver << ',' << r.n << ',' << format_real(r.noise) << ','
              << format_real(r.tf_star) << ',' << format_real(r.tts_steps) << ','
              << format_real(r.tts_seconds) << ',' << format_real(r.mean_p) << ',' << r.instances
              << ',' << r.restarts << '\n';
  return 0;
}

// ------------------------------------------------------------------ fit ----

inline constexpr const char* kFitColumns =
    "solver,noise,model,exponent,intercept,stderr,r2,n_points,excluded,ci_low,ci_high";

struct FitRow {
  std::string solver;
  double noise = 0.0;
  ScalingFit fit;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Accepts a summary CSV or a bare "n,tts" table.
std::vector<Series> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  while (std::getline(in, line) && (line.empty() || line[0] == '#')) {}
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == kSummaryColumns) return series_from_summary(read_summary_csv(path));
  if (line.rfind("n,tts", 0) != 0)
    throw Error(ErrorKind::SyntaxError, path + ": expected a summary CSV or an 'n,tts' table");
  Series s;
  s.solver = "data";
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    const double n = parse_double(a, "n");
    const double t = parse_double(b, "tts");
    s.points.push_back({n, t, t, t});
  }
  return {s};
}

void write_fits(const std::string& path, const std::vector<FitRow>& rows, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << commented(header) << "# method: OLS in log10 space; CI: 95% percentile bootstrap\n"
      << kFitColumns << '\n';
  for (const FitRow& r : rows)
    out << r.solver << ',' << format_real(r.noise) << ',' << to_string(r.fit.model_kind) << ','
        << format_real(r.fit.exponent) << ',' << format_real(r.fit.intercept) << ','
        << format_real(r.fit.exponent_stderr) << ',' << format_real(r.fit.r_squared) << ','
        << r.fit.n_points << ',' << r.fit.excluded << ',' << format_real(r.ci_low) << ','
        << format_real(r.ci_high) << '\n';
}

std::vector<SeriesFit> read_fits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NoData, "no fits file at " + path + " (run 'xorbench fit' first)");
  std::map<std::pair<std::string, double>, SeriesFit> by;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kFitColumns) throw Error(ErrorKind::SyntaxError, path + ": bad fits header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) throw Error(ErrorKind::SyntaxError, path + ": expected 11 columns");
    ScalingFit fit;
    fit.model_kind = f[2] == "power" ? ModelKind::Power : ModelKind::Exponential;
    fit.exponent = parse_double(f[3], "exponent");
    fit.intercept = parse_double(f[4], "intercept");
    fit.exponent_stderr = parse_double(f[5], "stderr");
    fit.r_squared = parse_double(f[6], "r2");
    fit.n_points = parse_u64(f[7], "n_points");
    fit.excluded = parse_u64(f[8], "excluded");
    const double noise = parse_double(f[1], "noise");
    SeriesFit& sf = by[{f[0], noise}];
    sf.solver = f[0];
    sf.noise = noise;
    (fit.model_kind == ModelKind::Power ? sf.power : sf.exponential) = fit;
  }
  std::vector<SeriesFit> out;
  for (auto& [_, sf] : by) out.push_back(std::move(sf));
  if (out.empty()) throw Error(ErrorKind::NoData, path + " contains no fits");
  return out;
}

int cmd_fit(Resolver& res, const std::string& command, const std::string& input) {
  auto& kv = res.kv();
  const auto resamples = kv.get_u64("resamples", 1000);
  const auto seed = kv.get_u64("seed", 1);
  const std::string out_path = kv.get_string("output", "fits.csv");
  res.echo(command);

  std::vector<FitRow> rows;
  for (const Series& s : read_points(input)) {
    std::vector<Point> pts;
    for (const auto& p : s.points) pts.push_back({p.n, p.tts});
    std::cout << s.solver << " eta=" << fmt(s.noise) << ": ";
    ModelComparison cmp;
    try {
      cmp = compare_models(pts);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPoints) throw;
      std::cout << "skipped (" << e.what() << ")\n";
      continue;
    }
    for (const ScalingFit* f : {&cmp.power, &cmp.exponential}) {
      const auto [lo, hi] = bootstrap_ci(pts, resamples, seed, f->model_kind);
      rows.push_back({s.solver, s.noise, *f, lo, hi});
    }
    const auto& pw = rows[rows.size() - 2];
    const auto& ex = rows.back();
    std::cout << "k=" << fmt(cmp.power.exponent) << " +/- " << fmt(cmp.power.exponent_stderr)
              << " [" << fmt(pw.ci_low) << ", " << fmt(pw.ci_high) << "] r2=" << fmt(cmp.power.r_squared)
              << "; alpha=" << fmt(cmp.exponential.exponent) << " +/- "
              << fmt(cmp.exponential.exponent_stderr) << " [" << fmt(ex.ci_low) << ", "
              << fmt(ex.ci_high) << "] r2=" << fmt(cmp.exponential.r_squared) << "; preferred="
              << (cmp.indeterminate ? "indeterminate" : std::string(to_string(cmp.preferred)))
              << " (delta r2=" << fmt(cmp.delta_r_squared) << ")";
    if (cmp.power.excluded) std::cout << "; excluded " << cmp.power.excluded << " infinite points";
    std::cout << '\n';
  }
  if (rows.empty()) throw Error(ErrorKind::NoData, "no series with at least 3 finite points");
  write_fits(out_path, rows, res.header(command));
  return 0;
}

// --------------------------------------------------------------- report ----

int cmd_report(Resolver& res, const std::string& command, const std::string& summary_path) {
  auto& kv = res.kv();
  const std::string fits_path = kv.get_string("fits", "fits.csv");
  const std::string out_dir = kv.get_string("output", "plots");
  const std::string results = kv.get_string("results", "");
  res.echo(command);

  std::vector<Series> series = series_from_summary(read_summary_csv(summary_path));
  if (series.empty()) throw Error(ErrorKind::NoData, summary_path + " has no rows");
  const std::vector<SeriesFit> fits = read_fits(fits_path);

  // Per-point confidence bounds from an instance-level bootstrap when the raw
  // records are available.
  if (!results.empty()) {
    const auto records = read_records(results);
    const auto resamples = kv.get_u64("resamples", 1000);
    const auto seed = kv.get_u64("seed", 1);
    const auto cap_noise_free = kv.get_u64("max_steps_noise_free", 100000);
    const auto cap_noisy = kv.get_u64("max_steps_noisy", 500000);
    for (Series& s : series)
      for (SeriesPoint& p : s.points) {
        std::vector<RunRecord> group;
        std::uint64_t cap = 0;
        for (const RunRecord& r : records)
          if (r.solver_id == s.solver && r.noise == s.noise && static_cast<double>(r.n) == p.n) {
            group.push_back(r);
            cap = std::max(cap, r.steps_executed);
          }
        if (group.empty()) continue;
        cap = std::max<std::uint64_t>(cap, s.noise > 0.0 ? cap_noisy : cap_noise_free);
        const auto grid = default_cutoff_grid(cap);
        const auto by_instance = group_by_instance(group);
        std::tie(p.ci_low, p.ci_high) = tts_bootstrap_ci(by_instance, grid, resamples, seed);
      }
  }
  const PlotFiles files = emit_plot_data(series, fits, out_dir);
  for (const auto& f : files.series) std::cout << f << '\n';
  for (const auto& f : files.fits) std::cout << f << '\n';
  std::cout << files.reference << '\n' << files.script << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planted 3-regular 3-XORSAT benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");
  app.add_option("--config", g.config, "key = value file; overrides defaults, overridden by flags")
      ->check(CLI::ExistingFile);
  app.add_option("--output", g.output, "Output file or directory");
  app.add_option("--defaults", g.defaults, "Solver defaults file")->capture_default_str();
  app.add_flag("-q,--quiet", g.quiet, "Do not echo the resolved configuration");

  Resolver res(g, app);

  auto* gen = app.add_subcommand("generate", "Write planted 3R3X instance files");
  std::uint64_t n = 0, count = 1;
  auto* o_n = gen->add_option("-n", n, "Number of spins (even; variables = n/2)");
  auto* o_count = gen->add_option("--count", count, "Number of instances");

  auto* conv = app.add_subcommand("convert", "Quadratize an instance into an Ising text file");
  std::string conv_in;
  conv->add_option("instance", conv_in, "Instance file")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Solve an instance exactly over GF(2)");
  std::string ver_in, ver_assign = "auto";
  ver->add_option("instance", ver_in, "Instance file")->required()->check(CLI::ExistingFile);
  ver->add_option("--assignment", ver_assign, "0/1 string or file to check ('auto': planted only)");

  auto* sol = app.add_subcommand("solve", "Run one solver trajectory on an instance");
  std::string sol_in, solver;
  double noise = 0.0;
  std::uint64_t max_steps = 0;
  sol->add_option("instance", sol_in, "Instance file")->required()->check(CLI::ExistingFile);
  auto* o_solver = sol->add_option("--solver", solver, "laser, sa, tabu or pt");
  auto* o_noise = sol->add_option("--noise", noise, "Laser noise level (fraction of a_sat)");
  auto* o_steps = sol->add_option("--max-steps", max_steps, "Step cap (default 1e5, noisy 5e5)");

  auto* ben = app.add_subcommand("bench", "Run an experiment plan");
  std::string plan_path;
  bool resume = false;
  ben->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  ben->add_flag("--resume", resume, "Skip runs already present in the results file");
  std::string bench_summary;
  auto* o_summary = ben->add_option("--summary", bench_summary, "Summary CSV path");

  auto* fitc = app.add_subcommand("fit", "Fit power-law and exponential scaling");
  std::string fit_in;
  std::uint64_t resamples = 1000;
  fitc->add_option("input", fit_in, "Summary CSV or n,tts table")->required()->check(CLI::ExistingFile);
  auto* o_res = fitc->add_option("--resamples", resamples, "Bootstrap resamples");

  auto* rep = app.add_subcommand("report", "Emit plot data and a gnuplot script");
  std::string rep_in, fits_path, results_path;
  std::uint64_t rep_resamples = 1000;
  rep->add_option("summary", rep_in, "Summary CSV")->required()->check(CLI::ExistingFile);
  auto* o_fits = rep->add_option("--fits", fits_path, "Fits CSV from 'xorbench fit'");
  auto* o_results = rep->add_option("--results", results_path, "Results JSONL for per-point CIs");
  auto* o_rep_res = rep->add_option("--resamples", rep_resamples, "Bootstrap resamples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    res.load();
    if (gen->parsed()) {
      res.flag(o_n, "n", n);
      res.flag(o_count, "count", count);
      return cmd_generate(res, "generate");
    }
    if (conv->parsed()) return cmd_convert(res, "convert", conv_in);
    if (ver->parsed()) return cmd_verify(res, "verify", ver_in, ver_assign);
    if (sol->parsed()) {
      res.flag(o_solver, "solver", solver);
      res.flag(o_noise, "noise", noise);
      res.flag(o_steps, "max_steps", max_steps);
      return cmd_solve(res, "solve", sol_in);
    }
    if (ben->parsed()) {
      // Explicit flags are remembered separately so the plan cannot shadow them.
      res.flag(app.get_option("--seed"), "cli.seed", g.seed);
      res.flag(app.get_option("--output"), "cli.output", g.output);
      res.flag(app.get_option("--threads"), "cli.threads", g.threads);
      res.flag(o_summary, "cli.summary", bench_summary);
      return cmd_bench(res, "bench", plan_path, resume);
    }
    if (fitc->parsed()) {
      res.flag(o_res, "resamples", resamples);
      return cmd_fit(res, "fit", fit_in);
    }
    if (rep->parsed()) {
      res.flag(o_fits, "fits", fits_path);
      res.flag(o_results, "results", results_path);
      res.flag(o_rep_res, "resamples", rep_resamples);
      return cmd_report(res, "report", rep_in);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
