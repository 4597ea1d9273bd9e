#include <algorithm>
#include <cmath>
#include <numbers>

#include "spin_system.hpp"
#include "xorbench/solvers.hpp"
#include "xorbench/xorsat.hpp"

namespace xorbench {

LaserField make_laser_field(std::size_t n, const LaserParams& params, Rng& rng) {
  LaserField f;
  f.a_sat = params.a_sat;
  f.g0 = params.g0;
  f.kappa = params.kappa;
  f.eta = params.eta;
  f.field.resize(n);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double amp = params.init_scale * params.a_sat;
  for (auto& e : f.field) e = std::polar(amp, phase(rng));
  return f;
}

void laser_step(LaserField& state, const SparseIsing& model, Rng& rng, LaserWorkspace& work,
                KernelPolicy policy) {
  const std::size_t n = model.size();
  if (state.field.size() != n)
    throw Error(ErrorKind::LengthMismatch, "laser field has " + std::to_string(state.field.size()) +
                                               " modes, model has " + std::to_string(n));
  const bool parallel = use_parallel(policy, n);
  work.scratch.resize(n);
  if (parallel)
    kernels::laser_feedback_omp(model, state.field, state.kappa, state.a_sat, work.scratch);
  else
    kernels::laser_feedback_serial(model, state.field, state.kappa, state.a_sat, work.scratch);
  state.field.swap(work.scratch);

  std::span<const std::complex<double>> noise;
  if (state.eta > 0.0) {
    // Drawn serially so the stream does not depend on the thread count.
    work.noise.resize(n);
    std::normal_distribution<double> gauss(0.0, state.eta * state.a_sat);
    for (auto& xi : work.noise) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      xi = {re, im};
    }
    noise = work.noise;
  }
  const double peak = parallel ? kernels::laser_gain_omp(state.field, noise, state.g0, state.a_sat)
                               : kernels::laser_gain_serial(state.field, noise, state.g0, state.a_sat);
  if (!std::isfinite(peak))
    throw Error(ErrorKind::NonFiniteField,
                "laser field diverged at step " + std::to_string(state.step_count + 1) +
                    " (check g0/kappa)");
  ++state.step_count;
}

SpinState readout(const LaserField& state) {
  SpinState s;
  s.spins.resize(state.field.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = state.field[i].real() < 0.0 ? -1 : 1;
  return s;
}

RunRecord laser_solve(const SparseIsing& model, const LaserParams& params, std::uint64_t seed,
                      std::uint64_t max_steps, double target_energy, const SolveOptions& options) {
  validate(SolverConfig{params});
  if (params.kappa <= 0.0)
    throw Error(ErrorKind::ConfigError, "laser kappa must be resolved to a positive value");
  RunRecord rec;
  rec.solver_id = "laser";
  rec.step_unit = "round_trip";
  rec.seed = seed;
  detail::RunTracker tracker(rec, target_energy, options);

  Rng rng = make_rng(seed, {0});
  LaserField state = make_laser_field(model.size(), params, rng);
  LaserWorkspace work;
  detail::SpinSystem sys(model, readout(state), options.policy);
  bool done = max_steps > 0 && tracker.observe(sys.energy, 0);
  if (max_steps == 0) rec.best_energy = sys.energy;

  const std::size_t n = model.size();
  for (std::uint64_t step = 1; step <= max_steps && !done; ++step) {
    laser_step(state, model, rng, work, options.policy);
    for (std::size_t i = 0; i < n; ++i) {
      const std::int8_t s = state.field[i].real() < 0.0 ? -1 : 1;
      if (s != sys.state[i]) sys.flip(i);
    }
    done = tracker.observe(sys.energy, step);
    tracker.end_step(step);
    if (options.verify_bookkeeping && step % detail::kVerifyEvery == 0) sys.verify();
  }
  if (options.verify_bookkeeping) sys.verify();
  tracker.finish(sys.state);
  return rec;
}

double KappaTable::lookup(std::size_t n) const {
  if (points_.empty()) throw Error(ErrorKind::ConfigError, "kappa table is empty");
  auto hi = points_.lower_bound(n);
  if (hi == points_.end()) return std::prev(hi)->second;
  if (hi->first == n || hi == points_.begin()) return hi->second;
  auto lo = std::prev(hi);
  const double t = (std::log(static_cast<double>(n)) - std::log(static_cast<double>(lo->first))) /
                   (std::log(static_cast<double>(hi->first)) -
                    std::log(static_cast<double>(lo->first)));
  return std::exp(std::log(lo->second) + t * (std::log(hi->second) - std::log(lo->second)));
}

namespace {

struct Score {
  double success = 0.0;
  double median = 0.0;
  double mean_best = 0.0;  // separates kappas when nothing succeeds
  bool better_than(const Score& o) const {
    if (success != o.success) return success > o.success;
    if (median != o.median) return median < o.median;
    return mean_best < o.mean_best;
  }
};

Score score_kappa(double kappa, const std::vector<SparseIsing>& models,
                  const CalibrationOptions& opt) {
  LaserParams p = opt.base;
  p.kappa = kappa;
  const std::size_t runs = models.size() * opt.seeds_per_instance;
  std::vector<double> steps(runs);
  std::vector<int> ok(runs);
  std::vector<double> best(runs);
  const auto total = static_cast<std::ptrdiff_t>(runs);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < total; ++r) {
    const auto u = static_cast<std::size_t>(r);
    const std::size_t inst = u / opt.seeds_per_instance;
    RunRecord rec;
    SolveOptions serial;
    serial.policy = KernelPolicy::Serial;
    try {
      rec = laser_solve(models[inst], p, stream_seed(opt.master_seed, {0xca1, u}), opt.max_steps,
                        0.0, serial);
    } catch (const Error&) {
      rec.success = false;  // a diverging kappa simply scores zero
    }
    ok[u] = rec.success;
    best[u] = rec.success ? 0.0 : (rec.steps_executed ? rec.best_energy : 1e300);
    steps[u] = rec.success ? static_cast<double>(*rec.step_of_solution)
                           : static_cast<double>(opt.max_steps) + 1.0;
  }
  Score s;
  for (int v : ok) s.success += v;
  s.success /= static_cast<double>(runs);
  for (double b : best) s.mean_best += b / static_cast<double>(runs);
  std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(runs / 2), steps.end());
  s.median = steps[runs / 2];
  return s;
}

}  // namespace

CalibrationResult calibrate_kappa(std::size_t n_spins, const CalibrationOptions& opt) {
  if (opt.bracket_points < 3 || opt.kappa_lo <= 0.0 || opt.kappa_hi <= opt.kappa_lo ||
      opt.instances == 0 || opt.seeds_per_instance == 0)
    throw Error(ErrorKind::ConfigError, "calibration needs >= 3 bracket points, "
                                        "0 < kappa_lo < kappa_hi and at least one run");
  std::vector<SparseIsing> models;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    auto inst = generate_3r3x(n_spins, stream_seed(opt.master_seed, {n_spins, i}));
    models.emplace_back(xorsat_to_ising(inst).first);
  }

  CalibrationResult result;
  auto eval = [&](double kappa) {
    Score s = score_kappa(kappa, models, opt);
    result.evaluated.emplace_back(kappa, s.success);
    return s;
  };

  const double log_lo = std::log(opt.kappa_lo);
  const double log_step =
      (std::log(opt.kappa_hi) - log_lo) / static_cast<double>(opt.bracket_points - 1);
  std::vector<Score> coarse;
  std::size_t best = 0;
  for (std::size_t i = 0; i < opt.bracket_points; ++i) {
    coarse.push_back(eval(std::exp(log_lo + log_step * static_cast<double>(i))));
    if (coarse[i].better_than(coarse[best])) best = i;
  }

  double a = log_lo + log_step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = log_lo + log_step * static_cast<double>(std::min(best + 1, opt.bracket_points - 1));
  double best_log = log_lo + log_step * static_cast<double>(best);
  Score best_score = coarse[best];

  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  Score sc = eval(std::exp(c));
  Score sd = eval(std::exp(d));
  for (std::size_t it = 0; it < opt.refine_iterations; ++it) {
    if (sc.better_than(best_score)) best_score = sc, best_log = c;
    if (sd.better_than(best_score)) best_score = sd, best_log = d;
    if (!sd.better_than(sc)) {
      b = d;
      d = c;
      sd = sc;
      c = b - kInvPhi * (b - a);
      sc = eval(std::exp(c));
    } else {
      a = c;
      c = d;
      sc = sd;
      d = a + kInvPhi * (b - a);
      sd = eval(std::exp(d));
    }
  }
  if (sc.better_than(best_score)) best_score = sc, best_log = c;
  if (sd.better_than(best_score)) best_score = sd, best_log = d;

  result.kappa = std::exp(best_log);
  result.success_rate = best_score.success;
  result.median_steps = best_score.median;
  return result;
}

}  // namespace xorbench
