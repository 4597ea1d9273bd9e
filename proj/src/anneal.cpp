#include <algorithm>
#include <cmath>
#include <numeric>

#include "spin_system.hpp"
#include "xorbench/solvers.hpp"

namespace xorbench {

using detail::RunTracker;
using detail::SpinSystem;

bool metropolis_accept(double delta_e, double temperature, Rng& rng) {
  if (delta_e <= 0.0) return true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < std::exp(-delta_e / temperature);
}

double swap_probability(double beta_i, double energy_i, double beta_j, double energy_j) {
  const double x = (beta_i - beta_j) * (energy_i - energy_j);
  return x >= 0.0 ? 1.0 : std::exp(x);
}

namespace {

// One Metropolis sweep in index order. Returns true as soon as the target is
// reached; the tracker records the sweep number as the solution step.
bool sweep(SpinSystem& sys, double temperature, Rng& rng, RunTracker& tracker,
           std::uint64_t step) {
  const std::size_t n = sys.state.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (metropolis_accept(sys.delta(k), temperature, rng)) {
      sys.flip(k);
      if (tracker.observe(sys.energy, step)) return true;
    }
  }
  return false;
}

SpinState initial_state(const SparseIsing& model, const SolveOptions& options, Rng& rng) {
  if (options.initial_state) return *options.initial_state;
  return detail::random_spins(model.size(), rng);
}

}  // namespace

RunRecord simulated_annealing(const SparseIsing& model, const AnnealParams& in_params,
                              std::uint64_t seed, std::uint64_t max_steps, double target_energy,
                              const SolveOptions& options) {
  AnnealParams params = in_params;
  params.t_hi = resolved_t_hi(params.t_hi, params.t_lo, model);
  validate(SolverConfig{params});
  RunRecord rec;
  rec.solver_id = "sa";
  rec.step_unit = "sweep";
  rec.seed = seed;
  RunTracker tracker(rec, target_energy, options);

  Rng rng = make_rng(seed, {0});
  SpinSystem sys(model, initial_state(model, options, rng), options.policy);
  bool done = max_steps > 0 && tracker.observe(sys.energy, 0);
  if (max_steps == 0) rec.best_energy = sys.energy;

  const std::uint64_t stages = (max_steps + params.sweeps_per_temp - 1) / params.sweeps_per_temp;
  const double ratio = params.t_lo / params.t_hi;
  for (std::uint64_t step = 1; step <= max_steps && !done; ++step) {
    const std::uint64_t stage = (step - 1) / params.sweeps_per_temp;
    const double t = stages > 1 ? params.t_hi * std::pow(ratio, static_cast<double>(stage) /
                                                                    static_cast<double>(stages - 1))
                                : params.t_hi;
    done = sweep(sys, t, rng, tracker, step);
    tracker.end_step(step);
    if (options.verify_bookkeeping && step % detail::kVerifyEvery == 0) sys.verify();
  }
  if (options.verify_bookkeeping) sys.verify();
  tracker.finish(sys.state);
  return rec;
}

RunRecord parallel_tempering(const SparseIsing& model, const TemperingParams& in_params,
                             std::uint64_t seed, std::uint64_t max_steps, double target_energy,
                             const SolveOptions& options) {
  TemperingParams params = in_params;
  params.t_hi = resolved_t_hi(params.t_hi, params.t_lo, model);
  validate(SolverConfig{params});
  RunRecord rec;
  rec.solver_id = "pt";
  rec.step_unit = "pt_sweep";
  rec.seed = seed;
  RunTracker tracker(rec, target_energy, options);

  const std::size_t k = params.num_replicas ? params.num_replicas : default_replicas(model.size());
  // Replica r runs at temperature T_lo (T_hi/T_lo)^(r/(K-1)); replica 0 shares
  // its stream layout with simulated annealing so K=1 reproduces it exactly.
  std::vector<double> temps(k);
  for (std::size_t r = 0; r < k; ++r)
    temps[r] = k > 1 ? params.t_lo * std::pow(params.t_hi / params.t_lo,
                                              static_cast<double>(r) / static_cast<double>(k - 1))
                     : params.t_lo;

  std::vector<Rng> rngs;
  std::vector<SpinSystem> replicas;
  rngs.reserve(k);
  replicas.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    rngs.push_back(make_rng(seed, {r}));
    SpinState s = (r == 0 && options.initial_state) ? *options.initial_state
                                                     : detail::random_spins(model.size(), rngs[r]);
    replicas.emplace_back(model, std::move(s), options.policy);
  }
  Rng swap_rng = make_rng(seed, {0xfffffffful});
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // slot[r] = index of the replica currently held at temperature r
  std::vector<std::size_t> slot(k);
  std::iota(slot.begin(), slot.end(), 0);

  bool done = false;
  if (max_steps > 0) {
    for (std::size_t r = 0; r < k && !done; ++r) done = tracker.observe(replicas[r].energy, 0);
  } else {
    double best = replicas[0].energy;
    for (const auto& rep : replicas) best = std::min(best, rep.energy);
    rec.best_energy = best;
  }

  std::uint64_t swap_round = 0;
  for (std::uint64_t step = 1; step <= max_steps && !done; ++step) {
    for (std::size_t t = 0; t < k && !done; ++t) {
      const std::size_t r = slot[t];
      done = sweep(replicas[r], temps[t], rngs[r], tracker, step);
    }
    if (!done && k > 1 && step % params.sweeps_between_swaps == 0) {
      for (std::size_t t = swap_round % 2; t + 1 < k; t += 2) {
        const double p = swap_probability(1.0 / temps[t], replicas[slot[t]].energy,
                                          1.0 / temps[t + 1], replicas[slot[t + 1]].energy);
        if (p >= 1.0 || u(swap_rng) < p) std::swap(slot[t], slot[t + 1]);
      }
      ++swap_round;
    }
    tracker.end_step(step);
    if (options.verify_bookkeeping && step % detail::kVerifyEvery == 0)
      for (const auto& rep : replicas) rep.verify();
  }
  if (options.verify_bookkeeping)
    for (const auto& rep : replicas) rep.verify();
  // Report the coldest replica's configuration (the successful one if any).
  std::size_t best_r = slot[0];
  for (std::size_t r = 0; r < k; ++r)
    if (replicas[r].energy < replicas[best_r].energy) best_r = r;
  tracker.finish(replicas[best_r].state);
  return rec;
}

}  // namespace xorbench
