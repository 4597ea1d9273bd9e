#include <limits>

#include "spin_system.hpp"
#include "xorbench/solvers.hpp"

namespace xorbench {

RunRecord tabu_search(const SparseIsing& model, const TabuParams& params, std::uint64_t seed,
                      std::uint64_t max_steps, double target_energy, const SolveOptions& options) {
  validate(SolverConfig{params});
  RunRecord rec;
  rec.solver_id = "tabu";
  rec.step_unit = "move";
  rec.seed = seed;
  detail::RunTracker tracker(rec, target_energy, options);

  Rng rng = make_rng(seed, {0});
  SpinState init = options.initial_state ? *options.initial_state
                                         : detail::random_spins(model.size(), rng);
  detail::SpinSystem sys(model, std::move(init), options.policy);
  const std::size_t n = model.size();
  bool done = max_steps > 0 && tracker.observe(sys.energy, 0);
  if (max_steps == 0) rec.best_energy = sys.energy;
  double best = sys.energy;

  // A spin flipped at move t stays tabu through move t + tenure.
  std::vector<std::uint64_t> tabu_until(n, 0);
  std::vector<std::uint64_t> flipped_at(n, 0);

  for (std::uint64_t step = 1; step <= max_steps && !done && n > 0; ++step) {
    std::size_t choice = n;
    double choice_delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double d = sys.delta(k);
      const bool tabu = step <= tabu_until[k];
      const bool aspirated = params.aspiration && sys.energy + d < best;
      if (tabu && !aspirated) continue;
      if (d < choice_delta) {
        choice_delta = d;
        choice = k;
      }
    }
    if (choice == n) {
      // Everything is tabu: release the spin that has been tabu longest.
      choice = 0;
      for (std::size_t k = 1; k < n; ++k)
        if (flipped_at[k] < flipped_at[choice]) choice = k;
    }
    sys.flip(choice);
    tabu_until[choice] = step + params.tenure;
    flipped_at[choice] = step;
    if (options.trace) options.trace->flips.push_back(static_cast<std::uint32_t>(choice));
    best = std::min(best, sys.energy);
    done = tracker.observe(sys.energy, step);
    tracker.end_step(step);
    if (options.verify_bookkeeping && step % detail::kVerifyEvery == 0) sys.verify();
  }
  if (options.verify_bookkeeping) sys.verify();
  tracker.finish(sys.state);
  return rec;
}

}  // namespace xorbench
