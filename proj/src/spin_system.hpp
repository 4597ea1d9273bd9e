#pragma once

// Shared working state of the single-spin-flip solvers.

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "xorbench/error.hpp"
#include "xorbench/kernels.hpp"
#include "xorbench/solvers.hpp"

namespace xorbench::detail {

inline constexpr std::uint64_t kVerifyEvery = 1000;

// Spins plus cached local fields h_i + sum_j J_ij s_j, so a flip's energy
// change is -2 s_k local_k and costs O(1); applying it costs O(degree).
struct SpinSystem {
  const SparseIsing* model = nullptr;
  SpinState state;
  std::vector<double> local;
  double energy = 0.0;

  SpinSystem(const SparseIsing& m, SpinState s, KernelPolicy policy)
      : model(&m), state(std::move(s)), local(m.size()) {
    if (state.size() != m.size())
      throw Error(ErrorKind::LengthMismatch, "initial state length does not match the model");
    if (use_parallel(policy, m.size())) {
      kernels::local_fields_omp(m, state.spins, local);
      energy = kernels::energy_omp(m, state.spins);
    } else {
      kernels::local_fields_serial(m, state.spins, local);
      energy = kernels::energy_serial(m, state.spins);
    }
  }

  double delta(std::size_t k) const { return -2.0 * state[k] * local[k]; }

  void flip(std::size_t k) {
    energy += delta(k);
    const double change = -2.0 * state[k];
    state[k] = static_cast<std::int8_t>(-state[k]);
    auto nb = model->neighbors(k);
    auto w = model->weights(k);
    for (std::size_t t = 0; t < nb.size(); ++t) local[nb[t]] += w[t] * change;
  }

  void verify() const {
    const double fresh = kernels::energy_serial(*model, state.spins);
    if (fresh != energy)
      throw Error(ErrorKind::InvariantViolation,
                  "incremental energy " + std::to_string(energy) + " != recomputed " +
                      std::to_string(fresh));
  }
};

inline SpinState random_spins(std::size_t n, Rng& rng) {
  SpinState s;
  s.spins.resize(n);
  std::uniform_int_distribution<int> bit(0, 1);
  for (auto& x : s.spins) x = bit(rng) ? 1 : -1;
  return s;
}

// Step accounting shared by all solvers: best energy, first success step,
// optional checkpoints.
class RunTracker {
 public:
  RunTracker(RunRecord& record, double target, const SolveOptions& options)
      : record_(record), target_(target), options_(options),
        start_(std::chrono::steady_clock::now()) {}

  // Returns true when the target has been reached.
  bool observe(double energy, std::uint64_t step) {
    if (!seen_ || energy < record_.best_energy) {
      record_.best_energy = energy;
      seen_ = true;
    }
    if (energy <= target_ && !record_.success) {
      record_.success = true;
      record_.best_energy = energy;
      record_.step_of_solution = step;
    }
    return record_.success;
  }

  void end_step(std::uint64_t step) {
    record_.steps_executed = step;
    if (options_.trace && options_.trace->checkpoint_every > 0 &&
        step % options_.trace->checkpoint_every == 0)
      options_.trace->best_checkpoints.emplace_back(step, record_.best_energy);
  }

  void finish(const SpinState& final_state) {
    record_.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (options_.trace) {
      options_.trace->best_checkpoints.emplace_back(record_.steps_executed, record_.best_energy);
      options_.trace->final_state = final_state;
    }
  }

 private:
  RunRecord& record_;
  double target_;
  const SolveOptions& options_;
  std::chrono::steady_clock::time_point start_;
  bool seen_ = false;
};

}  // namespace xorbench::detail
