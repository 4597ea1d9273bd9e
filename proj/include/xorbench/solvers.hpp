#pragma once

// Solver portfolio: coupled-laser dynamics with noise injection, plus
// simulated annealing, tabu search and parallel tempering baselines. Every
// solver evolves one trajectory from one random initial state and is
// bit-reproducible given (model, config, seed).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "xorbench/ising.hpp"
#include "xorbench/kernels.hpp"
#include "xorbench/rng.hpp"

namespace xorbench {

struct LaserParams {
  double g0 = 2.0;          // small-signal gain, > 1
  double kappa = 0.0;       // coupling strength; <= 0 means "look up the calibrated value"
  double eta = 0.0;         // noise std per quadrature, as a fraction of a_sat
  double init_scale = 0.1;  // initial amplitude, as a fraction of a_sat
  double a_sat = 1.0;
};

struct AnnealParams {
  double t_hi = 0.0;  // <= 0 means 2 max|J|
  double t_lo = 0.1;
  std::size_t sweeps_per_temp = 1;
};

struct TabuParams {
  std::size_t tenure = 10;
  bool aspiration = true;
};

struct TemperingParams {
  std::size_t num_replicas = 0;  // 0 means max(4, log2 n)
  double t_hi = 0.0;             // <= 0 means 2 max|J|
  double t_lo = 0.1;
  std::size_t sweeps_between_swaps = 1;
};

using SolverConfig = std::variant<LaserParams, AnnealParams, TabuParams, TemperingParams>;

std::string_view solver_id(const SolverConfig& config);
std::string_view step_unit(const SolverConfig& config);
// Throws ConfigError.
void validate(const SolverConfig& config);
// Parses "laser" / "sa" / "tabu" / "pt" into a default-initialized config.
// Throws ConfigError listing the valid names.
SolverConfig default_config(std::string_view solver_name);
inline constexpr std::string_view kSolverNames = "laser, sa, tabu, pt";

std::size_t default_replicas(std::size_t n);

// Hottest temperature actually used: t_hi, or 2 max|J| when t_hi <= 0.
double resolved_t_hi(double t_hi, double t_lo, const SparseIsing& model);

class KeyValueConfig;
class KappaTable;

// Reads `<solver>.<param>` keys (see config/defaults.conf); missing keys keep
// the struct defaults and "auto" maps to the sentinel values above.
SolverConfig solver_config_from(const KeyValueConfig& kv, std::string_view solver_name);
// `laser.kappa.<n> = value` entries.
KappaTable kappa_table_from(const KeyValueConfig& kv);
// Fills every "auto" parameter for this model; laser kappa comes from `table`.
SolverConfig resolve_auto(const SolverConfig& config, const SparseIsing& model,
                          const KappaTable& table);

struct RunRecord {
  std::string instance_label;
  std::string solver_id;
  std::uint64_t seed = 0;
  std::uint64_t steps_executed = 0;
  bool success = false;
  double best_energy = 0.0;
  std::optional<std::uint64_t> step_of_solution;
  double wall_time = 0.0;  // seconds
  std::string step_unit;
  // Experiment coordinates; filled in by the bench driver.
  std::size_t n = 0;
  double noise = 0.0;
  std::size_t instance_index = 0;
  std::size_t restart = 0;

  bool same_outcome(const RunRecord& other) const;  // equality ignoring wall time
};

struct SolveTrace {
  std::size_t checkpoint_every = 1000;
  std::vector<std::pair<std::uint64_t, double>> best_checkpoints;
  std::vector<std::uint32_t> flips;  // tabu: spin flipped by each move
  SpinState final_state;
};

struct SolveOptions {
  std::optional<SpinState> initial_state;  // replaces the random start (not for laser)
  // Recompute the energy from scratch every 1000 steps and throw
  // InvariantViolation if the incremental value disagrees.
  bool verify_bookkeeping = false;
  KernelPolicy policy = KernelPolicy::Auto;
  SolveTrace* trace = nullptr;
};

RunRecord solve(const SparseIsing& model, const SolverConfig& config, std::uint64_t seed,
                std::uint64_t max_steps, double target_energy, const SolveOptions& options = {});

// ---------------------------------------------------------------- laser ----

struct LaserField {
  std::vector<std::complex<double>> field;
  double a_sat = 1.0;
  double g0 = 2.0;
  double kappa = 0.0;
  double eta = 0.0;
  std::uint64_t step_count = 0;
};

// Uniform random phase, amplitude init_scale * a_sat.
LaserField make_laser_field(std::size_t n, const LaserParams& params, Rng& rng);

// Reusable buffers for laser_step.
struct LaserWorkspace {
  std::vector<std::complex<double>> scratch;
  std::vector<std::complex<double>> noise;
};

// One round trip: linear feedback through the couplings (fields act through a
// fixed real reference of amplitude a_sat), additive complex Gaussian noise
// with std eta * a_sat per quadrature, then saturable gain. Throws
// NonFiniteField.
void laser_step(LaserField& state, const SparseIsing& model, Rng& rng, LaserWorkspace& work,
                KernelPolicy policy = KernelPolicy::Auto);

// s_i = sign(Re e_i); exact zeros read as +1.
SpinState readout(const LaserField& state);

RunRecord laser_solve(const SparseIsing& model, const LaserParams& params, std::uint64_t seed,
                      std::uint64_t max_steps, double target_energy,
                      const SolveOptions& options = {});

// Per-size coupling strengths found by calibrate_kappa, interpolated
// log-log between calibrated sizes and clamped outside them.
class KappaTable {
 public:
  KappaTable() = default;
  explicit KappaTable(std::map<std::size_t, double> points) : points_(std::move(points)) {}
  void set(std::size_t n, double kappa) { points_[n] = kappa; }
  bool empty() const noexcept { return points_.empty(); }
  double lookup(std::size_t n) const;  // throws ConfigError when empty
  const std::map<std::size_t, double>& points() const noexcept { return points_; }

 private:
  std::map<std::size_t, double> points_;
};

struct CalibrationOptions {
  std::size_t instances = 4;
  std::size_t seeds_per_instance = 4;
  std::uint64_t max_steps = 20000;
  double kappa_lo = 0.01;
  double kappa_hi = 1.0;
  std::size_t bracket_points = 9;
  std::size_t refine_iterations = 8;
  std::uint64_t master_seed = 7;
  LaserParams base;
};

struct CalibrationResult {
  double kappa = 0.0;
  double success_rate = 0.0;
  double median_steps = 0.0;
  std::vector<std::pair<double, double>> evaluated;  // (kappa, score)
};

// Scores a coarse geometric bracket of kappa values on freshly generated
// planted instances, then refines around the best point by golden-section
// search in log(kappa). Score = success rate, ties broken by median steps and
// then by mean best energy.
CalibrationResult calibrate_kappa(std::size_t n_spins, const CalibrationOptions& options);

// ------------------------------------------------------------ baselines ----

// Metropolis acceptance: always for dE <= 0, else with probability exp(-dE/T).
bool metropolis_accept(double delta_e, double temperature, Rng& rng);

RunRecord simulated_annealing(const SparseIsing& model, const AnnealParams& params,
                              std::uint64_t seed, std::uint64_t max_steps, double target_energy,
                              const SolveOptions& options = {});

RunRecord tabu_search(const SparseIsing& model, const TabuParams& params, std::uint64_t seed,
                      std::uint64_t max_steps, double target_energy,
                      const SolveOptions& options = {});

RunRecord parallel_tempering(const SparseIsing& model, const TemperingParams& params,
                             std::uint64_t seed, std::uint64_t max_steps, double target_energy,
                             const SolveOptions& options = {});

// Replica-exchange acceptance probability min(1, exp((beta_i - beta_j)(E_i - E_j))).
double swap_probability(double beta_i, double energy_i, double beta_j, double energy_j);

}  // namespace xorbench
