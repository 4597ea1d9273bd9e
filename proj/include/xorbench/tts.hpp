#pragma once

// Time-to-solution statistics:
//   TTS(t_f) = t_f ln(1 - 0.99) / ln(1 - p(t_f)),   TTS = min over t_f of <TTS_i(t_f)>
// where p_i(t_f) is the fraction of restarts on instance i that reached the
// ground state within t_f steps and <.> is the mean over instances.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "xorbench/solvers.hpp"

namespace xorbench {

inline constexpr double kTargetConfidence = 0.99;

// Infinite for p == 0, exactly t_f for p >= 0.99. Throws DomainError.
double tts_single(double t_f, double p);

// Fraction of records with success and step_of_solution <= t_f. Runs that
// hit their step cap count as failures at every t_f. Throws NoRecords.
double estimate_success(std::span<const RunRecord> records, double t_f);

struct TtsCurve {
  std::vector<double> grid;
  std::vector<std::vector<double>> success;   // [instance][grid point]
  std::vector<std::vector<double>> tts;       // [instance][grid point]
  std::vector<double> aggregate;              // mean over instances per grid point
  std::size_t optimal_index = 0;
  double optimal_tf = 0.0;
  double optimal_tts = 0.0;                   // infinite if no grid point solves every instance
};

// Records grouped by instance. Throws EmptyGrid / NoRecords / DomainError
// (grid not strictly increasing or non-positive).
TtsCurve optimal_tts(std::span<const std::vector<RunRecord>> by_instance,
                     std::span<const double> grid);

// Geometric grid with `per_decade` points per decade over [1, max_steps],
// always ending exactly at max_steps.
std::vector<double> default_cutoff_grid(std::uint64_t max_steps, std::size_t per_decade = 20);

}  // namespace xorbench
