#include "xorbench/tts.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "xorbench/error.hpp"

namespace xorbench {

double tts_single(double t_f, double p) {
  if (!(t_f > 0.0)) throw Error(ErrorKind::DomainError, "t_f must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "p must lie in [0, 1]");
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  if (p >= kTargetConfidence) return t_f;
  return t_f * std::log(1.0 - kTargetConfidence) / std::log1p(-p);
}

double estimate_success(std::span<const RunRecord> records, double t_f) {
  if (records.empty()) throw Error(ErrorKind::NoRecords, "no runs for this instance");
  std::size_t hits = 0;
  for (const RunRecord& r : records)
    hits += r.success && r.step_of_solution && static_cast<double>(*r.step_of_solution) <= t_f;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

TtsCurve optimal_tts(std::span<const std::vector<RunRecord>> by_instance,
                     std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "cutoff grid is empty");
  if (by_instance.empty()) throw Error(ErrorKind::NoRecords, "no instances");
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (!(grid[g] > 0.0) || (g > 0 && !(grid[g] > grid[g - 1])))
      throw Error(ErrorKind::DomainError, "cutoff grid must be positive and strictly increasing");

  TtsCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.aggregate.assign(grid.size(), 0.0);
  for (const auto& runs : by_instance) {
    std::vector<double> p(grid.size());
    std::vector<double> t(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      p[g] = estimate_success(runs, grid[g]);
      t[g] = tts_single(grid[g], p[g]);
      curve.aggregate[g] += t[g];
    }
    curve.success.push_back(std::move(p));
    curve.tts.push_back(std::move(t));
  }
  const double count = static_cast<double>(by_instance.size());
  for (double& a : curve.aggregate) a /= count;

  curve.optimal_index = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (curve.aggregate[g] < curve.aggregate[curve.optimal_index]) curve.optimal_index = g;
  curve.optimal_tf = grid[curve.optimal_index];
  curve.optimal_tts = curve.aggregate[curve.optimal_index];
  return curve;
}

std::vector<double> default_cutoff_grid(std::uint64_t max_steps, std::size_t per_decade) {
  if (max_steps == 0 || per_decade == 0)
    throw Error(ErrorKind::EmptyGrid, "grid needs max_steps >= 1 and per_decade >= 1");
  const double top = static_cast<double>(max_steps);
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double t = std::pow(10.0, static_cast<double>(k) / static_cast<double>(per_decade));
    if (t >= top * (1.0 - 1e-12)) break;
    grid.push_back(t);
  }
  grid.push_back(top);
  return grid;
}

}  // namespace xorbench
