#pragma once

// Scaling fits of TTS against problem size, by ordinary least squares in
// log10 space:
//   power:        log10 TTS = intercept + k log10 n
//   exponential:  log10 TTS = intercept + alpha n

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "xorbench/solvers.hpp"

namespace xorbench {

enum class ModelKind { Power, Exponential };
std::string_view to_string(ModelKind kind);

struct Point {
  double n = 0.0;
  double tts = 0.0;
};

struct ScalingFit {
  ModelKind model_kind = ModelKind::Power;
  double exponent = 0.0;  // k or alpha
  double intercept = 0.0; // log10 prefactor
  double exponent_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;  // points actually fitted
  std::size_t excluded = 0;  // infinite TTS points dropped before fitting

  double predict(double n) const;
};

// Infinite TTS values are dropped and counted. Throws InsufficientPoints
// (fewer than 3 finite points or a single distinct size) and NonPositiveValue.
ScalingFit fit_power_law(std::span<const Point> points);
ScalingFit fit_exponential(std::span<const Point> points);
ScalingFit fit(std::span<const Point> points, ModelKind kind);

inline constexpr double kIndeterminateBand = 0.02;

struct ModelComparison {
  ScalingFit power;
  ScalingFit exponential;
  ModelKind preferred = ModelKind::Power;
  double delta_r_squared = 0.0;  // r2(preferred) - r2(other), >= 0
  bool indeterminate = false;    // delta below kIndeterminateBand
};
ModelComparison compare_models(std::span<const Point> points);

// Percentile 95% interval of the exponent over `resamples` point-level
// resamples with replacement. Deterministic per seed; widened if needed so
// it always contains the full-data estimate. Throws InsufficientResamples.
std::pair<double, double> bootstrap_ci(std::span<const Point> points, std::size_t resamples,
                                       std::uint64_t seed, ModelKind kind = ModelKind::Power);

// Percentile 95% interval of the optimal TTS of one (solver, n, noise) group,
// resampling instances with replacement.
std::pair<double, double> tts_bootstrap_ci(std::span<const std::vector<RunRecord>> by_instance,
                                           std::span<const double> grid, std::size_t resamples,
                                           std::uint64_t seed);

}  // namespace xorbench
