#include "xorbench/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xorbench/error.hpp"
#include "xorbench/rng.hpp"
#include "xorbench/tts.hpp"

namespace xorbench {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Power ? "power" : "exponential";
}

double ScalingFit::predict(double n) const {
  const double x = model_kind == ModelKind::Power ? std::log10(n) : n;
  return std::pow(10.0, intercept + exponent * x);
}

namespace {

constexpr double kLog10Of2 = std::numbers::ln2 / std::numbers::ln10;

// log10(v) split as e log10(2) + log10(m) with v = m 2^e. Differences are
// formed per part so that scaling every value by a power of two leaves them
// bit-identical.
struct SplitLog {
  int e = 0;
  double lm = 0.0;
};

SplitLog split_log10(double v) {
  int e = 0;
  const double m = std::frexp(v, &e);
  return {e, std::log10(m)};
}

double diff(const SplitLog& a, const SplitLog& b) {
  return static_cast<double>(a.e - b.e) * kLog10Of2 + (a.lm - b.lm);
}

ScalingFit ols(std::span<const Point> points, ModelKind kind) {
  std::vector<Point> kept;
  std::size_t excluded = 0;
  for (const Point& p : points) {
    if (std::isinf(p.tts) && p.tts > 0) {
      ++excluded;
      continue;
    }
    if (!(p.tts > 0.0) || !std::isfinite(p.tts))
      throw Error(ErrorKind::NonPositiveValue, "TTS values must be finite and > 0");
    if (kind == ModelKind::Power && !(p.n > 0.0))
      throw Error(ErrorKind::NonPositiveValue, "sizes must be > 0 for a power-law fit");
    kept.push_back(p);
  }
  if (kept.size() < 3)
    throw Error(ErrorKind::InsufficientPoints,
                "need at least 3 finite points, have " + std::to_string(kept.size()));

  const std::size_t m = kept.size();
  std::vector<double> dx(m), dy(m);
  const SplitLog y0 = split_log10(kept[0].tts);
  const SplitLog x0 = split_log10(kept[0].n);
  double mean_y = 0.0;
  double mean_x = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const SplitLog yi = split_log10(kept[i].tts);
    dy[i] = diff(yi, y0);
    mean_y += std::log10(kept[i].tts);
    if (kind == ModelKind::Power) {
      dx[i] = diff(split_log10(kept[i].n), x0);
      mean_x += std::log10(kept[i].n);
    } else {
      dx[i] = kept[i].n - kept[0].n;
      mean_x += kept[i].n;
    }
  }
  const double count = static_cast<double>(m);
  mean_x /= count;
  mean_y /= count;

  double cdx = 0.0, cdy = 0.0;
  for (std::size_t i = 0; i < m; ++i) cdx += dx[i], cdy += dy[i];
  cdx /= count;
  cdy /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double cx = dx[i] - cdx;
    const double cy = dy[i] - cdy;
    sxx += cx * cx;
    sxy += cx * cy;
    syy += cy * cy;
  }
  if (!(sxx > 0.0))
    throw Error(ErrorKind::InsufficientPoints, "need at least two distinct sizes");

  ScalingFit f;
  f.model_kind = kind;
  f.exponent = sxy / sxx;
  f.intercept = mean_y - f.exponent * mean_x;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = (dy[i] - cdy) - f.exponent * (dx[i] - cdx);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  f.exponent_stderr = m > 2 ? std::sqrt(sse / (count - 2.0) / sxx) : 0.0;
  f.n_points = m;
  f.excluded = excluded;
  return f;
}

// Linear-interpolated quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  if (t == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> percentile_interval(std::vector<double> values, double estimate) {
  std::sort(values.begin(), values.end());
  return {std::min(quantile(values, 0.025), estimate),
          std::max(quantile(values, 0.975), estimate)};
}

void check_resamples(std::size_t resamples) {
  if (resamples < 2)
    throw Error(ErrorKind::InsufficientResamples,
                "bootstrap needs at least 2 resamples, got " + std::to_string(resamples));
}

}  // namespace

ScalingFit fit_power_law(std::span<const Point> points) { return ols(points, ModelKind::Power); }
ScalingFit fit_exponential(std::span<const Point> points) {
  return ols(points, ModelKind::Exponential);
}
ScalingFit fit(std::span<const Point> points, ModelKind kind) { return ols(points, kind); }

ModelComparison compare_models(std::span<const Point> points) {
  ModelComparison c;
  c.power = fit_power_law(points);
  c.exponential = fit_exponential(points);
  c.preferred = c.exponential.r_squared > c.power.r_squared ? ModelKind::Exponential
                                                            : ModelKind::Power;
  c.delta_r_squared = std::abs(c.exponential.r_squared - c.power.r_squared);
  c.indeterminate = c.delta_r_squared < kIndeterminateBand;
  return c;
}

std::pair<double, double> bootstrap_ci(std::span<const Point> points, std::size_t resamples,
                                       std::uint64_t seed, ModelKind kind) {
  check_resamples(resamples);
  const double estimate = fit(points, kind).exponent;
  std::vector<Point> finite;
  for (const Point& p : points)
    if (std::isfinite(p.tts)) finite.push_back(p);

  std::vector<double> exponents(resamples);
  std::vector<int> failed(resamples, 0);
  const auto total = static_cast<std::ptrdiff_t>(resamples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < total; ++b) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(b)});
    std::uniform_int_distribution<std::size_t> pick(0, finite.size() - 1);
    std::vector<Point> sample(finite.size());
    // A resample that lands on a single size has no slope; draw again.
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) {
        failed[static_cast<std::size_t>(b)] = 1;
        break;
      }
      for (auto& s : sample) s = finite[pick(rng)];
      const bool spread = std::any_of(sample.begin(), sample.end(),
                                      [&](const Point& p) { return p.n != sample[0].n; });
      if (!spread) continue;
      exponents[static_cast<std::size_t>(b)] = ols(sample, kind).exponent;
      break;
    }
  }
  if (std::find(failed.begin(), failed.end(), 1) != failed.end())
    throw Error(ErrorKind::InsufficientPoints, "bootstrap could not draw a resample with two sizes");
  return percentile_interval(std::move(exponents), estimate);
}

std::pair<double, double> tts_bootstrap_ci(std::span<const std::vector<RunRecord>> by_instance,
                                           std::span<const double> grid, std::size_t resamples,
                                           std::uint64_t seed) {
  check_resamples(resamples);
  const double estimate = optimal_tts(by_instance, grid).optimal_tts;
  std::vector<double> values(resamples);
  const auto total = static_cast<std::ptrdiff_t>(resamples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < total; ++b) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(b)});
    std::uniform_int_distribution<std::size_t> pick(0, by_instance.size() - 1);
    std::vector<std::vector<RunRecord>> sample(by_instance.size());
    for (auto& s : sample) s = by_instance[pick(rng)];
    values[static_cast<std::size_t>(b)] = optimal_tts(sample, grid).optimal_tts;
  }
  return percentile_interval(std::move(values), estimate);
}

}  // namespace xorbench
