#pragma once

// Plot-ready output: one CSV series per (solver, noise), one fitted-curve
// file per series, literature reference constants and a gnuplot script.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xorbench/experiment.hpp"
#include "xorbench/fit.hpp"

namespace xorbench {

struct SeriesPoint {
  double n = 0.0;
  double tts = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool operator==(const SeriesPoint&) const = default;
};

struct Series {
  std::string solver;
  double noise = 0.0;
  std::vector<SeriesPoint> points;
};

struct SeriesFit {
  std::string solver;
  double noise = 0.0;
  std::optional<ScalingFit> power;
  std::optional<ScalingFit> exponential;
};

// Groups summary rows into series; confidence bounds default to the TTS itself.
std::vector<Series> series_from_summary(std::span<const SummaryRow> rows);

// Fits both models to every series with at least 3 finite points.
std::vector<SeriesFit> fit_series(std::span<const Series> series);

struct LiteratureLine {
  ModelKind kind;
  double exponent;
  const char* label;
};
inline constexpr LiteratureLine kLiterature[] = {
    {ModelKind::Power, 2.31, "literature: LPU power law k=2.31"},
    {ModelKind::Exponential, 0.0171, "literature: best heuristic alpha=0.0171 (SAT on GPU)"},
    {ModelKind::Exponential, 0.08, "literature: slowest heuristic alpha=0.08"},
};

struct PlotFiles {
  std::vector<std::string> series;
  std::vector<std::string> fits;
  std::string reference;
  std::string script;
};

// Writes into out_dir (created if missing). Throws NoData for empty input and
// Io on write failure.
PlotFiles emit_plot_data(std::span<const Series> series, std::span<const SeriesFit> fits,
                         const std::string& out_dir);

std::string series_stem(const std::string& solver, double noise);

// Re-reads a series file written by emit_plot_data.
Series parse_series(const std::string& path);
// Re-reads the fit parameters stored in a fit file header.
SeriesFit parse_fit(const std::string& path);

}  // namespace xorbench
