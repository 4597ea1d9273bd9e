#include "xorbench/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xorbench/error.hpp"
#include "xorbench/kvconfig.hpp"

namespace xorbench {

namespace {

constexpr std::size_t kCurveSamples = 64;

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  return out;
}

std::string fit_line(const ScalingFit& f) {
  return std::string(to_string(f.model_kind)) + " exponent=" + format_real(f.exponent) +
         " intercept=" + format_real(f.intercept) + " stderr=" + format_real(f.exponent_stderr) +
         " r2=" + format_real(f.r_squared) + " n_points=" + std::to_string(f.n_points) +
         " excluded=" + std::to_string(f.excluded);
}

ScalingFit parse_fit_line(const std::string& line, const std::string& path) {
  std::istringstream in(line);
  std::string kind;
  in >> kind;
  ScalingFit f;
  f.model_kind = kind == "power" ? ModelKind::Power : ModelKind::Exponential;
  for (std::string tok; in >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::SyntaxError, path + ": bad fit token " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "exponent") f.exponent = parse_double(val, key);
    else if (key == "intercept") f.intercept = parse_double(val, key);
    else if (key == "stderr") f.exponent_stderr = parse_double(val, key);
    else if (key == "r2") f.r_squared = parse_double(val, key);
    else if (key == "n_points") f.n_points = parse_u64(val, key);
    else if (key == "excluded") f.excluded = parse_u64(val, key);
  }
  return f;
}

// Header comments of the form "# key=value".
std::map<std::string, std::string> read_meta(std::istream& in, std::string& first_data_line) {
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto eq = body.find('=');
      const auto sp = body.find(' ');
      if (eq != std::string::npos && (sp == std::string::npos || eq < sp))
        meta[body.substr(0, eq)] = body.substr(eq + 1);
      else if (sp != std::string::npos)
        meta[body.substr(0, sp)] = body.substr(sp + 1);
      continue;
    }
    first_data_line = line;
    break;
  }
  return meta;
}

std::string plot_title(const std::string& solver, double noise) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s eta=%g", solver.c_str(), noise);
  return buf;
}

}  // namespace

std::string series_stem(const std::string& solver, double noise) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_eta%g", noise);
  return solver + buf;
}

std::vector<Series> series_from_summary(std::span<const SummaryRow> rows) {
  std::map<std::pair<std::string, double>, Series> by;
  for (const SummaryRow& r : rows) {
    Series& s = by[{r.solver, r.noise}];
    s.solver = r.solver;
    s.noise = r.noise;
    const double n = static_cast<double>(r.n);
    s.points.push_back({n, r.tts_steps, r.tts_steps, r.tts_steps});
  }
  std::vector<Series> out;
  for (auto& [_, s] : by) {
    std::sort(s.points.begin(), s.points.end(),
              [](const SeriesPoint& a, const SeriesPoint& b) { return a.n < b.n; });
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SeriesFit> fit_series(std::span<const Series> series) {
  std::vector<SeriesFit> out;
  for (const Series& s : series) {
    std::vector<Point> pts;
    for (const auto& p : s.points)
      if (std::isfinite(p.tts)) pts.push_back({p.n, p.tts});
    SeriesFit f{s.solver, s.noise, std::nullopt, std::nullopt};
    try {
      f.power = fit_power_law(pts);
      f.exponential = fit_exponential(pts);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPoints) throw;
      continue;
    }
    out.push_back(std::move(f));
  }
  return out;
}

PlotFiles emit_plot_data(std::span<const Series> series, std::span<const SeriesFit> fits,
                         const std::string& out_dir) {
  if (series.empty() && fits.empty()) throw Error(ErrorKind::NoData, "nothing to plot");
  for (const Series& s : series)
    if (s.points.empty())
      throw Error(ErrorKind::NoData, "series " + plot_title(s.solver, s.noise) + " is empty");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  PlotFiles files;

  for (const Series& s : series) {
    const fs::path p = dir / ("series_" + series_stem(s.solver, s.noise) + ".csv");
    auto out = open_out(p);
    out << "# solver=" << s.solver << "\n# noise=" << format_real(s.noise) << '\n'
        << "n,tts,ci_low,ci_high\n";
    for (const auto& pt : s.points)
      out << format_real(pt.n) << ',' << format_real(pt.tts) << ',' << format_real(pt.ci_low) << ','
          << format_real(pt.ci_high) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for " + p.string());
    files.series.push_back(p.string());
  }

  double n_min = 32.0, n_max = 16384.0;
  for (const SeriesFit& f : fits) {
    double lo = n_min, hi = n_max;
    for (const Series& s : series)
      if (s.solver == f.solver && s.noise == f.noise) {
        lo = s.points.front().n;
        hi = s.points.back().n;
      }
    const fs::path p = dir / ("fit_" + series_stem(f.solver, f.noise) + ".csv");
    auto out = open_out(p);
    out << "# solver=" << f.solver << "\n# noise=" << format_real(f.noise) << '\n'
        << "# method=OLS of log10(tts) on log10(n) (power) or on n (exponential)\n";
    std::vector<const ScalingFit*> models;
    if (f.power) models.push_back(&*f.power);
    if (f.exponential) models.push_back(&*f.exponential);
    for (const ScalingFit* m : models) out << "# fit " << fit_line(*m) << '\n';
    out << 'n';
    for (const ScalingFit* m : models) out << ',' << to_string(m->model_kind);
    out << '\n';
    for (std::size_t i = 0; i < kCurveSamples; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(kCurveSamples - 1);
      const double n = lo * std::pow(hi / lo, t);
      out << format_real(n);
      for (const ScalingFit* m : models) out << ',' << format_real(m->predict(n));
      out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for " + p.string());
    files.fits.push_back(p.string());
  }

  {
    const fs::path p = dir / "reference_literature.csv";
    auto out = open_out(p);
    out << "# published constants for comparison; not computed from these results\n"
        << "kind,exponent,label\n";
    for (const auto& ref : kLiterature)
      out << to_string(ref.kind) << ',' << format_real(ref.exponent) << ',' << ref.label << '\n';
    files.reference = p.string();
  }

  {
    const fs::path p = dir / "plots.gp";
    auto out = open_out(p);
    out << "# gnuplot " << p.filename().string() << "\n"
        << "set datafile separator ','\n"
        << "set key left top\n"
        << "set logscale xy\n"
        << "set xlabel 'problem size n'\n"
        << "set ylabel 'optimal TTS (steps)'\n"
        << "set terminal pngcairo size 900,650\n";
    // Literature lines are anchored at the first noise-free point.
    double n0 = 32.0, t0 = 1.0;
    for (const Series& s : series)
      if (s.noise == 0.0 && std::isfinite(s.points.front().tts)) {
        n0 = s.points.front().n;
        t0 = s.points.front().tts;
        break;
      }
    out << "n0 = " << format_real(n0) << "\nt0 = " << format_real(t0) << '\n'
        << "lit_power(x) = t0 * (x / n0)**" << format_real(kLiterature[0].exponent) << '\n'
        << "lit_exp_lo(x) = t0 * 10**(" << format_real(kLiterature[1].exponent) << " * (x - n0))\n"
        << "lit_exp_hi(x) = t0 * 10**(" << format_real(kLiterature[2].exponent) << " * (x - n0))\n";

    auto plot_group = [&](const std::string& png, const std::string& title,
                          const std::vector<const Series*>& group, bool literature) {
      out << "\nset output '" << png << "'\nset title '" << title << "'\nplot \\\n";
      bool first = true;
      for (const Series* s : group) {
        const std::string stem = series_stem(s->solver, s->noise);
        out << (first ? "  " : ", \\\n  ") << "'series_" << stem
            << ".csv' using 1:2:3:4 with yerrorlines title '" << plot_title(s->solver, s->noise)
            << "'";
        first = false;
        for (const SeriesFit& f : fits)
          if (f.solver == s->solver && f.noise == s->noise) {
            int col = 2;
            for (const auto* m : {f.power ? &*f.power : nullptr, f.exponential ? &*f.exponential : nullptr}) {
              if (!m) continue;
              out << ", \\\n  'fit_" << stem << ".csv' using 1:" << col
                  << " with lines dashtype 2 title '" << to_string(m->model_kind) << " fit'";
              ++col;
            }
          }
      }
      if (literature)
        out << ", \\\n  lit_power(x) with lines lc 'gray' title '" << kLiterature[0].label << "'"
            << ", \\\n  lit_exp_lo(x) with lines lc 'gray' dashtype 3 title '" << kLiterature[1].label
            << "'"
            << ", \\\n  lit_exp_hi(x) with lines lc 'gray' dashtype 4 title '" << kLiterature[2].label
            << "'";
      out << '\n';
    };

    std::vector<const Series*> noise_free;
    std::map<std::string, std::vector<const Series*>> by_solver;
    for (const Series& s : series) {
      if (s.noise == 0.0) noise_free.push_back(&s);
      by_solver[s.solver].push_back(&s);
    }
    if (!noise_free.empty())
      plot_group("optimal_tts.png", "Optimal TTS vs problem size", noise_free, true);
    for (const auto& [solver, group] : by_solver)
      if (group.size() > 1)
        plot_group("noise_" + solver + ".png", "TTS vs size across noise levels (" + solver + ")",
                   group, false);
    files.script = p.string();
  }
  return files;
}

Series parse_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string header;
  auto meta = read_meta(in, header);
  if (header != "n,tts,ci_low,ci_high")
    throw Error(ErrorKind::SyntaxError, path + ": unexpected series header '" + header + "'");
  Series s;
  s.solver = meta["solver"];
  s.noise = meta.count("noise") ? parse_double(meta["noise"], "noise") : 0.0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(parse_double(cell, "series value"));
    if (v.size() != 4) throw Error(ErrorKind::SyntaxError, path + ": expected 4 columns");
    s.points.push_back({v[0], v[1], v[2], v[3]});
  }
  return s;
}

SeriesFit parse_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  SeriesFit f;
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const std::string body = line.substr(2);
    if (body.rfind("solver=", 0) == 0) f.solver = body.substr(7);
    else if (body.rfind("noise=", 0) == 0) f.noise = parse_double(body.substr(6), "noise");
    else if (body.rfind("fit ", 0) == 0) {
      ScalingFit m = parse_fit_line(body.substr(4), path);
      (m.model_kind == ModelKind::Power ? f.power : f.exponential) = m;
    }
  }
  return f;
}

}  // namespace xorbench
