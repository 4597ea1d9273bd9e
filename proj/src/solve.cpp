#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "xorbench/error.hpp"
#include "xorbench/kvconfig.hpp"
#include "xorbench/solvers.hpp"

namespace xorbench {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }
}  // namespace

std::string_view solver_id(const SolverConfig& config) {
  return std::visit(overloaded{[](const LaserParams&) { return std::string_view("laser"); },
                               [](const AnnealParams&) { return std::string_view("sa"); },
                               [](const TabuParams&) { return std::string_view("tabu"); },
                               [](const TemperingParams&) { return std::string_view("pt"); }},
                    config);
}

std::string_view step_unit(const SolverConfig& config) {
  return std::visit(overloaded{[](const LaserParams&) { return std::string_view("round_trip"); },
                               [](const AnnealParams&) { return std::string_view("sweep"); },
                               [](const TabuParams&) { return std::string_view("move"); },
                               [](const TemperingParams&) { return std::string_view("pt_sweep"); }},
                    config);
}

// Temperatures may coincide (fixed-temperature runs) and a single replica is
// allowed; both are degenerate but well-defined.
void validate(const SolverConfig& config) {
  std::visit(
      overloaded{
          [](const LaserParams& p) {
            if (!(p.g0 > 1.0)) bad_config("laser g0 must be > 1");
            if (!(p.a_sat > 0.0)) bad_config("laser a_sat must be > 0");
            if (!(p.eta >= 0.0)) bad_config("laser eta must be >= 0");
            if (!(p.init_scale > 0.0)) bad_config("laser init_scale must be > 0");
            if (!std::isfinite(p.kappa)) bad_config("laser kappa must be finite");
          },
          [](const AnnealParams& p) {
            if (!(p.t_lo > 0.0) || !(p.t_hi >= p.t_lo)) bad_config("sa needs t_hi >= t_lo > 0");
            if (p.sweeps_per_temp == 0) bad_config("sa sweeps_per_temp must be >= 1");
          },
          [](const TabuParams& p) {
            if (p.tenure == 0) bad_config("tabu tenure must be >= 1");
          },
          [](const TemperingParams& p) {
            if (!(p.t_lo > 0.0) || !(p.t_hi >= p.t_lo)) bad_config("pt needs t_hi >= t_lo > 0");
            if (p.sweeps_between_swaps == 0) bad_config("pt sweeps_between_swaps must be >= 1");
          }},
      config);
}

SolverConfig default_config(std::string_view name) {
  if (name == "laser") return LaserParams{};
  if (name == "sa") return AnnealParams{};
  if (name == "tabu") return TabuParams{};
  if (name == "pt") return TemperingParams{};
  bad_config("unknown solver '" + std::string(name) + "'; valid names: " +
             std::string(kSolverNames));
}

std::size_t default_replicas(std::size_t n) {
  const std::size_t log2n = n > 1 ? static_cast<std::size_t>(std::bit_width(n - 1)) : 1;
  return std::max<std::size_t>(4, log2n);
}

double resolved_t_hi(double t_hi, double t_lo, const SparseIsing& model) {
  if (t_hi > 0.0) return t_hi;
  return std::max(2.0 * model.max_abs_coupling(), t_lo);
}

namespace {

bool is_auto(const KeyValueConfig& kv, const std::string& key) {
  auto v = kv.get(key);
  return v && *v == "auto";
}

double number_or_auto(const KeyValueConfig& kv, const std::string& key, double fallback) {
  return is_auto(kv, key) ? 0.0 : kv.get_double(key, fallback);
}

}  // namespace

SolverConfig solver_config_from(const KeyValueConfig& kv, std::string_view name) {
  SolverConfig config = default_config(name);
  std::visit(
      overloaded{
          [&](LaserParams& p) {
            p.g0 = kv.get_double("laser.g0", p.g0);
            p.kappa = number_or_auto(kv, "laser.kappa", p.kappa);
            p.eta = kv.get_double("laser.eta", p.eta);
            p.init_scale = kv.get_double("laser.init_scale", p.init_scale);
            p.a_sat = kv.get_double("laser.a_sat", p.a_sat);
          },
          [&](AnnealParams& p) {
            p.t_hi = number_or_auto(kv, "sa.t_hi", p.t_hi);
            p.t_lo = kv.get_double("sa.t_lo", p.t_lo);
            p.sweeps_per_temp = kv.get_u64("sa.sweeps_per_temp", p.sweeps_per_temp);
          },
          [&](TabuParams& p) {
            p.tenure = kv.get_u64("tabu.tenure", p.tenure);
            p.aspiration = kv.get_bool("tabu.aspiration", p.aspiration);
          },
          [&](TemperingParams& p) {
            p.num_replicas = is_auto(kv, "pt.replicas") ? 0 : kv.get_u64("pt.replicas", p.num_replicas);
            p.t_hi = number_or_auto(kv, "pt.t_hi", p.t_hi);
            p.t_lo = kv.get_double("pt.t_lo", p.t_lo);
            p.sweeps_between_swaps = kv.get_u64("pt.sweeps_between_swaps", p.sweeps_between_swaps);
          }},
      config);
  return config;
}

KappaTable kappa_table_from(const KeyValueConfig& kv) {
  KappaTable table;
  for (const auto& [suffix, value] : kv.with_prefix("laser.kappa."))
    table.set(parse_u64(suffix, "laser.kappa.<n>"), parse_double(value, "laser.kappa." + suffix));
  return table;
}

SolverConfig resolve_auto(const SolverConfig& config, const SparseIsing& model,
                          const KappaTable& table) {
  SolverConfig out = config;
  std::visit(overloaded{[&](LaserParams& p) {
                          if (p.kappa <= 0.0) p.kappa = table.lookup(model.size());
                        },
                        [&](AnnealParams& p) { p.t_hi = resolved_t_hi(p.t_hi, p.t_lo, model); },
                        [](TabuParams&) {},
                        [&](TemperingParams& p) {
                          p.t_hi = resolved_t_hi(p.t_hi, p.t_lo, model);
                          if (p.num_replicas == 0) p.num_replicas = default_replicas(model.size());
                        }},
             out);
  validate(out);
  return out;
}

bool RunRecord::same_outcome(const RunRecord& o) const {
  return instance_label == o.instance_label && solver_id == o.solver_id && seed == o.seed &&
         steps_executed == o.steps_executed && success == o.success &&
         best_energy == o.best_energy && step_of_solution == o.step_of_solution &&
         step_unit == o.step_unit && n == o.n && noise == o.noise &&
         instance_index == o.instance_index && restart == o.restart;
}

RunRecord solve(const SparseIsing& model, const SolverConfig& config, std::uint64_t seed,
                std::uint64_t max_steps, double target_energy, const SolveOptions& options) {
  return std::visit(
      overloaded{
          [&](const LaserParams& p) {
            return laser_solve(model, p, seed, max_steps, target_energy, options);
          },
          [&](const AnnealParams& p) {
            return simulated_annealing(model, p, seed, max_steps, target_energy, options);
          },
          [&](const TabuParams& p) {
            return tabu_search(model, p, seed, max_steps, target_energy, options);
          },
          [&](const TemperingParams& p) {
            return parallel_tempering(model, p, seed, max_steps, target_energy, options);
          }},
      config);
}

}  // namespace xorbench
