#include "xorbench/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace xorbench {

bool use_parallel(KernelPolicy policy, std::size_t n) {
  switch (policy) {
    case KernelPolicy::Serial: return false;
    case KernelPolicy::Parallel: return true;
    case KernelPolicy::Auto: return n >= kParallelThreshold && omp_get_max_threads() > 1;
  }
  return false;
}

namespace kernels {

namespace {

inline double row_field(const SparseIsing& model, std::span<const std::int8_t> spins,
                        std::size_t i) {
  auto nb = model.neighbors(i);
  auto w = model.weights(i);
  double acc = model.field(i);
  for (std::size_t t = 0; t < nb.size(); ++t) acc += w[t] * spins[nb[t]];
  return acc;
}

inline Complex row_feedback(const SparseIsing& model, std::span<const Complex> field,
                            double kappa, double reference, std::size_t i) {
  auto nb = model.neighbors(i);
  auto w = model.weights(i);
  double re = model.field(i) * reference;
  double im = 0.0;
  for (std::size_t t = 0; t < nb.size(); ++t) {
    re += w[t] * field[nb[t]].real();
    im += w[t] * field[nb[t]].imag();
  }
  return {field[i].real() - kappa * re, field[i].imag() - kappa * im};
}

inline double gain_one(Complex& e, const Complex* noise, double g0, double inv_sat2) {
  Complex x = noise ? e + *noise : e;
  double p = std::norm(x);
  e = x * (g0 / (1.0 + p * inv_sat2));
  return std::abs(e);
}

// Per-row contribution h_i s_i + (1/2) s_i sum_j J_ij s_j; the sum over rows
// is the energy minus the offset.
inline double row_energy(const SparseIsing& model, std::span<const std::int8_t> spins,
                         std::size_t i) {
  auto nb = model.neighbors(i);
  auto w = model.weights(i);
  double acc = 0.0;
  for (std::size_t t = 0; t < nb.size(); ++t) acc += w[t] * spins[nb[t]];
  return spins[i] * (model.field(i) + 0.5 * acc);
}

}  // namespace

void local_fields_serial(const SparseIsing& model, std::span<const std::int8_t> spins,
                         std::span<double> out) {
  for (std::size_t i = 0; i < model.size(); ++i) out[i] = row_field(model, spins, i);
}

void local_fields_omp(const SparseIsing& model, std::span<const std::int8_t> spins,
                      std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(model.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = row_field(model, spins, static_cast<std::size_t>(i));
}

double energy_serial(const SparseIsing& model, std::span<const std::int8_t> spins) {
  double e = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) e += row_energy(model, spins, i);
  return model.offset() + e;
}

// Quadratization outputs are half-integers, so every partial sum is exact in
// double and the reduction order cannot change the result for those models.
double energy_omp(const SparseIsing& model, std::span<const std::int8_t> spins) {
  const auto n = static_cast<std::ptrdiff_t>(model.size());
  double e = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : e)
  for (std::ptrdiff_t i = 0; i < n; ++i) e += row_energy(model, spins, static_cast<std::size_t>(i));
  return model.offset() + e;
}

void laser_feedback_serial(const SparseIsing& model, std::span<const Complex> field, double kappa,
                           double reference, std::span<Complex> out) {
  for (std::size_t i = 0; i < model.size(); ++i)
    out[i] = row_feedback(model, field, kappa, reference, i);
}

void laser_feedback_omp(const SparseIsing& model, std::span<const Complex> field, double kappa,
                        double reference, std::span<Complex> out) {
  const auto n = static_cast<std::ptrdiff_t>(model.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        row_feedback(model, field, kappa, reference, static_cast<std::size_t>(i));
}

double laser_gain_serial(std::span<Complex> field, std::span<const Complex> noise, double g0,
                         double a_sat) {
  const double inv_sat2 = 1.0 / (a_sat * a_sat);
  const bool noisy = !noise.empty();
  double peak = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < field.size(); ++i) {
    double a = gain_one(field[i], noisy ? &noise[i] : nullptr, g0, inv_sat2);
    finite &= std::isfinite(a);
    peak = std::max(peak, a);
  }
  return finite ? peak : std::numeric_limits<double>::quiet_NaN();
}

double laser_gain_omp(std::span<Complex> field, std::span<const Complex> noise, double g0,
                      double a_sat) {
  const double inv_sat2 = 1.0 / (a_sat * a_sat);
  const bool noisy = !noise.empty();
  const auto n = static_cast<std::ptrdiff_t>(field.size());
  double peak = 0.0;
  int nonfinite = 0;
#pragma omp parallel for schedule(static) reduction(max : peak) reduction(+ : nonfinite)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto u = static_cast<std::size_t>(i);
    double a = gain_one(field[u], noisy ? &noise[u] : nullptr, g0, inv_sat2);
    nonfinite += !std::isfinite(a);
    peak = std::max(peak, a);
  }
  return nonfinite == 0 ? peak : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace kernels
}  // namespace xorbench
