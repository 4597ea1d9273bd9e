#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version computing the same values in the same per-element order, so
// tests can require bitwise agreement.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include "xorbench/ising.hpp"

namespace xorbench {

enum class KernelPolicy { Serial, Parallel, Auto };

// Auto picks the OpenMP kernels only for large models with more than one
// thread available; below that the fork/join cost dominates a round trip.
bool use_parallel(KernelPolicy policy, std::size_t n);

inline constexpr std::size_t kParallelThreshold = 4096;

namespace kernels {

using Complex = std::complex<double>;

// out_i = h_i + sum_j J_ij s_j
void local_fields_serial(const SparseIsing& model, std::span<const std::int8_t> spins,
                         std::span<double> out);
void local_fields_omp(const SparseIsing& model, std::span<const std::int8_t> spins,
                      std::span<double> out);

double energy_serial(const SparseIsing& model, std::span<const std::int8_t> spins);
double energy_omp(const SparseIsing& model, std::span<const std::int8_t> spins);

// out_i = e_i - kappa * (sum_j J_ij e_j + h_i * reference)
void laser_feedback_serial(const SparseIsing& model, std::span<const Complex> field, double kappa,
                           double reference, std::span<Complex> out);
void laser_feedback_omp(const SparseIsing& model, std::span<const Complex> field, double kappa,
                        double reference, std::span<Complex> out);

// e_i <- (e_i + noise_i) * g0 / (1 + |e_i + noise_i|^2 / a_sat^2); `noise` may
// be empty. Returns max_i |e_i| after gain, NaN if any entry is non-finite.
double laser_gain_serial(std::span<Complex> field, std::span<const Complex> noise, double g0,
                         double a_sat);
double laser_gain_omp(std::span<Complex> field, std::span<const Complex> noise, double g0,
                      double a_sat);

}  // namespace kernels
}  // namespace xorbench
