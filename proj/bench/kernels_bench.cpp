// Serial reference kernels against their OpenMP versions.
//
//   ./build/bench/kernels_bench --benchmark_filter=feedback
//
// On a single core the OpenMP rows measure fork/join overhead only.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "xorbench/gf2.hpp"
#include "xorbench/ising.hpp"
#include "xorbench/kernels.hpp"
#include "xorbench/xorsat.hpp"

using namespace xorbench;
using kernels::Complex;

namespace {

struct Fixture {
  SparseIsing model;
  std::vector<std::int8_t> spins;
  std::vector<Complex> field, noise, out;
  std::vector<double> fields;

  explicit Fixture(std::size_t n) {
    const auto inst = generate_3r3x(n, 17);
    model = SparseIsing(xorsat_to_ising(inst).first);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.1);
    for (std::size_t i = 0; i < model.size(); ++i) {
      spins.push_back(rng() & 1 ? 1 : -1);
      field.emplace_back(g(rng), g(rng));
      noise.emplace_back(g(rng), g(rng));
    }
    out.resize(model.size());
    fields.resize(model.size());
  }
};

template <bool Omp>
void BM_local_fields(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) {
    if constexpr (Omp) kernels::local_fields_omp(f.model, f.spins, f.fields);
    else kernels::local_fields_serial(f.model, f.spins, f.fields);
    benchmark::DoNotOptimize(f.fields.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_energy(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Omp ? kernels::energy_omp(f.model, f.spins)
                                 : kernels::energy_serial(f.model, f.spins));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_laser_feedback(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) {
    if constexpr (Omp) kernels::laser_feedback_omp(f.model, f.field, 0.1, 1.0, f.out);
    else kernels::laser_feedback_serial(f.model, f.field, 0.1, 1.0, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_laser_gain(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) {
    // g0 = 1 with a_sat = 1 keeps the field bounded across iterations
    benchmark::DoNotOptimize(Omp ? kernels::laser_gain_omp(f.field, f.noise, 1.0, 1.0)
                                 : kernels::laser_gain_serial(f.field, f.noise, 1.0, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_gf2_solve(benchmark::State& state) {
  const auto inst = generate_3r3x(state.range(0), 23);
  const auto eqs = to_equations(inst);
  for (auto _ : state) {
    auto space = gf2_solve(inst.num_vars, eqs, Omp);
    benchmark::DoNotOptimize(space.rank);
  }
}

}  // namespace

BENCHMARK(BM_local_fields<false>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_local_fields<true>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_energy<false>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_energy<true>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_laser_feedback<false>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_laser_feedback<true>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_laser_gain<false>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_laser_gain<true>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_gf2_solve<false>)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gf2_solve<true>)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
