#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "xorbench/error.hpp"
#include "xorbench/solvers.hpp"

using namespace xorbench;

namespace {

struct Problem {
  XorSatInstance inst;
  VariableMap map;
  SparseIsing model;
};

Problem problem(std::size_t n, std::uint64_t seed) {
  auto inst = generate_3r3x(n, seed);
  auto [ising, map] = xorsat_to_ising(inst);
  return {std::move(inst), std::move(map), SparseIsing(ising)};
}

double success_rate(const SolverConfig& cfg, std::size_t n, std::uint64_t max_steps,
                    int instances, int seeds) {
  int ok = 0;
  for (int i = 0; i < instances; ++i) {
    const auto p = problem(n, 1000 + static_cast<std::uint64_t>(i));
    for (int s = 0; s < seeds; ++s) {
      SolveTrace trace;
      SolveOptions opts;
      opts.trace = &trace;
      const auto rec = solve(p.model, cfg, static_cast<std::uint64_t>(s), max_steps, 0.0, opts);
      if (rec.success) {
        ++ok;
        CHECK(evaluate(p.inst, decode(trace.final_state, p.map)) == 0);
      }
    }
  }
  return static_cast<double>(ok) / (instances * seeds);
}

IsingModel single_spin(double h) {
  IsingModel m;
  m.n = 1;
  m.h = {h};
  return m;
}

}  // namespace

TEST_CASE("metropolis: downhill always, uphill never at T -> 0") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(metropolis_accept(-1.0, 1e-12, rng));
    CHECK(metropolis_accept(0.0, 1e-12, rng));
    CHECK_FALSE(metropolis_accept(0.5, 1e-12, rng));
  }
}

TEST_CASE("metropolis: acceptance of dE=+2 at T=2 is e^-1") {
  Rng rng(12345);
  const int trials = 1000000;
  int accepted = 0;
  for (int i = 0; i < trials; ++i) accepted += metropolis_accept(2.0, 2.0, rng);
  const double p = std::exp(-1.0);
  const double freq = static_cast<double>(accepted) / trials;
  CHECK(std::abs(freq - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("swap probability") {
  CHECK(swap_probability(1.0, 5.0, 0.5, 5.0) == 1.0);
  CHECK(swap_probability(0.5, -3.0, 1.0, -3.0) == 1.0);
  // hot replica holding the lower energy always moves down
  CHECK(swap_probability(1.0, 2.0, 0.5, 1.0) == 1.0);
  CHECK(swap_probability(1.0, 1.0, 0.5, 2.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("all solvers: zero budget, determinism, record invariants") {
  const auto p = problem(32, 5);
  LaserParams laser;
  laser.kappa = 0.05;
  const std::vector<SolverConfig> configs{laser, AnnealParams{}, TabuParams{}, TemperingParams{}};
  for (const auto& cfg : configs) {
    CAPTURE(solver_id(cfg));
    const auto zero = solve(p.model, cfg, 1, 0, 0.0);
    CHECK_FALSE(zero.success);
    CHECK(zero.steps_executed == 0);
    CHECK_FALSE(zero.step_of_solution.has_value());

    SolveTrace ta, tb;
    SolveOptions oa, ob;
    oa.trace = &ta;
    ob.trace = &tb;
    oa.verify_bookkeeping = true;
    const auto a = solve(p.model, cfg, 77, 3000, 0.0, oa);
    const auto b = solve(p.model, cfg, 77, 3000, 0.0, ob);
    CHECK(a.same_outcome(b));
    CHECK(ta.final_state == tb.final_state);
    CHECK(ta.best_checkpoints == tb.best_checkpoints);
    CHECK(a.solver_id == solver_id(cfg));
    CHECK(a.step_unit == step_unit(cfg));
    if (a.success) {
      CHECK(a.best_energy == 0.0);
      REQUIRE(a.step_of_solution.has_value());
      CHECK(*a.step_of_solution <= a.steps_executed);
      CHECK(evaluate(p.inst, decode(ta.final_state, p.map)) == 0);
    } else {
      CHECK(a.steps_executed == 3000);
    }
    for (std::size_t k = 1; k < ta.best_checkpoints.size(); ++k)
      CHECK(ta.best_checkpoints[k].second <= ta.best_checkpoints[k - 1].second);
  }
}

TEST_CASE("annealing and tempering solve n=8 instances with a generous budget") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = problem(8, seed);
    for (const SolverConfig& cfg : std::vector<SolverConfig>{AnnealParams{}, TemperingParams{}}) {
      CAPTURE(solver_id(cfg));
      CAPTURE(seed);
      SolveTrace trace;
      SolveOptions opts;
      opts.trace = &trace;
      const auto rec = solve(p.model, cfg, seed, 100000, 0.0, opts);
      CHECK(rec.success);
      CHECK(evaluate(p.inst, decode(trace.final_state, p.map)) == 0);
    }
  }
}

TEST_CASE("simulated annealing: n=16 solves within 1e4 sweeps on >= 90% of runs") {
  CHECK(success_rate(AnnealParams{}, 16, 10000, 10, 10) >= 0.9);
}

TEST_CASE("simulated annealing: T_hi = T_lo near zero is greedy descent") {
  const auto p = problem(64, 3);
  AnnealParams cold;
  cold.t_hi = cold.t_lo = 1e-9;
  SolveTrace trace;
  trace.checkpoint_every = 1;
  SolveOptions opts;
  opts.trace = &trace;
  const auto rec = solve(p.model, cold, 4, 200, 0.0, opts);
  (void)rec;
  // best energy per sweep never rises and the final energy is a local minimum
  for (std::size_t k = 1; k < trace.best_checkpoints.size(); ++k)
    CHECK(trace.best_checkpoints[k].second <= trace.best_checkpoints[k - 1].second);
  for (std::size_t k = 0; k < p.model.size(); ++k)
    CHECK(energy_delta(p.model, trace.final_state, k) >= 0.0);
}

TEST_CASE("tabu: one-spin model flips to the only lower state") {
  const SparseIsing model(single_spin(1.0));
  SolveTrace trace;
  SolveOptions opts;
  opts.trace = &trace;
  SpinState start;
  start.spins = {1};
  opts.initial_state = start;
  const auto rec = tabu_search(model, TabuParams{}, 1, 1, -1.0, opts);
  CHECK(rec.success);
  CHECK(rec.best_energy == -1.0);
  REQUIRE(trace.flips.size() == 1);
  CHECK(trace.flips[0] == 0);
  CHECK(trace.final_state[0] == -1);
}

TEST_CASE("tabu: stall guard releases the oldest tabu spin") {
  IsingModel m;
  m.n = 2;
  m.h = {0.5, 0.25};
  m.couplings = {{0, 1, 1.0}};
  const SparseIsing model(m);
  TabuParams params;
  params.tenure = 5;
  params.aspiration = false;
  SolveTrace trace;
  SolveOptions opts;
  opts.trace = &trace;
  const auto rec = tabu_search(model, params, 3, 12, -100.0, opts);
  CHECK(rec.steps_executed == 12);
  REQUIRE(trace.flips.size() == 12);
  // with both spins tabu the oldest one is released, so flips alternate
  for (std::size_t k = 1; k < trace.flips.size(); ++k) CHECK(trace.flips[k] != trace.flips[k - 1]);
}

TEST_CASE("tabu: ties go to the lowest index") {
  IsingModel m;
  m.n = 3;
  m.h = {1.0, 1.0, 1.0};
  const SparseIsing model(m);
  SolveTrace trace;
  SolveOptions opts;
  opts.trace = &trace;
  SpinState start;
  start.spins = {1, 1, 1};
  opts.initial_state = start;
  tabu_search(model, TabuParams{}, 1, 3, -3.0, opts);
  CHECK(trace.flips == std::vector<std::uint32_t>{0, 1, 2});
}

// Tabu is deterministic after the random start, so a run that falls into a
// cycle never leaves it; restarts carry the success probability.
TEST_CASE("tabu: n=16 solves every instance from some start within 1e4 moves") {
  int runs_ok = 0;
  for (int i = 0; i < 20; ++i) {
    const auto p = problem(16, 1000 + static_cast<std::uint64_t>(i));
    int ok = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      SolveTrace trace;
      SolveOptions opts;
      opts.trace = &trace;
      const auto rec = solve(p.model, TabuParams{}, s, 10000, 0.0, opts);
      if (rec.success) {
        ++ok;
        CHECK(evaluate(p.inst, decode(trace.final_state, p.map)) == 0);
      }
    }
    CAPTURE(i);
    CHECK(ok > 0);
    runs_ok += ok;
  }
  MESSAGE("tabu n=16: " << runs_ok << "/200 runs solved");
  CHECK(runs_ok >= 100);
}

TEST_CASE("tabu: tenure at or above n degenerates into a fixed cycle") {
  const auto p = problem(8, 0);
  TabuParams params;
  params.tenure = 10;
  params.aspiration = false;
  SolveTrace trace;
  SolveOptions opts;
  opts.trace = &trace;
  tabu_search(p.model, params, 3, 64, -1.0, opts);
  REQUIRE(trace.flips.size() == 64);
  for (std::size_t k = 8; k < trace.flips.size(); ++k) CHECK(trace.flips[k] == trace.flips[k - 8]);
}

TEST_CASE("parallel tempering with one replica reproduces fixed-temperature annealing") {
  const auto p = problem(48, 8);
  for (double t : {0.3, 0.8}) {
    AnnealParams sa;
    sa.t_hi = sa.t_lo = t;
    TemperingParams pt;
    pt.num_replicas = 1;
    pt.t_hi = pt.t_lo = t;
    SolveTrace ta, tb;
    SolveOptions oa, ob;
    oa.trace = &ta;
    ob.trace = &tb;
    const auto a = simulated_annealing(p.model, sa, 11, 2000, 0.0, oa);
    const auto b = parallel_tempering(p.model, pt, 11, 2000, 0.0, ob);
    CHECK(a.success == b.success);
    CHECK(a.steps_executed == b.steps_executed);
    CHECK(a.best_energy == b.best_energy);
    CHECK(a.step_of_solution == b.step_of_solution);
    CHECK(ta.final_state == tb.final_state);
    CHECK(ta.best_checkpoints == tb.best_checkpoints);
  }
}

TEST_CASE("parallel tempering: 8 replicas do at least as well as SA at equal total sweeps") {
  TemperingParams pt;
  pt.num_replicas = 8;
  const std::uint64_t sweeps = 4000;
  const double sa_rate = success_rate(AnnealParams{}, 32, sweeps, 8, 5);
  const double pt_rate = success_rate(pt, 32, sweeps / 8, 8, 5);
  MESSAGE("n=32 success at " << sweeps << " total sweeps: SA " << sa_rate << ", PT(K=8) " << pt_rate);
  CHECK(pt_rate >= sa_rate);
}

TEST_CASE("solver config validation and defaults") {
  CHECK_THROWS_AS(default_config("annealer"), Error);
  try {
    default_config("annealer");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("laser, sa, tabu, pt") != std::string::npos);
  }
  AnnealParams bad;
  bad.t_hi = 0.05;
  bad.t_lo = 0.1;
  CHECK_THROWS_AS(validate(SolverConfig{bad}), Error);
  TabuParams t;
  t.tenure = 0;
  CHECK_THROWS_AS(validate(SolverConfig{t}), Error);
  LaserParams l;
  l.g0 = 1.0;
  CHECK_THROWS_AS(validate(SolverConfig{l}), Error);
  CHECK(default_replicas(16) == 4);
  CHECK(default_replicas(1024) == 10);
}
