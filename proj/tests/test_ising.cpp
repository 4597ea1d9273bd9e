#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "xorbench/error.hpp"
#include "xorbench/ising.hpp"
#include "xorbench/rng.hpp"

using namespace xorbench;

namespace {

IsingModel two_spin(double j) {
  IsingModel m;
  m.n = 2;
  m.h = {0.0, 0.0};
  m.couplings = {{0, 1, j}};
  return m;
}

SpinState state(std::initializer_list<int> s) {
  SpinState out;
  for (int v : s) out.spins.push_back(static_cast<std::int8_t>(v));
  return out;
}

}  // namespace

TEST_CASE("gadget: exhaustive 16-row table for both parities") {
  for (int b = 0; b <= 1; ++b)
    for (int x = 0; x < 8; ++x)
      for (int a = 0; a <= 1; ++a) {
        const int sum = (x & 1) + ((x >> 1) & 1) + ((x >> 2) & 1);
        const int direct = (sum - 2 * a - b) * (sum - 2 * a - b);
        CHECK(gadget_penalty(sum, a, b) == direct);
        const bool satisfied = (sum % 2) == b;
        const int best = std::min(gadget_penalty(sum, 0, b), gadget_penalty(sum, 1, b));
        CHECK(best == (satisfied ? 0 : 1));
        CHECK(gadget_penalty(sum, optimal_ancilla(sum, b), b) == best);
        if (!satisfied || a != optimal_ancilla(sum, b)) CHECK(gadget_penalty(sum, a, b) >= 1);
      }
}

TEST_CASE("optimal_ancilla examples") {
  CHECK(optimal_ancilla(3, 1) == 1);
  CHECK(optimal_ancilla(0, 0) == 0);
  CHECK(gadget_penalty(2, 0, 1) == 1);
  CHECK(gadget_penalty(2, 1, 1) == 1);
  CHECK(optimal_ancilla(2, 1) == 1);
  CHECK(gadget_penalty(1, 0, 1) == 0);
  CHECK(gadget_penalty(2, 1, 1) == 1);
}

TEST_CASE("energy: two-spin hand sums") {
  const auto m = two_spin(1.0);
  CHECK(energy(m, state({1, 1})) == 1.0);
  CHECK(energy(m, state({1, -1})) == -1.0);
  IsingModel empty;
  empty.n = 3;
  empty.h = {0, 0, 0};
  CHECK(energy(empty, state({1, -1, 1})) == 0.0);
  CHECK_THROWS_AS(energy(m, state({1})), Error);
}

TEST_CASE("energy_delta: two-spin example, definition and involution") {
  const SparseIsing sm(two_spin(1.0));
  CHECK(energy_delta(sm, state({1, 1}), 0) == -2.0);
  CHECK_THROWS_AS(energy_delta(sm, state({1, 1}), 2), Error);

  const auto inst = generate_3r3x(40, 8);
  const auto model = xorsat_to_ising(inst).first;
  const SparseIsing sparse(model);
  Rng rng(3);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    SpinState s;
    for (std::size_t i = 0; i < model.n; ++i) s.spins.push_back(coin(rng) ? 1 : -1);
    const std::size_t k = static_cast<std::size_t>(trial) % model.n;
    const double d = energy_delta(sparse, s, k);
    // -2 s_k (h_k + sum_j J_kj s_j), straight from the coupling list
    double local = model.h[k];
    for (const auto& c : model.couplings) {
      if (c.i == k) local += c.value * s[c.j];
      if (c.j == k) local += c.value * s[c.i];
    }
    CHECK(d == -2.0 * s[k] * local);
    SpinState f = s;
    f[k] = static_cast<std::int8_t>(-f[k]);
    CHECK(energy(model, f) == energy(model, s) + d);
    CHECK(d + energy_delta(sparse, f, k) == 0.0);
    CHECK(energy(sparse, s) == energy(model, s));
  }
}

TEST_CASE("xorsat_to_ising: single-clause examples from the gadget") {
  const auto inst = oracle::make_instance(3, {{{0, 1, 2}, 1}});
  const auto [model, map] = xorsat_to_ising(inst);
  CHECK(model.n == 4);
  auto min_energy = [&](std::initializer_list<int> bits) {
    double best = 1e9;
    for (int a = 0; a <= 1; ++a) {
      SpinState s;
      for (int b : bits) s.spins.push_back(bit_to_spin(static_cast<std::uint8_t>(b)));
      s.spins.push_back(bit_to_spin(static_cast<std::uint8_t>(a)));
      best = std::min(best, energy(model, s));
    }
    return best;
  };
  CHECK(min_energy({1, 0, 0}) == 0.0);
  CHECK(min_energy({1, 1, 0}) == 1.0);
}

TEST_CASE("xorsat_to_ising: structure, validity and variable map") {
  const auto inst = generate_3r3x(64, 21);
  const auto [model, map] = xorsat_to_ising(inst);
  CHECK(model.n == 2 * inst.num_vars);
  CHECK_NOTHROW(validate(model));
  std::vector<int> seen(model.n, 0);
  for (auto s : map.var_spin) ++seen[s];
  for (auto s : map.ancilla_spin) ++seen[s];
  for (int c : seen) CHECK(c == 1);
  REQUIRE(model.source_map.has_value());
  CHECK(*model.source_map == map);
}

TEST_CASE("xorsat_to_ising: planted assignment with optimal ancillas has energy 0") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_3r3x(128, seed);
    const auto [model, map] = xorsat_to_ising(inst);
    const SpinState s = encode(inst, map, *inst.planted);
    CHECK(energy(model, s) == 0.0);
    CHECK(decode(s, map) == *inst.planted);
  }
}

TEST_CASE("xorsat_to_ising: exhaustive 12-spin check against the unsat count") {
  const auto inst = generate_3r3x(12, 4);
  const auto [model, map] = xorsat_to_ising(inst);
  REQUIRE(model.n == 12);
  const std::size_t nv = inst.num_vars;
  std::vector<double> min_over_ancillas(std::size_t{1} << nv, 1e9);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << model.n); ++mask) {
    SpinState s{oracle::spins_from_mask(model.n, mask)};
    const double e = energy(model, s);
    CHECK(e == oracle::energy(model, s.spins));
    const Assignment a = decode(s, map);
    std::uint64_t vbits = 0;
    for (std::size_t v = 0; v < nv; ++v) vbits |= std::uint64_t{a[v]} << v;
    const double unsat = static_cast<double>(oracle::unsat(inst, vbits));
    CHECK(e >= unsat);
    min_over_ancillas[vbits] = std::min(min_over_ancillas[vbits], e);
  }
  for (std::uint64_t vbits = 0; vbits < (std::uint64_t{1} << nv); ++vbits) {
    CHECK(min_over_ancillas[vbits] == static_cast<double>(oracle::unsat(inst, vbits)));
    Assignment a(nv);
    for (std::size_t v = 0; v < nv; ++v) a[v] = (vbits >> v) & 1u;
    CHECK(energy(model, encode(inst, map, a)) == static_cast<double>(oracle::unsat(inst, vbits)));
  }
}

TEST_CASE("energy is invariant under reordering of the coupling list") {
  const auto inst = generate_3r3x(32, 2);
  auto model = xorsat_to_ising(inst).first;
  Rng rng(9);
  SpinState s;
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t i = 0; i < model.n; ++i) s.spins.push_back(coin(rng) ? 1 : -1);
  const double e = energy(model, s);
  std::shuffle(model.couplings.begin(), model.couplings.end(), rng);
  CHECK(energy(model, s) == e);
  CHECK(energy(SparseIsing(model), s) == e);
}

TEST_CASE("decode / encode conventions") {
  const auto inst = generate_3r3x(16, 1);
  const auto [model, map] = xorsat_to_ising(inst);
  SpinState plus;
  plus.spins.assign(model.n, 1);
  CHECK(decode(plus, map) == Assignment(inst.num_vars, 0));
  Rng rng(1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int t = 0; t < 20; ++t) {
    Assignment a(inst.num_vars);
    for (auto& b : a) b = static_cast<std::uint8_t>(coin(rng));
    CHECK(decode(encode(inst, map, a), map) == a);
  }
}

TEST_CASE("validate rejects malformed models") {
  IsingModel m = two_spin(1.0);
  CHECK_NOTHROW(validate(m));
  m.couplings.push_back({1, 1, 2.0});
  CHECK_THROWS_AS(validate(m), Error);
  m = two_spin(1.0);
  m.couplings.push_back({0, 1, 2.0});
  CHECK_THROWS_AS(validate(m), Error);
  m = two_spin(1.0);
  m.couplings[0].j = 5;
  CHECK_THROWS_AS(validate(m), Error);
}

TEST_CASE("export / parse round trip at full precision") {
  const auto inst = generate_3r3x(48, 12);
  auto model = xorsat_to_ising(inst).first;
  model.source_map.reset();
  model.h[0] = 0.1 + 0.2;  // not representable in short decimal form
  const auto back = parse_ising(export_ising(model));
  CHECK(back.n == model.n);
  CHECK(back.offset == model.offset);
  CHECK(back.h == model.h);
  CHECK(back.couplings == model.couplings);
  const std::string text = export_ising(model);
  CHECK(text.rfind("p ising " + std::to_string(model.n) + " ", 0) == 0);
}
