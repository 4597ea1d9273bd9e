#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "xorbench/error.hpp"
#include "xorbench/gf2.hpp"
#include "xorbench/rng.hpp"
#include "xorbench/xorsat.hpp"

using namespace xorbench;

namespace {

std::uint64_t mask_of(const Assignment& a) {
  std::uint64_t m = 0;
  for (std::size_t v = 0; v < a.size(); ++v) m |= std::uint64_t{a[v]} << v;
  return m;
}

std::vector<XorEquation> random_system(std::size_t num_vars, std::size_t rows, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<std::size_t> width(1, 4);
  std::uniform_int_distribution<std::uint32_t> var(0, static_cast<std::uint32_t>(num_vars - 1));
  std::vector<XorEquation> eqs;
  for (std::size_t r = 0; r < rows; ++r) {
    XorEquation e;
    const std::size_t w = width(rng);
    for (std::size_t k = 0; k < w; ++k) e.vars.push_back(var(rng));  // repeats cancel
    e.parity = static_cast<std::uint8_t>(bit(rng));
    eqs.push_back(e);
  }
  return eqs;
}

}  // namespace

TEST_CASE("gf2_solve: two-equation system has the unique solution (0,1)") {
  const std::vector<XorEquation> eqs{{{0, 1}, 1}, {{1}, 1}};
  const auto space = gf2_solve(2, eqs);
  CHECK(space.particular == Assignment{0, 1});
  CHECK(space.nullspace_basis.empty());
  CHECK(space.rank == 2);
  CHECK(count_solutions(space) == 0);
}

TEST_CASE("gf2_solve: single three-variable equation has 4 solutions") {
  const std::vector<XorEquation> eqs{{{0, 1, 2}, 0}};
  const auto space = gf2_solve(3, eqs);
  CHECK(count_solutions(space) == 2);
  CHECK(oracle::count_solutions(3, eqs) == 4);
}

TEST_CASE("count_solutions: empty system") {
  const auto space = gf2_solve(3, std::vector<XorEquation>{});
  CHECK(space.rank == 0);
  CHECK(count_solutions(space) == 3);
}

TEST_CASE("gf2_solve: contradiction is reported") {
  const std::vector<XorEquation> eqs{{{0, 1}, 0}, {{0, 1}, 1}};
  try {
    gf2_solve(2, eqs);
    FAIL("expected Inconsistent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Inconsistent);
  }
}

TEST_CASE("gf2_solve agrees with exhaustive enumeration up to 16 variables") {
  Rng rng(20240601);
  std::size_t consistent = 0, inconsistent = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nv = 1 + trial % 16;
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(0, nv + 3)(rng);
    const auto eqs = random_system(nv, rows, rng);
    const std::uint64_t brute = oracle::count_solutions(nv, eqs);
    for (bool parallel : {false, true}) {
      try {
        const auto space = gf2_solve(nv, eqs, parallel);
        REQUIRE(brute > 0);
        CHECK(brute == (std::uint64_t{1} << count_solutions(space)));
        CHECK(space.rank + space.nullspace_basis.size() == nv);
        CHECK(oracle::unsat(nv, eqs, mask_of(space.particular)) == 0);
        // every subset of the basis added to the particular solution solves
        const std::size_t k = space.nullspace_basis.size();
        for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << k); ++subset) {
          const auto sol = solution_from_mask(space, subset);
          CHECK(oracle::unsat(nv, eqs, mask_of(sol)) == 0);
        }
        if (!parallel) ++consistent;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Inconsistent);
        CHECK(brute == 0);
        if (!parallel) ++inconsistent;
      }
    }
  }
  CHECK(consistent > 50);
  CHECK(inconsistent > 10);
}

TEST_CASE("gf2_solve: nullspace basis vectors are linearly independent") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nv = 10;
    auto eqs = random_system(nv, 5, rng);
    for (auto& e : eqs) e.parity = 0;  // homogeneous: always consistent
    const auto space = gf2_solve(nv, eqs);
    const std::size_t k = space.nullspace_basis.size();
    for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << k); ++subset) {
      std::uint64_t combo = 0;
      for (std::size_t b = 0; b < k; ++b)
        if ((subset >> b) & 1u) combo ^= mask_of(space.nullspace_basis[b]);
      CHECK(combo != 0);
    }
  }
}

TEST_CASE("gf2_solve: generated instances are solved by the particular solution") {
  for (std::size_t n : {32, 64, 128, 256, 1024}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = generate_3r3x(n, seed);
      const auto space = gf2_solve(inst);
      CHECK(evaluate(inst, space.particular) == 0);
      CHECK(space.rank + space.nullspace_basis.size() == inst.num_vars);
      const auto par = gf2_solve(inst, true);
      CHECK(par.particular == space.particular);
      CHECK(par.nullspace_basis == space.nullspace_basis);
    }
  }
}

TEST_CASE("reduce: serial and OpenMP elimination produce identical matrices") {
  Rng rng(77);
  std::uniform_int_distribution<int> bit(0, 1);
  for (std::size_t cols : {5, 64, 65, 200, 700}) {
    gf2::BitMatrix a(cols - 1, cols);
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (bit(rng)) a.flip(r, c);
    gf2::BitMatrix b = a;
    const auto ra = gf2::reduce(a, cols - 1, false);
    const auto rb = gf2::reduce(b, cols - 1, true);
    CHECK(ra.rank == rb.rank);
    CHECK(ra.pivot_cols == rb.pivot_cols);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const auto wa = a.row(r);
      const auto wb = b.row(r);
      CHECK(std::equal(wa.begin(), wa.end(), wb.begin()));
    }
  }
}

TEST_CASE("eliminate_column: only the pivot row keeps the column") {
  gf2::BitMatrix m(4, 70);
  for (std::size_t r = 0; r < 4; ++r) m.flip(r, 66);
  m.flip(1, 69);
  gf2::BitMatrix copy = m;
  gf2::eliminate_column_serial(m, 1, 66);
  gf2::eliminate_column_omp(copy, 1, 66);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(m.get(r, 66) == (r == 1));
    CHECK(m.get(r, 69) == true);
    CHECK(copy.get(r, 66) == m.get(r, 66));
    CHECK(copy.get(r, 69) == m.get(r, 69));
  }
}
