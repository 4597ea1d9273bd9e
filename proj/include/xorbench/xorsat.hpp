#pragma once

// Planted 3-regular 3-XORSAT instances over GF(2).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xorbench {

using Assignment = std::vector<std::uint8_t>;  // one 0/1 entry per variable

struct Clause {
  std::array<std::uint32_t, 3> vars{};
  std::uint8_t parity = 0;  // satisfied iff x_i ^ x_j ^ x_k == parity

  bool operator==(const Clause&) const = default;
};

struct XorSatInstance {
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;
  std::optional<Assignment> planted;
  std::uint64_t seed = 0;
  std::string label;

  bool operator==(const XorSatInstance&) const = default;
};

// A general XOR equation; gf2_solve works on arbitrary systems so the same
// elimination checks hand-built and externally parsed inputs.
struct XorEquation {
  std::vector<std::uint32_t> vars;
  std::uint8_t parity = 0;
};

struct SolutionSpace {
  std::size_t num_vars = 0;
  Assignment particular;
  std::vector<Assignment> nullspace_basis;
  std::size_t rank = 0;
};

std::string default_label(std::size_t num_vars, std::uint64_t seed);

// Configuration-model construction with duplicate-variable repair. Throws
// OddSize / TooSmall / GenerationStall.
XorSatInstance generate_3r3x(std::size_t n_spins, std::uint64_t seed);

// Number of unsatisfied clauses. Throws LengthMismatch.
std::size_t evaluate(const XorSatInstance& instance, std::span<const std::uint8_t> assignment);

// Throws InvariantViolation naming the first failed check.
void validate(const XorSatInstance& instance);

std::vector<XorEquation> to_equations(const XorSatInstance& instance);

// Gauss-Jordan elimination over packed bit rows. Throws Inconsistent.
SolutionSpace gf2_solve(std::size_t num_vars, std::span<const XorEquation> equations,
                        bool parallel = false);
SolutionSpace gf2_solve(const XorSatInstance& instance, bool parallel = false);

// log2 of the number of solutions.
std::size_t count_solutions(const SolutionSpace& space);

// particular XOR (selected basis vectors); bit b of `mask` picks basis[b].
Assignment solution_from_mask(const SolutionSpace& space, std::uint64_t mask);

std::string serialize(const XorSatInstance& instance);
// Throws SyntaxError (with line number) or InvariantViolation.
XorSatInstance parse(std::string_view text);

XorSatInstance read_instance(const std::string& path);
void write_instance(const XorSatInstance& instance, const std::string& path);

}  // namespace xorbench
