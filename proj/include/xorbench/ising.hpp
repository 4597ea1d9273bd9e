#pragma once

// Ising Hamiltonian H = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j and
// the XORSAT quadratization that produces it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xorbench/xorsat.hpp"

namespace xorbench {

struct Coupling {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double value = 0.0;

  bool operator==(const Coupling&) const = default;
};

// Bits map to spins through x = (1 - s) / 2: spin +1 is bit 0.
struct VariableMap {
  std::vector<std::uint32_t> var_spin;      // variable v lives on spin var_spin[v]
  std::vector<std::uint32_t> ancilla_spin;  // clause c's ancilla lives on ancilla_spin[c]

  bool operator==(const VariableMap&) const = default;
};

struct IsingModel {
  std::size_t n = 0;
  std::vector<double> h;
  std::vector<Coupling> couplings;
  double offset = 0.0;
  std::optional<VariableMap> source_map;

  bool operator==(const IsingModel&) const = default;
};

struct SpinState {
  std::vector<std::int8_t> spins;  // entries in {-1, +1}

  std::size_t size() const noexcept { return spins.size(); }
  std::int8_t operator[](std::size_t i) const noexcept { return spins[i]; }
  std::int8_t& operator[](std::size_t i) noexcept { return spins[i]; }
  bool operator==(const SpinState&) const = default;
};

// Throws InvariantViolation on out-of-range indices, diagonal terms, unordered
// or repeated pairs, or a field vector of the wrong length.
void validate(const IsingModel& model);

// Compressed adjacency form of a model: the working representation of every
// solver. Both directions of each coupling are stored.
class SparseIsing {
 public:
  SparseIsing() = default;
  explicit SparseIsing(const IsingModel& model);

  std::size_t size() const noexcept { return h_.size(); }
  double offset() const noexcept { return offset_; }
  std::span<const double> fields() const noexcept { return h_; }
  double field(std::size_t i) const noexcept { return h_[i]; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept {
    return {col_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> weights(std::size_t i) const noexcept {
    return {val_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::size_t degree(std::size_t i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
  double max_abs_coupling() const noexcept { return max_abs_j_; }

 private:
  std::vector<double> h_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
  double offset_ = 0.0;
  double max_abs_j_ = 0.0;
};

// Binary penalty of one clause gadget: (x_i + x_j + x_k - 2a - b)^2.
int gadget_penalty(int literal_sum, int ancilla, int parity);

// Minimizing ancilla bit; ties (one violated clause, both values cost 1) pick
// a = 1 exactly when at least two literals are true.
std::uint8_t optimal_ancilla(int literal_sum, int parity);

// One ancilla spin per clause: spins [0, num_vars) carry the variables and
// spins [num_vars, 2 num_vars) carry clause ancillas. Energies equal
// unsatisfied-clause counts once the ancillas are optimal.
std::pair<IsingModel, VariableMap> xorsat_to_ising(const XorSatInstance& instance);

// Throws LengthMismatch.
double energy(const IsingModel& model, const SpinState& state);
double energy(const SparseIsing& model, const SpinState& state);

// energy(state with spin k flipped) - energy(state). Throws IndexOutOfRange.
double energy_delta(const SparseIsing& model, const SpinState& state, std::size_t k);

inline std::int8_t bit_to_spin(std::uint8_t bit) noexcept { return bit ? -1 : 1; }
inline std::uint8_t spin_to_bit(std::int8_t spin) noexcept { return spin < 0 ? 1 : 0; }

Assignment decode(const SpinState& state, const VariableMap& map);

// Spin state for an assignment with every ancilla set optimally.
SpinState encode(const XorSatInstance& instance, const VariableMap& map,
                 std::span<const std::uint8_t> assignment);

std::string export_ising(const IsingModel& model);
// Throws SyntaxError / InvariantViolation.
IsingModel parse_ising(std::string_view text);

}  // namespace xorbench
