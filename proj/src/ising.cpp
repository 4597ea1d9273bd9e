#include "xorbench/ising.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "xorbench/error.hpp"

namespace xorbench {

void validate(const IsingModel& model) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); };
  if (model.h.size() != model.n)
    fail("field vector has " + std::to_string(model.h.size()) + " entries for n=" +
         std::to_string(model.n));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(model.couplings.size());
  for (const Coupling& c : model.couplings) {
    if (c.i >= model.n || c.j >= model.n)
      fail("coupling (" + std::to_string(c.i) + "," + std::to_string(c.j) + ") out of range");
    if (c.i == c.j) fail("diagonal coupling on spin " + std::to_string(c.i));
    if (c.i > c.j) fail("coupling (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                        ") is not upper triangular");
    pairs.emplace_back(c.i, c.j);
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    fail("a spin pair appears more than once");
  if (model.source_map) {
    const VariableMap& m = *model.source_map;
    std::vector<char> seen(model.n, 0);
    for (auto s : m.var_spin) {
      if (s >= model.n || seen[s]) fail("variable map is not a partition of the spins");
      seen[s] = 1;
    }
    for (auto s : m.ancilla_spin) {
      if (s >= model.n || seen[s]) fail("variable map is not a partition of the spins");
      seen[s] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      fail("variable map does not cover every spin");
  }
}

SparseIsing::SparseIsing(const IsingModel& model) : h_(model.h), offset_(model.offset) {
  validate(model);
  std::vector<std::size_t> deg(model.n, 0);
  for (const Coupling& c : model.couplings) {
    ++deg[c.i];
    ++deg[c.j];
    max_abs_j_ = std::max(max_abs_j_, std::abs(c.value));
  }
  row_ptr_.assign(model.n + 1, 0);
  for (std::size_t i = 0; i < model.n; ++i) row_ptr_[i + 1] = row_ptr_[i] + deg[i];
  col_.resize(row_ptr_.back());
  val_.resize(row_ptr_.back());
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  for (const Coupling& c : model.couplings) {
    col_[fill[c.i]] = c.j;
    val_[fill[c.i]++] = c.value;
    col_[fill[c.j]] = c.i;
    val_[fill[c.j]++] = c.value;
  }
}

int gadget_penalty(int literal_sum, int ancilla, int parity) {
  int y = literal_sum - 2 * ancilla - parity;
  return y * y;
}

std::uint8_t optimal_ancilla(int literal_sum, int parity) {
  int cost0 = gadget_penalty(literal_sum, 0, parity);
  int cost1 = gadget_penalty(literal_sum, 1, parity);
  if (cost0 != cost1) return cost1 < cost0 ? 1 : 0;
  return literal_sum >= 2 ? 1 : 0;
}

// Expanding (x_i + x_j + x_k - 2a - b)^2 with x = (1 - s)/2 and c = 1/2 - b:
//   constant     c^2 + 7/4                     (= 2 for either parity)
//   h on x_i     -c        h on a   2c
//   J(x_i, x_j)  1/2       J(x_i, a)  -1
std::pair<IsingModel, VariableMap> xorsat_to_ising(const XorSatInstance& instance) {
  const std::size_t m = instance.num_vars;
  const std::size_t nc = instance.clauses.size();
  VariableMap map;
  map.var_spin.resize(m);
  map.ancilla_spin.resize(nc);
  for (std::size_t v = 0; v < m; ++v) map.var_spin[v] = static_cast<std::uint32_t>(v);
  for (std::size_t c = 0; c < nc; ++c) map.ancilla_spin[c] = static_cast<std::uint32_t>(m + c);

  IsingModel model;
  model.n = m + nc;
  model.h.assign(model.n, 0.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair_terms;
  auto add_pair = [&](std::uint32_t a, std::uint32_t b, double w) {
    if (a > b) std::swap(a, b);
    pair_terms[{a, b}] += w;
  };
  for (std::size_t c = 0; c < nc; ++c) {
    const Clause& cl = instance.clauses[c];
    const double half_minus_b = 0.5 - cl.parity;
    const std::uint32_t anc = map.ancilla_spin[c];
    model.offset += half_minus_b * half_minus_b + 1.75;
    for (int t = 0; t < 3; ++t) {
      const std::uint32_t s = map.var_spin[cl.vars[t]];
      model.h[s] -= half_minus_b;
      add_pair(s, anc, -1.0);
      for (int u = t + 1; u < 3; ++u) add_pair(s, map.var_spin[cl.vars[u]], 0.5);
    }
    model.h[anc] += 2.0 * half_minus_b;
  }
  for (const auto& [key, w] : pair_terms)
    if (w != 0.0) model.couplings.push_back({key.first, key.second, w});
  model.source_map = map;
  return {std::move(model), std::move(map)};
}

double energy(const IsingModel& model, const SpinState& state) {
  if (state.size() != model.n)
    throw Error(ErrorKind::LengthMismatch, "state has " + std::to_string(state.size()) +
                                               " spins, model has " + std::to_string(model.n));
  double e = model.offset;
  for (std::size_t i = 0; i < model.n; ++i) e += model.h[i] * state[i];
  for (const Coupling& c : model.couplings) e += c.value * state[c.i] * state[c.j];
  return e;
}

double energy(const SparseIsing& model, const SpinState& state) {
  if (state.size() != model.size())
    throw Error(ErrorKind::LengthMismatch, "state has " + std::to_string(state.size()) +
                                               " spins, model has " +
                                               std::to_string(model.size()));
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    linear += model.field(i) * state[i];
    auto nb = model.neighbors(i);
    auto w = model.weights(i);
    double acc = 0.0;
    for (std::size_t t = 0; t < nb.size(); ++t) acc += w[t] * state[nb[t]];
    quad += acc * state[i];
  }
  return model.offset() + linear + 0.5 * quad;
}

double energy_delta(const SparseIsing& model, const SpinState& state, std::size_t k) {
  if (k >= model.size())
    throw Error(ErrorKind::IndexOutOfRange,
                "flip index " + std::to_string(k) + " >= n=" + std::to_string(model.size()));
  auto nb = model.neighbors(k);
  auto w = model.weights(k);
  double local = model.field(k);
  for (std::size_t t = 0; t < nb.size(); ++t) local += w[t] * state[nb[t]];
  return -2.0 * state[k] * local;
}

Assignment decode(const SpinState& state, const VariableMap& map) {
  Assignment a(map.var_spin.size());
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (map.var_spin[v] >= state.size())
      throw Error(ErrorKind::LengthMismatch, "state too short for the variable map");
    a[v] = spin_to_bit(state[map.var_spin[v]]);
  }
  return a;
}

SpinState encode(const XorSatInstance& instance, const VariableMap& map,
                 std::span<const std::uint8_t> assignment) {
  if (assignment.size() != instance.num_vars)
    throw Error(ErrorKind::LengthMismatch, "assignment length does not match instance");
  SpinState s;
  s.spins.assign(map.var_spin.size() + map.ancilla_spin.size(), 1);
  for (std::size_t v = 0; v < assignment.size(); ++v) s[map.var_spin[v]] = bit_to_spin(assignment[v]);
  for (std::size_t c = 0; c < instance.clauses.size(); ++c) {
    const Clause& cl = instance.clauses[c];
    int sum = assignment[cl.vars[0]] + assignment[cl.vars[1]] + assignment[cl.vars[2]];
    s[map.ancilla_spin[c]] = bit_to_spin(optimal_ancilla(sum, cl.parity));
  }
  return s;
}

namespace {

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void syntax_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_token(const std::string& token, std::size_t line) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
      syntax_error(line, "expected real, got '" + token + "'");
  } else {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      syntax_error(line, "expected integer, got '" + token + "'");
  }
  return value;
}

}  // namespace

std::string export_ising(const IsingModel& model) {
  std::size_t nonzero_fields = 0;
  for (double x : model.h) nonzero_fields += (x != 0.0);
  std::ostringstream out;
  out << "p ising " << model.n << ' ' << nonzero_fields + model.couplings.size() << '\n';
  for (std::size_t i = 0; i < model.n; ++i)
    if (model.h[i] != 0.0) out << "f " << i << ' ' << format_real(model.h[i]) << '\n';
  for (const Coupling& c : model.couplings)
    out << "j " << c.i << ' ' << c.j << ' ' << format_real(c.value) << '\n';
  out << "o " << format_real(model.offset) << '\n';
  return out.str();
}

IsingModel parse_ising(std::string_view text) {
  IsingModel model;
  bool have_header = false;
  std::size_t declared_terms = 0;
  std::size_t terms = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "p") {
      if (have_header || tok.size() != 4 || tok[1] != "ising")
        syntax_error(line_no, "expected a single 'p ising <n> <num_terms>' header");
      model.n = parse_token<std::size_t>(tok[2], line_no);
      declared_terms = parse_token<std::size_t>(tok[3], line_no);
      model.h.assign(model.n, 0.0);
      have_header = true;
    } else if (!have_header) {
      syntax_error(line_no, "record before header line");
    } else if (tok[0] == "f") {
      if (tok.size() != 3) syntax_error(line_no, "expected 'f <i> <h_i>'");
      auto i = parse_token<std::size_t>(tok[1], line_no);
      if (i >= model.n) syntax_error(line_no, "field index out of range");
      model.h[i] = parse_token<double>(tok[2], line_no);
      ++terms;
    } else if (tok[0] == "j") {
      if (tok.size() != 4) syntax_error(line_no, "expected 'j <i> <j> <J_ij>'");
      Coupling c{parse_token<std::uint32_t>(tok[1], line_no),
                 parse_token<std::uint32_t>(tok[2], line_no), parse_token<double>(tok[3], line_no)};
      model.couplings.push_back(c);
      ++terms;
    } else if (tok[0] == "o") {
      if (tok.size() != 2) syntax_error(line_no, "expected 'o <value>'");
      model.offset = parse_token<double>(tok[1], line_no);
    } else {
      syntax_error(line_no, "unknown record type '" + tok[0] + "'");
    }
  }
  if (!have_header) syntax_error(line_no, "missing header line");
  if (terms != declared_terms)
    syntax_error(line_no, "header declares " + std::to_string(declared_terms) + " terms, found " +
                              std::to_string(terms));
  validate(model);
  return model;
}

}  // namespace xorbench
