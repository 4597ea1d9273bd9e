#include "xorbench/xorsat.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "xorbench/error.hpp"
#include "xorbench/rng.hpp"

namespace xorbench {

namespace {

constexpr int kLocalRetries = 100;
constexpr int kRestarts = 100;

bool distinct(const std::uint32_t* slot) {
  return slot[0] != slot[1] && slot[0] != slot[2] && slot[1] != slot[2];
}

// Returns false when the local repair budget for some clause is exhausted.
bool repair(std::vector<std::uint32_t>& stubs, std::size_t num_clauses, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
  for (std::size_t c = 0; c < num_clauses; ++c) {
    std::uint32_t* slot = &stubs[3 * c];
    int tries = 0;
    while (!distinct(slot)) {
      if (++tries > kLocalRetries) return false;
      // Move the second copy of the repeated variable out of the clause.
      std::size_t bad = (slot[0] == slot[1] || slot[0] == slot[2]) ? (slot[0] == slot[1] ? 1 : 2) : 2;
      std::size_t p = 3 * c + bad;
      std::size_t q = pick(rng);
      if (q / 3 == c) continue;
      std::swap(stubs[p], stubs[q]);
      std::size_t other = q / 3;
      // Clauses before c are already clean and must stay that way; later
      // clauses are repaired when the sweep reaches them.
      if (other < c && !distinct(&stubs[3 * other])) std::swap(stubs[p], stubs[q]);
    }
  }
  return true;
}

[[noreturn]] void syntax_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    syntax_error(line, "expected integer, got '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string default_label(std::size_t num_vars, std::uint64_t seed) {
  return "3r3x-v" + std::to_string(num_vars) + "-s" + std::to_string(seed);
}

XorSatInstance generate_3r3x(std::size_t n_spins, std::uint64_t seed) {
  if (n_spins % 2 != 0)
    throw Error(ErrorKind::OddSize, "n_spins must be even, got " + std::to_string(n_spins));
  if (n_spins < 8)
    throw Error(ErrorKind::TooSmall, "n_spins must be >= 8, got " + std::to_string(n_spins));

  const std::size_t m = n_spins / 2;
  Rng rng(seed);
  std::vector<std::uint32_t> stubs(3 * m);
  for (std::size_t v = 0; v < m; ++v)
    for (int r = 0; r < 3; ++r) stubs[3 * v + r] = static_cast<std::uint32_t>(v);

  bool ok = false;
  for (int restart = 0; restart <= kRestarts && !ok; ++restart) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    ok = repair(stubs, m, rng);
  }
  if (!ok)
    throw Error(ErrorKind::GenerationStall,
                "regularity repair failed after " + std::to_string(kRestarts) + " restarts");

  XorSatInstance inst;
  inst.num_vars = m;
  inst.seed = seed;
  inst.label = default_label(m, seed);
  Assignment planted(m);
  std::uniform_int_distribution<int> bit(0, 1);
  for (auto& x : planted) x = static_cast<std::uint8_t>(bit(rng));
  inst.clauses.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    Clause& cl = inst.clauses[c];
    cl.vars = {stubs[3 * c], stubs[3 * c + 1], stubs[3 * c + 2]};
    cl.parity = planted[cl.vars[0]] ^ planted[cl.vars[1]] ^ planted[cl.vars[2]];
  }
  inst.planted = std::move(planted);
  return inst;
}

std::size_t evaluate(const XorSatInstance& instance, std::span<const std::uint8_t> assignment) {
  if (assignment.size() != instance.num_vars)
    throw Error(ErrorKind::LengthMismatch, "assignment has " + std::to_string(assignment.size()) +
                                               " entries, instance has " +
                                               std::to_string(instance.num_vars) + " variables");
  std::size_t unsat = 0;
  for (const Clause& c : instance.clauses) {
    std::uint8_t x = (assignment[c.vars[0]] ^ assignment[c.vars[1]] ^ assignment[c.vars[2]]) & 1u;
    unsat += (x != c.parity);
  }
  return unsat;
}

void validate(const XorSatInstance& instance) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); };
  if (instance.clauses.size() != instance.num_vars)
    fail("clause count " + std::to_string(instance.clauses.size()) + " != variable count " +
         std::to_string(instance.num_vars));
  std::vector<std::size_t> degree(instance.num_vars, 0);
  for (std::size_t c = 0; c < instance.clauses.size(); ++c) {
    const Clause& cl = instance.clauses[c];
    for (auto v : cl.vars) {
      if (v >= instance.num_vars)
        fail("clause " + std::to_string(c) + " references variable " + std::to_string(v) +
             " out of range");
      ++degree[v];
    }
    if (!distinct(cl.vars.data()))
      fail("clause " + std::to_string(c) + " repeats a variable");
    if (cl.parity > 1) fail("clause " + std::to_string(c) + " has parity outside {0,1}");
  }
  for (std::size_t v = 0; v < degree.size(); ++v)
    if (degree[v] != 3)
      fail("regularity: variable " + std::to_string(v) + " appears in " +
           std::to_string(degree[v]) + " clauses");
  if (instance.planted) {
    if (instance.planted->size() != instance.num_vars)
      fail("planted assignment length " + std::to_string(instance.planted->size()) +
           " != variable count");
    if (evaluate(instance, *instance.planted) != 0)
      fail("planted assignment violates the clauses");
  }
}

std::vector<XorEquation> to_equations(const XorSatInstance& instance) {
  std::vector<XorEquation> eqs;
  eqs.reserve(instance.clauses.size());
  for (const Clause& c : instance.clauses)
    eqs.push_back({{c.vars[0], c.vars[1], c.vars[2]}, c.parity});
  return eqs;
}

SolutionSpace gf2_solve(const XorSatInstance& instance, bool parallel) {
  auto eqs = to_equations(instance);
  return gf2_solve(instance.num_vars, eqs, parallel);
}

std::size_t count_solutions(const SolutionSpace& space) { return space.num_vars - space.rank; }

Assignment solution_from_mask(const SolutionSpace& space, std::uint64_t mask) {
  Assignment x = space.particular;
  for (std::size_t b = 0; b < space.nullspace_basis.size() && b < 64; ++b)
    if ((mask >> b) & 1u)
      for (std::size_t v = 0; v < x.size(); ++v) x[v] ^= space.nullspace_basis[b][v];
  return x;
}

std::string serialize(const XorSatInstance& instance) {
  std::ostringstream out;
  out << "p 3r3x " << instance.num_vars << ' ' << instance.clauses.size() << ' ' << instance.seed
      << '\n';
  for (const Clause& c : instance.clauses)
    out << "c " << c.vars[0] << ' ' << c.vars[1] << ' ' << c.vars[2] << ' '
        << static_cast<int>(c.parity) << '\n';
  if (instance.planted) {
    out << "s ";
    for (auto b : *instance.planted) out << (b ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

XorSatInstance parse(std::string_view text) {
  XorSatInstance inst;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tok = split_ws(line);
    if (tok.empty() || tok[0].starts_with('#')) continue;

    if (tok[0] == "p") {
      if (have_header) syntax_error(line_no, "duplicate header");
      if (tok.size() != 5 || tok[1] != "3r3x")
        syntax_error(line_no, "expected 'p 3r3x <num_vars> <num_clauses> <seed>'");
      inst.num_vars = parse_number<std::size_t>(tok[2], line_no);
      declared_clauses = parse_number<std::size_t>(tok[3], line_no);
      inst.seed = parse_number<std::uint64_t>(tok[4], line_no);
      have_header = true;
    } else if (!have_header) {
      syntax_error(line_no, "record before header line");
    } else if (tok[0] == "c") {
      if (tok.size() != 5) syntax_error(line_no, "expected 'c <i> <j> <k> <parity>'");
      if (inst.planted) syntax_error(line_no, "clause after solution line");
      if (inst.clauses.size() == declared_clauses)
        syntax_error(line_no, "more clause lines than the declared " +
                                  std::to_string(declared_clauses));
      Clause c;
      for (int k = 0; k < 3; ++k) c.vars[k] = parse_number<std::uint32_t>(tok[1 + k], line_no);
      unsigned parity = parse_number<unsigned>(tok[4], line_no);
      if (parity > 1) syntax_error(line_no, "parity must be 0 or 1");
      c.parity = static_cast<std::uint8_t>(parity);
      inst.clauses.push_back(c);
    } else if (tok[0] == "s") {
      if (tok.size() != 2) syntax_error(line_no, "expected 's <bitstring>'");
      if (inst.planted) syntax_error(line_no, "duplicate solution line");
      Assignment a;
      a.reserve(tok[1].size());
      for (char ch : tok[1]) {
        if (ch != '0' && ch != '1') syntax_error(line_no, "solution must be a 0/1 string");
        a.push_back(static_cast<std::uint8_t>(ch - '0'));
      }
      inst.planted = std::move(a);
    } else {
      syntax_error(line_no, "unknown record type '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_header) syntax_error(line_no, "missing header line");
  if (inst.clauses.size() != declared_clauses)
    syntax_error(line_no, "header declares " + std::to_string(declared_clauses) +
                              " clauses, found " + std::to_string(inst.clauses.size()));
  inst.label = default_label(inst.num_vars, inst.seed);
  validate(inst);
  return inst;
}

XorSatInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void write_instance(const XorSatInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << serialize(instance);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace xorbench
