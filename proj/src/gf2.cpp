#include "xorbench/gf2.hpp"

#include <algorithm>
#include <string>

#include "xorbench/error.hpp"
#include "xorbench/xorsat.hpp"

namespace xorbench {

namespace gf2 {

void BitMatrix::swap_rows(std::size_t a, std::size_t b) noexcept {
  if (a == b) return;
  std::swap_ranges(bits_.begin() + a * stride_, bits_.begin() + (a + 1) * stride_,
                   bits_.begin() + b * stride_);
}

void eliminate_column_serial(BitMatrix& m, std::size_t pivot_row, std::size_t col) {
  const std::size_t first = col / kWordBits;
  const std::size_t stride = m.stride();
  const Word* pivot = m.row(pivot_row).data();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r == pivot_row || !m.get(r, col)) continue;
    Word* row = m.row(r).data();
    for (std::size_t w = first; w < stride; ++w) row[w] ^= pivot[w];
  }
}

void eliminate_column_omp(BitMatrix& m, std::size_t pivot_row, std::size_t col) {
  const std::size_t first = col / kWordBits;
  const std::size_t stride = m.stride();
  const Word* pivot = m.row(pivot_row).data();
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    auto ur = static_cast<std::size_t>(r);
    if (ur == pivot_row || !m.get(ur, col)) continue;
    Word* row = m.row(ur).data();
    for (std::size_t w = first; w < stride; ++w) row[w] ^= pivot[w];
  }
}

Reduction reduce(BitMatrix& m, std::size_t coef_cols, bool parallel) {
  Reduction red;
  std::size_t r = 0;
  for (std::size_t col = 0; col < coef_cols && r < m.rows(); ++col) {
    std::size_t p = r;
    while (p < m.rows() && !m.get(p, col)) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    if (parallel)
      eliminate_column_omp(m, r, col);
    else
      eliminate_column_serial(m, r, col);
    red.pivot_cols.push_back(col);
    ++r;
  }
  red.rank = r;
  return red;
}

}  // namespace gf2

SolutionSpace gf2_solve(std::size_t num_vars, std::span<const XorEquation> equations,
                        bool parallel) {
  gf2::BitMatrix m(equations.size(), num_vars + 1);
  for (std::size_t e = 0; e < equations.size(); ++e) {
    for (auto v : equations[e].vars) {
      if (v >= num_vars)
        throw Error(ErrorKind::IndexOutOfRange,
                    "equation " + std::to_string(e) + " references variable " + std::to_string(v));
      m.flip(e, v);  // repeated variables cancel, as they should over GF(2)
    }
    if (equations[e].parity & 1u) m.flip(e, num_vars);
  }

  const gf2::Reduction red = gf2::reduce(m, num_vars, parallel);
  for (std::size_t r = red.rank; r < m.rows(); ++r)
    if (m.get(r, num_vars))
      throw Error(ErrorKind::Inconsistent, "augmented rank exceeds coefficient rank " +
                                               std::to_string(red.rank));

  SolutionSpace space;
  space.num_vars = num_vars;
  space.rank = red.rank;
  space.particular.assign(num_vars, 0);
  std::vector<char> is_pivot(num_vars, 0);
  for (std::size_t r = 0; r < red.rank; ++r) {
    is_pivot[red.pivot_cols[r]] = 1;
    space.particular[red.pivot_cols[r]] = m.get(r, num_vars) ? 1 : 0;
  }
  for (std::size_t f = 0; f < num_vars; ++f) {
    if (is_pivot[f]) continue;
    Assignment v(num_vars, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < red.rank; ++r)
      if (m.get(r, f)) v[red.pivot_cols[r]] = 1;
    space.nullspace_basis.push_back(std::move(v));
  }
  return space;
}

}  // namespace xorbench
