#pragma once

// Packed GF(2) matrices and the row-elimination kernels behind gf2_solve.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xorbench::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_((cols + kWordBits - 1) / kWordBits), bits_(rows * stride_) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }

  bool get(std::size_t r, std::size_t c) const noexcept {
    return (bits_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }
  void flip(std::size_t r, std::size_t c) noexcept {
    bits_[r * stride_ + c / kWordBits] ^= Word{1} << (c % kWordBits);
  }
  std::span<Word> row(std::size_t r) noexcept { return {bits_.data() + r * stride_, stride_}; }
  std::span<const Word> row(std::size_t r) const noexcept {
    return {bits_.data() + r * stride_, stride_};
  }
  void swap_rows(std::size_t a, std::size_t b) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> bits_;
};

// Clears column `col` in every row except `pivot_row` by XOR-ing the pivot
// row into it. Only words from col/64 onward are touched: earlier columns of
// the pivot row are already zero in Gauss-Jordan order.
void eliminate_column_serial(BitMatrix& m, std::size_t pivot_row, std::size_t col);
void eliminate_column_omp(BitMatrix& m, std::size_t pivot_row, std::size_t col);

struct Reduction {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;  // pivot column of row r, r < rank
};

// In-place reduced row echelon form over the first `coef_cols` columns.
Reduction reduce(BitMatrix& m, std::size_t coef_cols, bool parallel);

}  // namespace xorbench::gf2
