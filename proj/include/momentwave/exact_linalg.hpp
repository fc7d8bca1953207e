#pragma once

// Dense matrices over Q: determinant, rank and nullspace by exact
// Gaussian elimination. Sizes here stay below a few hundred.

#include <cstddef>
#include <vector>

#include "momentwave/combinatorics.hpp"

namespace momentwave {

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// Square submatrix on rows/cols [first, first+size).
  QMatrix block(std::size_t first, std::size_t size) const;
  QMatrix transpose() const;
  friend bool operator==(const QMatrix& a, const QMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

QMatrix operator*(const QMatrix& a, const QMatrix& b);

Rational determinant(const QMatrix& m);
std::size_t rank(const QMatrix& m);
/// Basis of {x : m x = 0}, one vector per free column of the reduced row echelon form.
std::vector<std::vector<Rational>> nullspace(const QMatrix& m);

}  // namespace momentwave
