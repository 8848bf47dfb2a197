#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "matid/poly.hpp"

namespace matid {

/// Dense square matrix over a tagged field; exact arithmetic.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Field field, std::size_t dim);

  static Matrix zero(Field field, std::size_t dim) { return Matrix(field, dim); }
  static Matrix identity(Field field, std::size_t dim);
  static Matrix scalar(const Scalar& c, std::size_t dim);
  /// E_{jk} with 1-based j, k.
  static Matrix unit(Field field, std::size_t dim, std::size_t j, std::size_t k);

  Field field() const { return field_; }
  std::size_t dim() const { return dim_; }
  /// 0-based access.
  const Scalar& at(std::size_t r, std::size_t c) const { return cells_[r * dim_ + c]; }
  Scalar& at(std::size_t r, std::size_t c) { return cells_[r * dim_ + c]; }
  bool is_zero() const;

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Matrix scaled(const Scalar& c) const;

  bool operator==(const Matrix& o) const;
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  /// Row-major nested list, e.g. "[[1, 0], [0, 1]]".
  std::string str() const;

 private:
  void check_compatible(const Matrix& o) const;

  Field field_;
  std::size_t dim_ = 0;
  std::vector<Scalar> cells_;
};

using MatrixAssignment = std::map<VarRef, Matrix>;

/// f(A_1, ..., A_n) for the assignment; every variable of f must be bound.
Matrix evaluate(const NcPoly& f, const MatrixAssignment& assignment, std::size_t dim);

}  // namespace matid
