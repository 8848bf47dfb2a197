#include "matid/matrix.hpp"

#include <algorithm>

namespace matid {

Matrix::Matrix(Field field, std::size_t dim) : field_(field), dim_(dim), cells_(dim * dim, Scalar::zero(field)) {}

Matrix Matrix::identity(Field field, std::size_t dim) { return scalar(Scalar::one(field), dim); }

Matrix Matrix::scalar(const Scalar& c, std::size_t dim) {
  Matrix m(c.field(), dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = c;
  return m;
}

Matrix Matrix::unit(Field field, std::size_t dim, std::size_t j, std::size_t k) {
  if (j < 1 || j > dim || k < 1 || k > dim) throw PreconditionError("matrix unit index out of range");
  Matrix m(field, dim);
  m.at(j - 1, k - 1) = Scalar::one(field);
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const Scalar& s) { return s.is_zero(); });
}

void Matrix::check_compatible(const Matrix& o) const {
  if (field_ != o.field_) throw FieldMismatch("matrices over " + field_.name() + " and " + o.field_.name());
  if (dim_ != o.dim_) {
    throw PreconditionError("dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(o.dim_));
  }
}

Matrix Matrix::operator+(const Matrix& o) const {
  check_compatible(o);
  Matrix out = *this;
  for (std::size_t i = 0; i < cells_.size(); ++i) out.cells_[i] += o.cells_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& o) const {
  check_compatible(o);
  Matrix out = *this;
  for (std::size_t i = 0; i < cells_.size(); ++i) out.cells_[i] -= o.cells_[i];
  return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
  check_compatible(o);
  Matrix out(field_, dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t t = 0; t < dim_; ++t) {
      const Scalar& a = at(r, t);
      if (a.is_zero()) continue;
      for (std::size_t c = 0; c < dim_; ++c) {
        const Scalar& b = o.at(t, c);
        if (!b.is_zero()) out.at(r, c) += a * b;
      }
    }
  }
  return out;
}

Matrix Matrix::scaled(const Scalar& c) const {
  Matrix out = *this;
  for (Scalar& s : out.cells_) s *= c;
  return out;
}

bool Matrix::operator==(const Matrix& o) const { return field_ == o.field_ && dim_ == o.dim_ && cells_ == o.cells_; }

std::string Matrix::str() const {
  std::string out = "[";
  for (std::size_t r = 0; r < dim_; ++r) {
    out += r ? ", [" : "[";
    for (std::size_t c = 0; c < dim_; ++c) {
      if (c) out += ", ";
      out += at(r, c).str();
    }
    out += "]";
  }
  return out + "]";
}

Matrix evaluate(const NcPoly& f, const MatrixAssignment& assignment, std::size_t dim) {
  const Field field = f.field();
  Matrix acc(field, dim);
  // Terms are sorted, so consecutive words share prefixes; reuse the longest one.
  std::vector<Matrix> prefix{Matrix::identity(field, dim)};
  const Word* prev = nullptr;
  for (const Term& t : f.terms()) {
    std::size_t common = 0;
    if (prev) {
      while (common < prev->size() && common < t.word.size() && (*prev)[common] == t.word[common]) ++common;
    }
    prefix.resize(common + 1);
    for (std::size_t i = common; i < t.word.size(); ++i) {
      auto it = assignment.find(t.word[i]);
      if (it == assignment.end()) throw PreconditionError("no matrix assigned to " + t.word[i].str());
      if (it->second.dim() != dim) throw PreconditionError("matrix for " + t.word[i].str() + " has wrong dimension");
      prefix.push_back(prefix.back() * it->second);
    }
    acc = acc + prefix.back().scaled(t.coeff);
    prev = &t.word;
  }
  return acc;
}

}  // namespace matid
