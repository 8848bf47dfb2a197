#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "matid/errors.hpp"

namespace matid {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 62 bits are kept inline;
/// anything larger spills to a shared, immutable GMP rational. The
/// representation is canonical, so equality is a field-wise comparison.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);

  /// Parses "INT" or "INT/INT" with an optional leading sign.
  static Rational parse(std::string_view text);

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_small() const { return !big_; }
  /// Numerator of an inline value; only meaningful when is_small().
  std::int64_t small_numerator() const { return num_; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  int sign() const;

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const;
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;

  std::string str() const;
  std::size_t hash() const;

 private:
  void assign_wide(__int128 num, __int128 den);
  void assign_big(mpq_class value);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

/// The coefficient field: the rationals, or GF(p) for a prime p < 2^61.
class Field {
 public:
  Field() = default;
  static Field rationals() { return Field(); }
  static Field prime(std::uint64_t p);
  /// Accepts "Q", "QQ", "GF(p)" or a bare prime.
  static Field parse(std::string_view text);

  bool is_rational() const { return modulus_ == 0; }
  std::uint64_t modulus() const { return modulus_; }
  std::string name() const;

  bool operator==(const Field& o) const { return modulus_ == o.modulus_; }
  bool operator!=(const Field& o) const { return modulus_ != o.modulus_; }

 private:
  explicit Field(std::uint64_t p) : modulus_(p) {}
  std::uint64_t modulus_ = 0;
};

bool is_prime_u64(std::uint64_t n);

/// A field element tagged with its field. Prime-field values are residues
/// in [0, p); rational values are exact. Mixing fields throws FieldMismatch.
class Scalar {
 public:
  Scalar() = default;
  Scalar(Field field, const Rational& value);
  static Scalar zero(Field field) { return Scalar(field, Rational(0)); }
  static Scalar one(Field field) { return Scalar(field, Rational(1)); }
  /// Residue class of `r` in a prime field.
  static Scalar from_residue(Field field, std::uint64_t r);

  Field field() const { return field_; }
  bool is_zero() const { return value_.is_zero(); }
  bool is_one() const { return value_.is_one(); }

  /// Exact rational value; for prime fields this is the residue in [0, p).
  const Rational& value() const { return value_; }
  std::uint64_t residue() const;

  /// Re-interprets this element in `target`. Rationals map to GF(p) when the
  /// denominator is invertible; prime-field residues only map to themselves.
  Scalar to_field(Field target) const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar inverse() const;
  Scalar pow(std::uint64_t e) const;

  bool operator==(const Scalar& o) const { return field_ == o.field_ && value_ == o.value_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  /// Rationals print in lowest terms ("-3/2"); residues print as integers.
  std::string str() const;
  std::size_t hash() const { return value_.hash() ^ (field_.modulus() * 0x9e3779b97f4a7c15ULL); }

 private:
  void check_same(const Scalar& o) const;
  static Scalar from_rational(Field field, Rational value);

  Field field_;
  Rational value_;
};

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

}  // namespace matid
